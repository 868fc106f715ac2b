"""Case studies: the CNOT weak value and the spin-1 post-selection family.

The spin-1 study fixes pre = (2, 1, j)/sqrt(6) and A = S_z and sweeps the
post-selection family (cos t, sin t e^{i xi}/sqrt(2), sin t/sqrt(2)) over
(theta, xi), reporting the weak value, its unwrapped argument, the two
solid angles, the post-state star positions and the star angle.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .blochgeo import SceneGraph, build_octant_scene, build_scene, star_angle
from .errors import ValidationError
from .majorana import (
    ArgumentDecomposition,
    CoherentMapping,
    MajoranaStar,
    StarSet,
    decompose_reduced,
    decompose_with_mapping,
    majorana_polynomial,
    qutrit_explicit_mapping,
    qutrit_reduction,
    roots,
    track_stars,
)
from .qstate import Observable, PureState, arg, expectation, principal_angle, spin1
from .weakval import WeakValueResult, effective_state, weak_value

# Rows with |<post|pre>| below this are flagged divergent instead of carrying
# 1e9-magnitude weak values into tables and plots.
DIVERGENCE_ATOL = 1e-9
# Steps of the unwrapped argument inside (pi - 0.3, pi] are genuine pi jumps,
# flagged and kept rather than smoothed away.
PI_JUMP_WINDOW = 0.3
DEGENERATE_OVERLAP_ATOL = 1e-12

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class _Spin1Frame:
    """Precomputed fixed data of the spin-1 study."""

    pre: PureState
    observable: Observable
    eff: PureState
    apre: np.ndarray
    exp_a: float
    exp_a2: float
    mapping: CoherentMapping
    u21: np.ndarray
    phi_iprime: np.ndarray
    ip_dot_i: complex


@functools.lru_cache(maxsize=1)
def _frame() -> _Spin1Frame:
    pre = PureState(np.array([2.0, 1.0, 1.0j]) / math.sqrt(6.0))
    sz = spin1((0.0, 0.0, 1.0))
    exp_a = expectation(sz, pre)
    apre = sz.mat @ pre.amps
    exp_a2 = float(np.real(np.vdot(apre, apre)))
    # Guard against state-entry typos before any sweep runs.
    if abs(exp_a - 0.5) > 1e-12 or abs(exp_a2 - 5.0 / 6.0) > 1e-12:
        raise ValidationError("spin-1 frame constants are off; pre-state entry is wrong")
    eff = effective_state(sz, pre)
    expected_eff = np.array([2.0, 0.0, -1.0j]) / math.sqrt(5.0)
    if float(np.max(np.abs(eff.amps - expected_eff))) > 1e-12:
        raise ValidationError("spin-1 effective state is off; operator entry is wrong")
    mapping = qutrit_explicit_mapping(pre, eff)
    u21 = mapping.u2.mat @ mapping.u1.mat
    u21.setflags(write=False)
    phi_ip = mapping.phi_iprime.qubit
    return _Spin1Frame(
        pre=pre,
        observable=sz,
        eff=eff,
        apre=apre,
        exp_a=exp_a,
        exp_a2=exp_a2,
        mapping=mapping,
        u21=u21,
        phi_iprime=phi_ip,
        ip_dot_i=phi_ip[0].conjugate(),
    )


def spin1_pre_state() -> PureState:
    return _frame().pre


def spin1_post_state(theta: float, xi: float) -> PureState:
    """The post-selection family (cos t, sin t e^{i xi}/sqrt(2), sin t/sqrt(2))."""
    return PureState(_post_vec(theta, xi))


def _post_vec(theta: float, xi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array(
        [math.cos(theta), st * np.exp(1j * xi) / _SQRT2, st / _SQRT2], dtype=complex
    )


@dataclass
class SweepRow:
    """One (theta, xi) sample of the spin-1 study.

    Angles in radians except star_angle_deg. Divergent rows carry NaN weak
    values; rows with a post-state star orthogonal to the mapped pre-state
    carry NaN for that star's solid angle.
    """

    theta: float
    xi: float
    wv_re: float
    wv_im: float
    wv_mod: float
    wv_arg: float
    wv_arg_unwrapped: float
    omega1: float
    omega2: float
    star1_theta: float
    star1_phi: float
    star2_theta: float
    star2_phi: float
    star_angle_deg: float
    overlap_pre_post_mod: float
    divergent: bool
    pi_jump_adjacent: bool
    degenerate_triangle: bool


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def _mapped_star_set(frame: _Spin1Frame, theta: float, xi: float) -> StarSet:
    mapped = frame.u21 @ _post_vec(theta, xi)
    finite, inf_count = roots(majorana_polynomial(PureState.normalized(mapped)))
    pairs = [(MajoranaStar.from_root(z), z) for z in finite]
    pairs += [(MajoranaStar.from_root(None), None)] * inf_count
    # Label stars by descending polar angle at a line start; track_stars keeps
    # the labels continuous along the line afterwards.
    pairs.sort(key=lambda p: (-p[0].theta, p[0].phi))
    return StarSet(dim=3, stars=tuple(p[0] for p in pairs), roots=tuple(p[1] for p in pairs))


def _row(
    frame: _Spin1Frame, theta: float, xi: float, prev: Optional[StarSet]
) -> tuple[SweepRow, StarSet]:
    f = _post_vec(theta, xi)
    ov = complex(np.vdot(f, frame.pre.amps))
    ovm = abs(ov)
    divergent = ovm < DIVERGENCE_ATOL

    if divergent:
        wv_re = wv_im = wv_mod = wv_arg = math.nan
    else:
        wv = complex(np.vdot(f, frame.apre)) / ov
        wv_re, wv_im, wv_mod, wv_arg = wv.real, wv.imag, abs(wv), arg(wv)

    stars = _mapped_star_set(frame, theta, xi)
    if prev is not None:
        stars = track_stars(prev, stars)

    omegas = []
    degenerate = False
    for star in stars.stars:
        den = star.qubit[0].conjugate()
        if abs(den) <= DEGENERATE_OVERLAP_ATOL:
            degenerate = True
            omegas.append(math.nan)
            continue
        qubit_wv = complex(np.vdot(star.qubit, frame.phi_iprime)) * frame.ip_dot_i / den
        omegas.append(-2.0 * arg(qubit_wv))

    s1, s2 = stars.stars
    row = SweepRow(
        theta=theta,
        xi=xi,
        wv_re=wv_re,
        wv_im=wv_im,
        wv_mod=wv_mod,
        wv_arg=wv_arg,
        wv_arg_unwrapped=wv_arg,
        omega1=omegas[0],
        omega2=omegas[1],
        star1_theta=s1.theta,
        star1_phi=s1.phi,
        star2_theta=s2.theta,
        star2_phi=s2.phi,
        star_angle_deg=star_angle(s1.bloch, s2.bloch),
        overlap_pre_post_mod=ovm,
        divergent=divergent,
        pi_jump_adjacent=False,
        degenerate_triangle=degenerate,
    )
    return row, stars


def spin1_point(theta: float, xi: float) -> SweepRow:
    """One sample of the spin-1 study, stars in standalone (descending theta) order."""
    if not 0.0 <= theta <= math.pi or not 0.0 <= xi <= 2.0 * math.pi:
        raise ValidationError("theta must lie in [0, pi] and xi in [0, 2 pi]")
    row, _ = _row(_frame(), theta, xi, None)
    return row


def spin1_decomposition(theta: float, xi: float) -> tuple[ArgumentDecomposition, CoherentMapping]:
    """Full decomposition record for one sample, using the study's explicit mapping."""
    frame = _frame()
    return decompose_with_mapping(
        frame.observable,
        frame.pre,
        spin1_post_state(theta, xi),
        mapping_fn=qutrit_explicit_mapping,
    )


@dataclass(frozen=True)
class SweepConfig:
    """Grids and switches for a spin-1 sweep (grid order: theta outer, xi inner)."""

    theta_grid: tuple[float, ...]
    xi_grid: tuple[float, ...]
    track_stars: bool = True
    unwrap: bool = True
    outputs: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))
        object.__setattr__(self, "xi_grid", tuple(float(x) for x in self.xi_grid))
        _check_grid(self.theta_grid, "theta_grid", math.pi)
        _check_grid(self.xi_grid, "xi_grid", 2.0 * math.pi)
        if self.outputs is not None:
            outputs = tuple(str(c) for c in self.outputs)
            unknown = [c for c in outputs if c not in SWEEP_COLUMNS]
            if unknown:
                raise ValidationError(f"unknown output columns: {unknown}")
            object.__setattr__(self, "outputs", outputs)


def _check_grid(grid: tuple[float, ...], name: str, upper: float) -> None:
    if len(grid) == 0:
        raise ValidationError(f"{name} is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"{name} must be strictly increasing")
    if grid[0] < -1e-12 or grid[-1] > upper + 1e-12:
        raise ValidationError(f"{name} must lie within [0, {upper:.6g}]")


def _unwrap_line(rows: list[SweepRow]) -> None:
    last_arg = None
    last_unwrapped = None
    prev_row = None
    for row in rows:
        if math.isnan(row.wv_arg):
            row.wv_arg_unwrapped = math.nan
            continue
        if last_arg is None:
            row.wv_arg_unwrapped = row.wv_arg
        else:
            step = principal_angle(row.wv_arg - last_arg)
            row.wv_arg_unwrapped = last_unwrapped + step
            if abs(step) > math.pi - PI_JUMP_WINDOW:
                row.pi_jump_adjacent = True
                prev_row.pi_jump_adjacent = True
        last_arg, last_unwrapped, prev_row = row.wv_arg, row.wv_arg_unwrapped, row


def sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate the spin-1 family over the grid, theta-major, xi-minor.

    With track_stars the star labels stay continuous along each theta line
    (anchored at the line's first xi); with unwrap the argument column is
    accumulated without 2 pi wraps, keeping genuine pi jumps and flagging
    the adjacent rows.
    """
    frame = _frame()
    rows: list[SweepRow] = []
    for theta in config.theta_grid:
        prev: Optional[StarSet] = None
        line: list[SweepRow] = []
        for xi in config.xi_grid:
            row, stars = _row(frame, theta, xi, prev if config.track_stars else None)
            if config.track_stars:
                prev = stars
            line.append(row)
        if config.unwrap:
            _unwrap_line(line)
        rows.extend(line)
    return rows


@dataclass(frozen=True)
class ExtremaLocus:
    """Per-xi interior extrema of |A_w| over theta, golden-section refined."""

    xi: tuple[float, ...]
    theta_max: tuple[float, ...]
    theta_min: tuple[float, ...]
    max_modulus: tuple[float, ...]  # NaN at divergent xi (flag, not a number)
    divergent: tuple[bool, ...]


def _golden_section(f, a: float, b: float, tol: float = 1e-8, maximize: bool = True) -> float:
    sign = -1.0 if maximize else 1.0
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = sign * f(d)
    return 0.5 * (a + b)


def _modulus_on_grid(frame: _Spin1Frame, thetas: np.ndarray, xi: float) -> np.ndarray:
    posts = np.stack(
        [
            np.cos(thetas),
            np.sin(thetas) * np.exp(1j * xi) / _SQRT2,
            np.sin(thetas) / _SQRT2,
        ],
        axis=1,
    )
    numer = np.abs(posts.conj() @ frame.apre)
    denom = np.abs(posts.conj() @ frame.pre.amps)
    with np.errstate(divide="ignore", invalid="ignore"):
        return numer / denom


def extrema_locus(xi_grid, theta_step: float = 1e-3, refine_tol: float = 1e-8) -> ExtremaLocus:
    """Locate the per-xi argmax and argmin of |A_w| over theta in [0, pi]."""
    xi_grid = tuple(float(x) for x in xi_grid)
    _check_grid(xi_grid, "xi_grid", 2.0 * math.pi)
    if theta_step > 1e-3 + 1e-15:
        raise ValidationError("theta_step must be at most 1e-3")
    frame = _frame()
    thetas = np.arange(0.0, math.pi + theta_step / 2.0, theta_step)
    t_max, t_min, mods, flags = [], [], [], []
    for xi in xi_grid:
        grid_mod = _modulus_on_grid(frame, thetas, xi)

        def f(t: float) -> float:
            return float(_modulus_on_grid(frame, np.array([t]), xi)[0])

        i = int(np.nanargmax(grid_mod))
        tm = _golden_section(
            f, thetas[max(0, i - 1)], thetas[min(len(thetas) - 1, i + 1)], refine_tol, True
        )
        j = int(np.nanargmin(grid_mod))
        tn = _golden_section(
            f, thetas[max(0, j - 1)], thetas[min(len(thetas) - 1, j + 1)], refine_tol, False
        )
        ov = abs(complex(np.vdot(_post_vec(tm, xi), frame.pre.amps)))
        divergent = ov < DIVERGENCE_ATOL
        t_max.append(tm)
        t_min.append(tn)
        mods.append(math.nan if divergent else f(tm))
        flags.append(divergent)
    return ExtremaLocus(
        xi=xi_grid,
        theta_max=tuple(t_max),
        theta_min=tuple(t_min),
        max_modulus=tuple(mods),
        divergent=tuple(flags),
    )


@dataclass(frozen=True)
class StarAngleMap:
    """Star-angle matrix over (theta, xi) with the modulus-extrema loci."""

    theta_grid: tuple[float, ...]
    xi_grid: tuple[float, ...]
    angles_deg: np.ndarray  # shape (len(theta_grid), len(xi_grid))
    locus: ExtremaLocus


def star_angle_map(theta_grid, xi_grid, locus_theta_step: float = 1e-3) -> StarAngleMap:
    """Angle between the two mapped post-state stars per (theta, xi) cell."""
    theta_grid = tuple(float(t) for t in theta_grid)
    xi_grid = tuple(float(x) for x in xi_grid)
    _check_grid(theta_grid, "theta_grid", math.pi)
    _check_grid(xi_grid, "xi_grid", 2.0 * math.pi)
    frame = _frame()
    angles = np.empty((len(theta_grid), len(xi_grid)))
    for i, theta in enumerate(theta_grid):
        for j, xi in enumerate(xi_grid):
            ss = _mapped_star_set(frame, theta, xi)
            angles[i, j] = star_angle(ss.stars[0].bloch, ss.stars[1].bloch)
    angles.setflags(write=False)
    return StarAngleMap(
        theta_grid=theta_grid,
        xi_grid=xi_grid,
        angles_deg=angles,
        locus=extrema_locus(xi_grid, theta_step=locus_theta_step),
    )


@dataclass(frozen=True)
class CnotReport:
    """The controlled-NOT case: weak value and both argument decompositions."""

    weak_value: WeakValueResult
    stars_decomposition: ArgumentDecomposition
    reduced_decomposition: ArgumentDecomposition
    scenes: dict[str, SceneGraph]


CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def cnot_pre_state() -> PureState:
    return PureState(np.array([1.0, -1.0j, 1.0, -1.0j]) / 2.0)


def cnot_post_state() -> PureState:
    return PureState(np.array([1.0, 0.0, -2.0, 0.0]) / math.sqrt(5.0))


def cnot_case(arc_samples: int = 64) -> CnotReport:
    """Weak value of the CNOT gate for the fixed pre/post pair, decomposed as
    three solid angles (4-level stars) and as two (qutrit reduction), plus the
    octant projection of the reduced geodesic triangle."""
    gate = Observable(CNOT_MATRIX)
    pre = cnot_pre_state()
    post = cnot_post_state()
    wv = weak_value(gate, pre, post)
    decomp, mapping = decompose_with_mapping(gate, pre, post)
    reduced, reduced_mapping = decompose_reduced(gate, pre, post)

    pre3, eff3, post3, _ = qutrit_reduction(pre, wv.effective_state, post)
    scenes = {
        "stars": build_scene(decomp, mapping, arc_samples=arc_samples),
        "reduced": build_scene(reduced, reduced_mapping, arc_samples=arc_samples),
        "octant": build_octant_scene(
            [("i", pre3), ("i'", eff3), ("f", post3)],
            arc_samples=arc_samples,
            caption="octant projection of the geodesic triangle (i, i', f)",
        ),
    }
    return CnotReport(
        weak_value=wv,
        stars_decomposition=decomp,
        reduced_decomposition=reduced,
        scenes=scenes,
    )

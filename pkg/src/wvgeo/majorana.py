"""Majorana stellar representation and the star-wise split of weak-value arguments.

An N-level ray maps to N-1 stars on the Bloch sphere (roots of its Majorana
polynomial, including roots at infinity). Two unitaries send the pre-selected
state to the north-pole coherent state and the effective state to another
coherent state; the post-selected state's stars then carry the argument of
the weak value as qubit-projector weak values, one signed solid angle each.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateStarTriangleError,
    DimensionMismatchError,
    NilImageError,
    ValidationError,
)
from .qstate import (
    Observable,
    PureState,
    UnitaryOp,
    arg,
    canonicalize,
    mapping_unitary,
    principal_angle,
)
from .weakval import NIL_IMAGE_ATOL, weak_value

# Leading polynomial coefficients below this (relative) threshold are treated
# as exact zeros, i.e. as stars at infinity.
LEADING_ZERO_RTOL = 1e-13
ROOT_CLUSTER_TOL = 1e-8
# Below this overlap with the pre-state the coherent target degenerates; the
# mapping is computed from a slightly perturbed effective state and flagged.
ILL_CONDITIONED_ATOL = 1e-10
_PERTURBATION = 1e-6
DEGENERATE_OVERLAP_ATOL = 1e-12

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MajoranaStar:
    """One star: polar/azimuthal angles, Bloch vector, and the qubit it encodes."""

    theta: float
    phi: float
    bloch: np.ndarray
    qubit: np.ndarray

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MajoranaStar":
        theta = min(max(float(theta), 0.0), math.pi)
        phi = float(phi) % TWO_PI
        st, ct = math.sin(theta), math.cos(theta)
        bloch = np.array([st * math.cos(phi), st * math.sin(phi), ct])
        qubit = np.array(
            [math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex
        )
        bloch.setflags(write=False)
        qubit.setflags(write=False)
        return cls(theta=theta, phi=phi, bloch=bloch, qubit=qubit)

    @classmethod
    def from_root(cls, z: Optional[complex]) -> "MajoranaStar":
        """Star of a Majorana-polynomial root; None stands for a root at infinity."""
        if z is None:
            return cls.from_angles(math.pi, 0.0)
        z = complex(z)
        return cls.from_angles(2.0 * math.atan(abs(z)), arg(z) % TWO_PI)


@dataclass(frozen=True)
class StarSet:
    """The N-1 stars of an N-level ray, with their source roots aligned.

    ``roots[k]`` is the polynomial root producing ``stars[k]`` (None for a
    root at infinity). Standalone extraction sorts stars by (theta, phi);
    sweep callers reorder via :func:`track_stars`.
    """

    dim: int
    stars: tuple[MajoranaStar, ...]
    roots: tuple[Optional[complex], ...]

    def __post_init__(self):
        if len(self.stars) != self.dim - 1 or len(self.roots) != self.dim - 1:
            raise ValidationError(f"a {self.dim}-level state must carry {self.dim - 1} stars")

    @property
    def infinity_count(self) -> int:
        return sum(1 for r in self.roots if r is None)

    @property
    def finite_roots(self) -> tuple[complex, ...]:
        return tuple(r for r in self.roots if r is not None)

    @classmethod
    def from_state(cls, state: PureState) -> "StarSet":
        finite, inf_count = roots(majorana_polynomial(state))
        pairs = [(MajoranaStar.from_root(z), z) for z in finite]
        pairs += [(MajoranaStar.from_root(None), None)] * inf_count
        pairs.sort(key=lambda p: (p[0].theta, p[0].phi))
        return cls(
            dim=state.dim,
            stars=tuple(p[0] for p in pairs),
            roots=tuple(p[1] for p in pairs),
        )

    def to_state(self) -> PureState:
        return stars_to_state(self.stars)

    def clustered_roots(
        self, tol: float = ROOT_CLUSTER_TOL
    ) -> list[tuple[Optional[complex], int]]:
        """Roots grouped within ``tol``; returns (representative, multiplicity) pairs."""
        clusters: list[tuple[complex, int]] = []
        for z in sorted(self.finite_roots, key=lambda z: (z.real, z.imag)):
            for i, (rep, count) in enumerate(clusters):
                if abs(z - rep) <= tol:
                    clusters[i] = (rep, count + 1)
                    break
            else:
                clusters.append((z, 1))
        out: list[tuple[Optional[complex], int]] = list(clusters)
        if self.infinity_count:
            out.append((None, self.infinity_count))
        return out


def majorana_polynomial(s: PureState) -> np.ndarray:
    """Coefficients (-1)^k sqrt(C(N-1, k)) c_k, ordered by descending power."""
    n = s.dim
    coeffs = np.array(
        [(-1) ** k * math.sqrt(math.comb(n - 1, k)) * s.amps[k] for k in range(n)],
        dtype=complex,
    )
    coeffs.setflags(write=False)
    return coeffs


def _horner(coeffs: np.ndarray, x: complex) -> tuple[complex, complex]:
    p = 0j
    dp = 0j
    for a in coeffs:
        dp = dp * x + p
        p = p * x + complex(a)
    return p, dp


def _newton(coeffs: np.ndarray, x: complex, steps: int = 4) -> complex:
    best_x, best_p = x, abs(_horner(coeffs, x)[0])
    cur = x
    for _ in range(steps):
        p, dp = _horner(coeffs, cur)
        if dp == 0:
            break
        cur = cur - p / dp
        pn = abs(_horner(coeffs, cur)[0])
        if pn < best_p:
            best_x, best_p = cur, pn
    return best_x


def _polish_root(z: complex, coeffs: np.ndarray) -> complex:
    # For |z| > 1 polish w = 1/z on the reversed polynomial, which keeps the
    # evaluation well-scaled for arbitrarily large roots.
    if abs(z) <= 1.0:
        return _newton(coeffs, z)
    w = _newton(coeffs[::-1], 1.0 / z)
    return 1.0 / w if w != 0 else z


def roots(coeffs) -> tuple[list[complex], int]:
    """Finite roots (companion-matrix eigenvalues, Newton-polished) + infinity count.

    Leading coefficients below 1e-13 of the largest magnitude are treated as
    zero; each costs one root at infinity. Residuals are driven below
    1e-12 * max|coeff| in the scale-free sense (the reversed polynomial is
    used for roots outside the unit disk).
    """
    arr = np.asarray(coeffs, dtype=complex).ravel()
    if arr.size == 0:
        raise ValidationError("empty coefficient list")
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        raise ValidationError("all polynomial coefficients are zero")
    lead = 0
    while lead < arr.size - 1 and abs(arr[lead]) <= LEADING_ZERO_RTOL * scale:
        lead += 1
    trimmed = arr[lead:]
    if trimmed.size == 1:
        return [], lead
    raw = np.roots(trimmed)
    return [_polish_root(complex(z), trimmed) for z in raw], lead


def stars_to_state(stars: Sequence[MajoranaStar]) -> PureState:
    """N-level state whose symmetrized qubit product matches the given stars.

    The coefficient of basis state k is the order-k elementary symmetric
    mixture of the qubit amplitudes divided by sqrt(C(N-1, k)); roots at
    infinity enter through their vanishing first amplitude, no special case.
    """
    if len(stars) == 0:
        raise ValidationError("need at least one star")
    poly = np.array([1.0 + 0j])
    for star in stars:
        poly = np.convolve(poly, star.qubit)
    n = len(stars) + 1
    c = np.array([poly[k] / math.sqrt(math.comb(n - 1, k)) for k in range(n)])
    return canonicalize(PureState.normalized(c))


def _geodesic_distance(u: np.ndarray, v: np.ndarray) -> float:
    return math.acos(min(1.0, max(-1.0, float(np.dot(u, v)))))


def track_stars(previous: StarSet, current: StarSet) -> StarSet:
    """Reorder ``current`` to minimize total great-circle motion from ``previous``."""
    if previous.dim != current.dim:
        raise DimensionMismatchError("star sets have different dimensions")
    n = len(current.stars)
    prev = [s.bloch for s in previous.stars]
    best_perm = None
    best_cost = math.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(_geodesic_distance(prev[i], current.stars[perm[i]].bloch) for i in range(n))
        if cost < best_cost:
            best_cost, best_perm = cost, perm
    return StarSet(
        dim=current.dim,
        stars=tuple(current.stars[j] for j in best_perm),
        roots=tuple(current.roots[j] for j in best_perm),
    )


@dataclass(frozen=True)
class CoherentMapping:
    """The two unitaries sending pre and effective states to coherent states.

    ``u2 u1 pre`` is the north-pole coherent state (star ``phi_i`` with
    multiplicity N-1) and ``u2 u1 eff`` is the coherent state of the
    degenerate star ``phi_iprime``. ``mapped_post`` is ``u2 u1 post`` when a
    post-state was supplied. ``ill_conditioned`` marks the near-orthogonal
    regime where the mapping was computed from a perturbed effective state.
    """

    u1: UnitaryOp
    u2: UnitaryOp
    phi_i: MajoranaStar
    phi_iprime: MajoranaStar
    mapped_post: Optional[PureState]
    ill_conditioned: bool = False


def coherent_mapping(
    pre: PureState, eff: PureState, post: Optional[PureState] = None
) -> CoherentMapping:
    """Map ``pre`` to the north-pole coherent state and ``eff`` to a coherent state.

    ``u1`` sends pre to e_0; ``u2 = 1 (+) V`` fixes e_0 and rotates the tail
    of the phase-stripped mapped effective state onto the tail of the coherent
    target whose first component equals |<pre|eff>|. The canonical phase is
    read off the first component above 1e-12 (restored by the perturbation in
    the ill-conditioned branch, so in practice always the first).
    """
    if pre.dim != eff.dim:
        raise DimensionMismatchError(f"state dims differ: {pre.dim} vs {eff.dim}")
    n = pre.dim
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    u1 = mapping_unitary(pre, PureState(e0))

    ill = abs(complex(np.vdot(pre.amps, eff.amps))) < ILL_CONDITIONED_ATOL
    eff_used = eff
    if ill:
        eff_used = PureState.normalized(eff.amps + _PERTURBATION * pre.amps)
    s = u1.mat @ eff_used.amps
    mags = np.abs(s)
    pivots = np.flatnonzero(mags > 1e-12)
    k = int(pivots[0])
    s_can = s * (s[k] / mags[k]).conjugate()
    s_can[k] = mags[k]

    c0 = min(max(float(s_can[0].real), 0.0), 1.0)
    alpha = c0 ** (1.0 / (n - 1))
    beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
    target = np.array(
        [math.sqrt(math.comb(n - 1, k)) * alpha ** (n - 1 - k) * beta**k for k in range(n)],
        dtype=complex,
    )

    tail_s = s_can[1:]
    ns = float(np.linalg.norm(tail_s))
    if ns <= 1e-13:
        v = np.eye(n - 1, dtype=complex)
    else:
        tail_t = target[1:]
        nt = float(np.linalg.norm(tail_t))
        v = mapping_unitary(PureState(tail_s / ns), PureState(tail_t / nt)).mat
    u2_mat = np.eye(n, dtype=complex)
    u2_mat[1:, 1:] = v
    u2 = UnitaryOp(u2_mat)

    mapped_post = None
    if post is not None:
        if post.dim != n:
            raise DimensionMismatchError(f"post dim {post.dim} vs {n}")
        mapped_post = PureState(u2.mat @ (u1.mat @ post.amps))

    phi_iprime = MajoranaStar.from_angles(2.0 * math.acos(min(1.0, alpha)), 0.0)
    return CoherentMapping(
        u1=u1,
        u2=u2,
        phi_i=MajoranaStar.from_angles(0.0, 0.0),
        phi_iprime=phi_iprime,
        mapped_post=mapped_post,
        ill_conditioned=ill,
    )


def _spherical_angles(amps: np.ndarray) -> tuple[float, float, float, float]:
    # amps canonical (first component real >= 0); returns (theta, epsilon, chi1, chi2)
    c0, c1, c2 = amps
    return (
        math.acos(min(1.0, abs(c0))),
        math.atan2(abs(c2), abs(c1)),
        math.atan2(c1.imag, c1.real),
        math.atan2(c2.imag, c2.real),
    )


def qutrit_explicit_mapping(
    pre: PureState, eff: PureState, post: Optional[PureState] = None
) -> CoherentMapping:
    """Closed-form qutrit coherent mapping from the spherical parametrization.

    u1 carries the pre-state's (theta, epsilon, chi1, chi2) row pattern and
    sends it to e_0; u2 rotates the 1-2 block by a = -eps' + arcsin(tan(t'/2))
    with the phases of the mapped effective state stripped. Same contract as
    :func:`coherent_mapping` but a different (equally valid) unitary choice;
    this is the one whose post-state star curves the spin-1 study reports.
    """
    if pre.dim != 3 or eff.dim != 3:
        raise DimensionMismatchError("explicit mapping is defined for qutrits only")
    pc = canonicalize(pre)
    th, ep, x1, x2 = _spherical_angles(pc.amps)
    st, ct = math.sin(th), math.cos(th)
    se, ce = math.sin(ep), math.cos(ep)
    e1, e2 = np.exp(-1j * x1), np.exp(-1j * x2)
    u1 = UnitaryOp(
        np.array(
            [
                [ct, e1 * ce * st, e2 * se * st],
                [st, -e1 * ce * ct, -e2 * se * ct],
                [0.0, -e1 * se, e2 * ce],
            ],
            dtype=complex,
        )
    )

    ill = abs(complex(np.vdot(pre.amps, eff.amps))) < ILL_CONDITIONED_ATOL
    s = canonicalize(PureState(u1.mat @ eff.amps)).amps
    thp, epp, x1p, x2p = _spherical_angles(s)
    if math.sin(thp) <= 1e-13:
        u2 = UnitaryOp(np.eye(3, dtype=complex))
    else:
        a = -epp + math.asin(min(1.0, math.tan(thp / 2.0)))
        f1, f2 = np.exp(-1j * x1p), np.exp(-1j * x2p)
        u2 = UnitaryOp(
            np.array(
                [
                    [1.0, 0.0, 0.0],
                    [0.0, f1 * math.cos(a), -f2 * math.sin(a)],
                    [0.0, f1 * math.sin(a), f2 * math.cos(a)],
                ],
                dtype=complex,
            )
        )

    mapped_post = None
    if post is not None:
        if post.dim != 3:
            raise DimensionMismatchError(f"post dim {post.dim} vs 3")
        mapped_post = PureState(u2.mat @ (u1.mat @ post.amps))

    alpha = math.sqrt(math.cos(thp))
    return CoherentMapping(
        u1=u1,
        u2=u2,
        phi_i=MajoranaStar.from_angles(0.0, 0.0),
        phi_iprime=MajoranaStar.from_angles(2.0 * math.acos(min(1.0, alpha)), 0.0),
        mapped_post=mapped_post,
        ill_conditioned=ill,
    )


@dataclass(frozen=True)
class ArgumentDecomposition:
    """Star-wise split of a weak value's argument.

    ``qubit_wvs[j]`` is the qubit projector weak value of star j of the
    mapped post-state (order matches ``post_stars``), ``solid_angles[j]`` the
    signed solid angle -2 arg of it. ``total_arg`` is the reassembled
    argument, congruent to ``direct_arg`` modulo 2 pi. NaN entries mark stars
    orthogonal to the mapped pre-state (partial results).
    """

    qubit_wvs: tuple[complex, ...]
    solid_angles: tuple[float, ...]
    arg_expA: float
    total_arg: float
    direct_arg: float
    normalization_M: float
    post_stars: StarSet


def _permanent(g: list[list[complex]]) -> complex:
    n = len(g)
    total = 0j
    for perm in itertools.permutations(range(n)):
        p = 1.0 + 0j
        for i, j in enumerate(perm):
            p *= g[i][j]
        total += p
    return total


def _symmetrization_norm(qubits: list[np.ndarray]) -> float:
    """Squared norm of the permutation sum over the qubit product state."""
    n = len(qubits)
    gram = [[complex(np.vdot(qubits[i], qubits[j])) for j in range(n)] for i in range(n)]
    return math.factorial(n) * float(_permanent(gram).real)


def _decompose_states(
    pre: PureState, eff: PureState, post: PureState, mapping_fn=None
) -> tuple[list[complex], list[float], StarSet, float, CoherentMapping]:
    """Geometric engine shared by the full and reduced decompositions."""
    cm = (mapping_fn or coherent_mapping)(pre, eff, post=post)
    star_set = StarSet.from_state(cm.mapped_post)
    phi_ip = cm.phi_iprime.qubit
    ip_dot_i = phi_ip[0].conjugate()  # <phi_i'|phi_i> with phi_i the north pole

    qubit_wvs: list[complex] = []
    omegas: list[float] = []
    degenerate: list[int] = []
    for j, star in enumerate(star_set.stars):
        f = star.qubit
        den = f[0].conjugate()  # <phi_f|phi_i>
        if abs(den) <= DEGENERATE_OVERLAP_ATOL:
            degenerate.append(j)
            qubit_wvs.append(complex(math.nan, math.nan))
            omegas.append(math.nan)
            continue
        wv = complex(np.vdot(f, phi_ip)) * ip_dot_i / den
        qubit_wvs.append(wv)
        omegas.append(-2.0 * arg(wv))

    m = _symmetrization_norm([s.qubit for s in star_set.stars])
    if degenerate:
        raise DegenerateStarTriangleError(
            f"post-state star(s) {degenerate} orthogonal to the mapped pre-state",
            partial=(qubit_wvs, omegas, star_set, m, cm),
        )
    return qubit_wvs, omegas, star_set, m, cm


def _assemble(
    qubit_wvs: list[complex],
    omegas: list[float],
    star_set: StarSet,
    m: float,
    exp_a: float,
    direct_arg: float,
) -> ArgumentDecomposition:
    arg_exp = 0.0 if exp_a >= 0.0 else math.pi
    finite = [arg(w) for w in qubit_wvs if not math.isnan(w.real)]
    total = principal_angle(sum(finite) - arg_exp) if len(finite) == len(qubit_wvs) else math.nan
    return ArgumentDecomposition(
        qubit_wvs=tuple(qubit_wvs),
        solid_angles=tuple(omegas),
        arg_expA=arg_exp,
        total_arg=total,
        direct_arg=direct_arg,
        normalization_M=m,
        post_stars=star_set,
    )


def decompose_with_mapping(
    A: Observable, pre: PureState, post: PureState, mapping_fn=None
) -> tuple[ArgumentDecomposition, CoherentMapping]:
    """Star decomposition of arg A_w plus the coherent mapping that produced it.

    ``mapping_fn`` selects the coherent-mapping construction (the generic
    reflection-based one by default); the totals are invariant under the
    choice, the individual stars and solid angles are not.
    """
    wv = weak_value(A, pre, post)
    if wv.exp_A2 <= NIL_IMAGE_ATOL:
        raise NilImageError("weak value is 0; there is nothing to decompose")
    try:
        qubit_wvs, omegas, star_set, m, cm = _decompose_states(
            pre, wv.effective_state, post, mapping_fn
        )
    except DegenerateStarTriangleError as exc:
        qubit_wvs, omegas, star_set, m, cm = exc.partial
        exc.partial = _assemble(qubit_wvs, omegas, star_set, m, wv.exp_A, wv.argument)
        raise
    return _assemble(qubit_wvs, omegas, star_set, m, wv.exp_A, wv.argument), cm


def decompose_argument(A: Observable, pre: PureState, post: PureState) -> ArgumentDecomposition:
    """Split arg A_w into N-1 signed solid angles plus the 0-or-pi expectation phase.

    The identity total = sum arg(qubit weak values) - arg<A> = -sum Omega/2
    - arg<A> holds by construction; ``direct_arg`` records arg A_w for the
    congruence check modulo 2 pi.
    """
    decomp, _ = decompose_with_mapping(A, pre, post)
    return decomp


def decompose_reduced(
    A: Observable, pre: PureState, post: PureState
) -> tuple[ArgumentDecomposition, CoherentMapping]:
    """Two-solid-angle decomposition after reducing the state triple to a qutrit."""
    wv = weak_value(A, pre, post)
    if wv.exp_A2 <= NIL_IMAGE_ATOL:
        raise NilImageError("weak value is 0; there is nothing to decompose")
    pre3, eff3, post3, _ = qutrit_reduction(pre, wv.effective_state, post)
    try:
        qubit_wvs, omegas, star_set, m, cm = _decompose_states(pre3, eff3, post3)
    except DegenerateStarTriangleError as exc:
        qubit_wvs, omegas, star_set, m, cm = exc.partial
        exc.partial = _assemble(qubit_wvs, omegas, star_set, m, wv.exp_A, wv.argument)
        raise
    return _assemble(qubit_wvs, omegas, star_set, m, wv.exp_A, wv.argument), cm


def qutrit_reduction(
    pre: PureState, eff: PureState, post: PureState
) -> tuple[PureState, PureState, PureState, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Express the three states in an orthonormal frame of their span.

    Returns the three reduced 3-level states plus the frame (vectors in the
    original space; zero vectors pad rank-deficient spans). All pairwise
    overlaps are preserved exactly, so any weak value built from the triple
    is unchanged. Qutrit inputs pass through with the identity frame; qubit
    inputs are padded with a zero third component.
    """
    if not (pre.dim == eff.dim == post.dim):
        raise DimensionMismatchError("states must share one dimension")
    n = pre.dim
    if n < 2:
        raise ValidationError("reduction needs dimension >= 2")
    if n == 3:
        frame = tuple(np.eye(3, dtype=complex)[k] for k in range(3))
        return pre, eff, post, frame
    if n == 2:
        frame = (
            np.array([1, 0], dtype=complex),
            np.array([0, 1], dtype=complex),
            np.zeros(2, dtype=complex),
        )
        reduced = tuple(
            PureState(np.array([s.amps[0], s.amps[1], 0.0], dtype=complex))
            for s in (pre, eff, post)
        )
        return reduced[0], reduced[1], reduced[2], frame

    basis: list[np.ndarray] = []
    for s in (pre, eff, post):
        r = s.amps.astype(complex)
        for _ in range(2):  # re-orthogonalize for stability
            for q in basis:
                r = r - np.vdot(q, r) * q
        norm = float(np.linalg.norm(r))
        if norm > 1e-10:
            basis.append(r / norm)
    while len(basis) < 3:
        basis.append(np.zeros(n, dtype=complex))

    def _coords(s: PureState) -> PureState:
        return PureState(np.array([np.vdot(q, s.amps) for q in basis], dtype=complex))

    return _coords(pre), _coords(eff), _coords(post), (basis[0], basis[1], basis[2])

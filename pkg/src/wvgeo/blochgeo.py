"""Bloch-sphere geometry: signed solid angles, star angles, octant projection,
Fubini-Study geodesics, and scene graphs for figure output."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTriangleError,
    DimensionMismatchError,
    OrthogonalEndpointsError,
    ValidationError,
)
from .majorana import ArgumentDecomposition, CoherentMapping
from .qstate import PureState, arg, canonicalize, overlap

UNIT_ATOL = 1e-12
OVERLAP_ATOL = 1e-12


def _unit3(v, atol: float = UNIT_ATOL) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValidationError("expected a 3-vector")
    if abs(float(np.linalg.norm(arr)) - 1.0) > atol:
        raise ValidationError("expected a unit 3-vector")
    return arr


def solid_angle_bargmann(a: PureState, m: PureState, b: PureState) -> float:
    """Signed solid angle of the qubit triangle (a, m, b) from the overlap phase.

    Defined as -2 arg(<a|b><b|m><m|a>), so the qubit projector weak value
    <b|m><m|a>/<b|a> has argument -Omega/2. Output lies in (-2 pi, 2 pi).
    """
    for s, name in ((a, "a"), (m, "m"), (b, "b")):
        if s.dim != 2:
            raise DimensionMismatchError(f"state {name} must be a qubit, got dim {s.dim}")
    pairs = (("a", "b", overlap(a, b)), ("b", "m", overlap(b, m)), ("m", "a", overlap(m, a)))
    for n1, n2, ov in pairs:
        if abs(ov) <= OVERLAP_ATOL:
            raise DegenerateTriangleError(f"states {n1} and {n2} are orthogonal")
    return -2.0 * arg(pairs[0][2] * pairs[1][2] * pairs[2][2])


def solid_angle_oosterom(a, b, c) -> float:
    """Signed solid angle of the spherical triangle with vertices a, b, c.

    tan(Omega/2) = a.(b x c) / (1 + a.b + b.c + c.a); matches
    :func:`solid_angle_bargmann` positionally (second qubit argument at the
    second vector slot). Antipodal configurations (both terms ~0) error out.
    """
    va, vb, vc = _unit3(a), _unit3(b), _unit3(c)
    num = float(np.dot(va, np.cross(vb, vc)))
    den = 1.0 + float(np.dot(va, vb)) + float(np.dot(vb, vc)) + float(np.dot(vc, va))
    if abs(num) < 1e-12 and abs(den) < 1e-12:
        raise DegenerateTriangleError("antipodal configuration: solid angle undefined")
    return 2.0 * math.atan2(num, den)


def star_angle(f1, f2) -> float:
    """Great-circle angle between two Bloch vectors, in degrees."""
    v1, v2 = _unit3(f1), _unit3(f2)
    return math.degrees(math.acos(min(1.0, max(-1.0, float(np.dot(v1, v2))))))


def octant_projection(s: PureState) -> np.ndarray:
    """Project a qutrit ray to the real octant point (|c1|, |c2|, |c0|)."""
    if s.dim != 3:
        raise DimensionMismatchError(f"octant projection needs dim 3, got {s.dim}")
    mags = np.abs(s.amps)
    out = np.array([mags[1], mags[2], mags[0]])
    out.setflags(write=False)
    return out


def fs_geodesic(s1: PureState, s2: PureState, samples: int) -> list[PureState]:
    """Sample the Fubini-Study geodesic from s1 to s2, endpoints included.

    s2 is phase-aligned so <s1|s2> is real positive, then
    gamma(t) = cos(t T) s1 + sin(t T) u with T = arccos|<s1|s2>| and u the
    normalized component of s2 orthogonal to s1. Every sample is canonicalized.
    """
    if s1.dim != s2.dim:
        raise DimensionMismatchError(f"state dims differ: {s1.dim} vs {s2.dim}")
    if samples < 2:
        raise ValidationError("need at least two samples")
    ov = overlap(s1, s2)
    if abs(ov) <= OVERLAP_ATOL:
        raise OrthogonalEndpointsError("endpoints are orthogonal; the geodesic is not unique")
    aligned = s2.amps * np.exp(-1j * arg(ov))
    cos_t = min(1.0, abs(ov))
    big_t = math.acos(cos_t)
    perp = aligned - cos_t * s1.amps
    pn = float(np.linalg.norm(perp))
    out = []
    for t in np.linspace(0.0, 1.0, samples):
        if pn < 1e-13:
            vec = s1.amps.copy()
        else:
            vec = math.cos(t * big_t) * s1.amps + math.sin(t * big_t) * (perp / pn)
        out.append(canonicalize(PureState.normalized(vec)))
    return out


@dataclass(frozen=True)
class ScenePoint:
    label: str
    xyz: np.ndarray


@dataclass(frozen=True)
class SceneArc:
    start: str
    end: str
    kind: str  # "great-circle" | "cp2-geodesic-projection"
    samples: np.ndarray  # (n, 3), unit rows


@dataclass(frozen=True)
class SceneTriangle:
    verts: tuple[str, str, str]
    omega: float


@dataclass(frozen=True)
class SceneGraph:
    points: tuple[ScenePoint, ...]
    arcs: tuple[SceneArc, ...]
    triangles: tuple[SceneTriangle, ...]
    caption: str

    def __post_init__(self):
        labels = {p.label for p in self.points}
        if len(labels) != len(self.points):
            raise ValidationError("scene point labels must be unique")
        for a in self.arcs:
            if a.start not in labels or a.end not in labels:
                raise ValidationError(f"arc references unknown label {a.start!r}/{a.end!r}")
            norms = np.linalg.norm(a.samples, axis=1)
            if float(np.max(np.abs(norms - 1.0))) > 1e-9:
                raise ValidationError("arc sample points must be unit vectors")
        for t in self.triangles:
            for v in t.verts:
                if v not in labels:
                    raise ValidationError(f"triangle references unknown label {v!r}")


def great_circle_arc(p, q, samples: int = 64) -> np.ndarray:
    """Unit-sphere arc from p to q along the shorter great circle.

    Near-antipodal endpoints (where the great circle is not unique) are routed
    through a deterministically chosen orthogonal midpoint.
    """
    vp, vq = _unit3(p), _unit3(q)
    dot = min(1.0, max(-1.0, float(np.dot(vp, vq))))
    omega = math.acos(dot)
    if math.sin(omega) < 1e-9:
        if dot > 0:  # coincident: constant arc
            out = np.tile(vp, (samples, 1))
            out.setflags(write=False)
            return out
        k = int(np.argmin(np.abs(vp)))
        mid = np.zeros(3)
        mid[k] = 1.0
        mid = mid - float(np.dot(vp, mid)) * vp
        mid /= float(np.linalg.norm(mid))
        half = (samples + 1) // 2
        first = great_circle_arc(vp, mid, half)
        second = great_circle_arc(mid, vq, samples - half + 1)
        out = np.vstack([first, second[1:]])
        out.setflags(write=False)
        return out
    ts = np.linspace(0.0, 1.0, samples)
    pts = (
        np.sin((1.0 - ts)[:, None] * omega) * vp[None, :]
        + np.sin(ts[:, None] * omega) * vq[None, :]
    ) / math.sin(omega)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    pts.setflags(write=False)
    return pts


def _coplanarity(vectors: list[np.ndarray]) -> float:
    """Smallest singular value of the stacked vectors; ~0 for a common great circle."""
    m = np.vstack(vectors)
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".6g")


def build_scene(
    decomp: ArgumentDecomposition, mapping: CoherentMapping, arc_samples: int = 64
) -> SceneGraph:
    """Scene with the mapped pre/effective stars, post-state stars, and the
    solid-angle triangles that carry the weak value's argument."""
    points = [
        ScenePoint("i", mapping.phi_i.bloch),
        ScenePoint("i'", mapping.phi_iprime.bloch),
    ]
    star_labels = []
    for j, star in enumerate(decomp.post_stars.stars):
        label = f"f{j + 1}"
        star_labels.append(label)
        points.append(ScenePoint(label, star.bloch))

    located = {p.label: p.xyz for p in points}
    arcs: dict[tuple[str, str], SceneArc] = {}

    def _add_arc(lab1: str, lab2: str) -> None:
        key = (lab1, lab2)
        if key not in arcs and (lab2, lab1) not in arcs:
            arcs[key] = SceneArc(
                start=lab1,
                end=lab2,
                kind="great-circle",
                samples=great_circle_arc(located[lab1], located[lab2], arc_samples),
            )

    triangles = []
    for label, omega in zip(star_labels, decomp.solid_angles):
        _add_arc("i", "i'")
        _add_arc("i'", label)
        _add_arc(label, "i")
        triangles.append(SceneTriangle(verts=("i", "i'", label), omega=omega))

    caption = (
        f"{len(star_labels)} solid angle(s); total arg {_fmt(decomp.total_arg)} rad, "
        f"direct arg {_fmt(decomp.direct_arg)} rad"
    )
    if _coplanarity([p.xyz for p in points]) < 0.05:
        caption += "; vectors nearly on one plane"
    if mapping.ill_conditioned:
        caption += "; coherent mapping ill-conditioned (perturbed effective state)"
    return SceneGraph(
        points=tuple(points), arcs=tuple(arcs.values()), triangles=tuple(triangles), caption=caption
    )


def build_octant_scene(
    labeled_states: list[tuple[str, PureState]], arc_samples: int = 64, caption: str = ""
) -> SceneGraph:
    """Octant projection of a qutrit state triple and of the Fubini-Study
    geodesics between consecutive pairs (closed into a triangle)."""
    if len(labeled_states) < 2:
        raise ValidationError("need at least two labeled states")
    points = [ScenePoint(label, octant_projection(s)) for label, s in labeled_states]
    arcs = []
    n = len(labeled_states)
    for i in range(n):
        l1, s1 = labeled_states[i]
        l2, s2 = labeled_states[(i + 1) % n]
        path = fs_geodesic(s1, s2, arc_samples)
        samples = np.vstack([octant_projection(s) for s in path])
        samples.setflags(write=False)
        arcs.append(SceneArc(start=l1, end=l2, kind="cp2-geodesic-projection", samples=samples))
    return SceneGraph(
        points=tuple(points),
        arcs=tuple(arcs),
        triangles=(),
        caption=caption or "octant projection of the geodesic triangle",
    )

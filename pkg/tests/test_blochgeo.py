import math

import numpy as np
import pytest
from conftest import random_state

from wvgeo.blochgeo import (
    SceneArc,
    SceneGraph,
    ScenePoint,
    SceneTriangle,
    build_octant_scene,
    build_scene,
    fs_geodesic,
    great_circle_arc,
    octant_projection,
    solid_angle_bargmann,
    solid_angle_oosterom,
    star_angle,
)
from wvgeo.errors import (
    DegenerateTriangleError,
    OrthogonalEndpointsError,
    ValidationError,
)
from wvgeo.experiments import spin1_decomposition
from wvgeo.majorana import decompose_with_mapping
from wvgeo.qstate import Observable, PureState, overlap

SQ6 = math.sqrt(6.0)


def _qubit(theta, phi):
    return PureState(np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]))


def _random_qubit(rng):
    return _qubit(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))


X = _qubit(math.pi / 2, 0.0)
Y = _qubit(math.pi / 2, math.pi / 2)
Z = _qubit(0.0, 0.0)


def test_solid_angle_trivial_and_octant():
    assert solid_angle_bargmann(X, X, X) == 0.0
    # octant: one eighth of the sphere
    omega = solid_angle_bargmann(Z, X, Y)
    assert abs(omega - math.pi / 2) < 1e-14
    assert abs(solid_angle_oosterom((0, 0, 1), (1, 0, 0), (0, 1, 0)) - math.pi / 2) < 1e-14
    assert solid_angle_oosterom((1, 0, 0), (1, 0, 0), (1, 0, 0)) == 0.0


def test_solid_angle_formula_agreement():
    rng = np.random.default_rng(3)
    for _ in range(500):
        a, m, b = (_random_qubit(rng) for _ in range(3))
        try:
            omega = solid_angle_bargmann(a, m, b)
        except DegenerateTriangleError:
            continue
        blochs = []
        for s in (a, m, b):
            v = np.array(
                [
                    2 * (s.amps[0].conjugate() * s.amps[1]).real,
                    2 * (s.amps[0].conjugate() * s.amps[1]).imag,
                    abs(s.amps[0]) ** 2 - abs(s.amps[1]) ** 2,
                ]
            )
            blochs.append(v)
        other = solid_angle_oosterom(*blochs)
        assert abs(omega - other) < 1e-10
        assert -2 * math.pi < omega < 2 * math.pi


def test_solid_angle_orientation_flip():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, m, b = (_random_qubit(rng) for _ in range(3))
        try:
            fwd = solid_angle_bargmann(a, m, b)
            rev = solid_angle_bargmann(b, m, a)
        except DegenerateTriangleError:
            continue
        assert abs(fwd + rev) < 1e-12
    v1, v2, v3 = (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)
    assert abs(solid_angle_oosterom(v1, v2, v3) + solid_angle_oosterom(v1, v3, v2)) < 1e-14


def test_solid_angle_degenerate_errors():
    e0 = PureState(np.array([1.0, 0.0]))
    e1 = PureState(np.array([0.0, 1.0]))
    with pytest.raises(DegenerateTriangleError) as err:
        solid_angle_bargmann(e0, X, e1)
    assert "orthogonal" in str(err.value)
    with pytest.raises(DegenerateTriangleError):
        solid_angle_oosterom((0, 0, 1), (0, 0, -1), (1, 0, 0))


def test_star_angle():
    assert star_angle((0, 0, 1), (0, 0, 1)) == 0.0
    assert abs(star_angle((0, 0, 1), (0, 0, -1)) - 180.0) < 1e-12
    assert abs(star_angle((1, 0, 0), (0, 1, 0)) - 90.0) < 1e-12
    assert star_angle((1, 0, 0), (0, 1, 0)) == star_angle((0, 1, 0), (1, 0, 0))
    rng = np.random.default_rng(7)
    for _ in range(50):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        v1 = rng.standard_normal(3)
        v1 /= np.linalg.norm(v1)
        v2 = rng.standard_normal(3)
        v2 /= np.linalg.norm(v2)
        assert abs(star_angle(v1, v2) - star_angle(q @ v1, q @ v2)) < 1e-10


def test_octant_projection():
    assert np.allclose(octant_projection(PureState(np.array([1.0, 0, 0]))), [0, 0, 1])
    for xi in (0.0, 0.8, 4.4):
        s = PureState(np.array([0.0, np.exp(1j * xi) / math.sqrt(2), 1 / math.sqrt(2)]))
        assert np.allclose(
            octant_projection(s), [1 / math.sqrt(2), 1 / math.sqrt(2), 0], atol=1e-15
        )
    s = PureState(np.array([2, 1, 1j]) / SQ6)
    assert np.allclose(octant_projection(s), np.array([1, 1, 2]) / SQ6, atol=1e-15)
    # componentwise phase changes leave the projection untouched (up to the
    # rounding of the rotated amplitudes themselves)
    phased = PureState(s.amps * np.exp(1j * np.array([0.3, 1.1, -2.0])))
    assert np.allclose(octant_projection(s), octant_projection(phased), rtol=0, atol=1e-15)


def test_fs_geodesic():
    rng = np.random.default_rng(9)
    for n in (2, 3, 4):
        s1, s2 = random_state(rng, n), random_state(rng, n)
        if abs(overlap(s1, s2)) < 1e-3:
            continue
        path = fs_geodesic(s1, s2, 33)
        assert len(path) == 33
        assert abs(abs(overlap(path[0], s1)) - 1.0) < 1e-12
        assert abs(abs(overlap(path[-1], s2)) - 1.0) < 1e-12
        big_t = math.acos(min(1.0, abs(overlap(s1, s2))))
        assert abs(abs(overlap(s1, path[16])) - math.cos(big_t / 2)) < 1e-12
        for p in path:
            assert abs(float(np.linalg.norm(p.amps)) - 1.0) < 1e-12

    e0 = PureState(np.array([1.0, 0.0]))
    e1 = PureState(np.array([0.0, 1.0]))
    with pytest.raises(OrthogonalEndpointsError):
        fs_geodesic(e0, e1, 8)


def test_great_circle_arc():
    p, q = np.array([0.0, 0, 1]), np.array([1.0, 0, 0])
    arc = great_circle_arc(p, q, 17)
    assert np.allclose(arc[0], p) and np.allclose(arc[-1], q)
    assert np.max(np.abs(np.linalg.norm(arc, axis=1) - 1.0)) < 1e-12
    # near-antipodal pairs are routed through a deterministic midpoint
    arc = great_circle_arc(np.array([0.0, 0, 1]), np.array([0.0, 0, -1]), 16)
    assert arc.shape[0] == 16
    assert np.max(np.abs(np.linalg.norm(arc, axis=1) - 1.0)) < 1e-9


def test_scene_graph_validation():
    pt = ScenePoint("a", np.array([0.0, 0, 1]))
    arc = SceneArc("a", "b", "great-circle", np.array([[0.0, 0, 1]]))
    with pytest.raises(ValidationError):
        SceneGraph(points=(pt,), arcs=(arc,), triangles=(), caption="")
    bad_arc = SceneArc("a", "a", "great-circle", np.array([[0.0, 0, 2]]))
    with pytest.raises(ValidationError):
        SceneGraph(points=(pt,), arcs=(bad_arc,), triangles=(), caption="")
    with pytest.raises(ValidationError):
        SceneGraph(
            points=(pt,), arcs=(), triangles=(SceneTriangle(("a", "a", "c"), 0.0),), caption=""
        )


def test_build_scene_cnot():
    gate = Observable(
        np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    )
    pre = PureState(np.array([1, -1j, 1, -1j]) / 2)
    post = PureState(np.array([1, 0, -2, 0]) / math.sqrt(5))
    decomp, mapping = decompose_with_mapping(gate, pre, post)
    scene = build_scene(decomp, mapping)
    assert len(scene.triangles) == 3
    assert {p.label for p in scene.points} == {"i", "i'", "f1", "f2", "f3"}
    for a in scene.arcs:
        assert a.kind == "great-circle"


def test_build_scene_degenerate_case():
    rng = np.random.default_rng(13)
    pre = random_state(rng, 3)
    proj = Observable(np.outer(pre.amps, pre.amps.conj()))
    decomp, mapping = decompose_with_mapping(proj, pre, pre)
    scene = build_scene(decomp, mapping)
    assert len(scene.triangles) == 2
    assert all(abs(t.omega) < 1e-10 for t in scene.triangles)


def test_build_scene_divergence_caption():
    # adjacent to the spin-1 divergence every vector sits near one plane
    decomp, mapping = spin1_decomposition(math.pi / 2, math.pi / 2 + 1e-6)
    scene = build_scene(decomp, mapping)
    assert "plane" in scene.caption
    far, far_map = spin1_decomposition(math.pi / 2 - 0.2, 2.09)
    assert "plane" not in build_scene(far, far_map).caption


def test_build_octant_scene():
    rng = np.random.default_rng(17)
    states = [("a", random_state(rng, 3)), ("b", random_state(rng, 3)), ("c", random_state(rng, 3))]
    scene = build_octant_scene(states, arc_samples=24)
    assert len(scene.arcs) == 3
    for a in scene.arcs:
        assert a.kind == "cp2-geodesic-projection"
        assert a.samples.shape == (24, 3)
        assert np.all(a.samples >= -1e-12)  # octant points are nonnegative

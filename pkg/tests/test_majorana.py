import cmath
import math

import numpy as np
import pytest
from conftest import random_hermitian, random_state

from wvgeo.errors import DegenerateStarTriangleError, ValidationError
from wvgeo.majorana import (
    MajoranaStar,
    StarSet,
    coherent_mapping,
    decompose_argument,
    decompose_reduced,
    decompose_with_mapping,
    majorana_polynomial,
    qutrit_explicit_mapping,
    qutrit_reduction,
    roots,
    stars_to_state,
    track_stars,
)
from wvgeo.qstate import (
    Observable,
    PureState,
    arg,
    canonicalize,
    expectation,
    overlap,
    principal_angle,
    spin1,
)
from wvgeo.weakval import effective_state, projector_weak_value, weak_value

SQ6 = math.sqrt(6.0)
CNOT = Observable(np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex))
CNOT_PRE = PureState(np.array([1, -1j, 1, -1j]) / 2)
CNOT_POST = PureState(np.array([1, 0, -2, 0]) / math.sqrt(5))


def _fidelity(a: PureState, b: PureState) -> float:
    return abs(np.vdot(a.amps, b.amps)) ** 2


def test_majorana_polynomial_examples():
    e0 = PureState(np.array([1.0, 0, 0]))
    assert np.allclose(majorana_polynomial(e0), [1, 0, 0])
    e2 = PureState(np.array([0.0, 0, 1]))
    assert np.allclose(majorana_polynomial(e2), [0, 0, 1])
    rng = np.random.default_rng(2)
    s = random_state(rng, 3)
    c0, c1, c2 = s.amps
    assert np.allclose(majorana_polynomial(s), [c0, -math.sqrt(2) * c1, c2], atol=1e-15)


def test_roots_examples():
    finite, inf = roots([1.0, 0.0, 0.0])
    assert inf == 0 and np.allclose(sorted(z.real for z in finite), [0, 0])
    finite, inf = roots([0.0, 0.0, 1.0])
    assert finite == [] and inf == 2
    finite, inf = roots([1.0, -(1 + 2j), 2j])
    assert inf == 0
    assert sorted(finite, key=abs)[0] == pytest.approx(1.0, abs=1e-13)
    assert sorted(finite, key=abs)[1] == pytest.approx(2j, abs=1e-13)
    with pytest.raises(ValidationError):
        roots([0.0, 0.0, 0.0])


def test_roots_residual_scaled():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 8))
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if rng.random() < 0.3:
            coeffs[0] = 0.0
        scale = float(np.max(np.abs(coeffs)))
        finite, inf = roots(coeffs)
        trimmed = np.trim_zeros(coeffs, "f")
        for z in finite:
            if abs(z) <= 1.0:
                residual = abs(np.polyval(trimmed, z))
            else:
                residual = abs(np.polyval(trimmed[::-1], 1.0 / z))
            assert residual < 1e-12 * scale


def test_root_to_star_examples():
    north = MajoranaStar.from_root(0.0)
    assert north.theta == 0.0 and np.allclose(north.bloch, [0, 0, 1])
    eq = MajoranaStar.from_root(1.0)
    assert abs(eq.theta - math.pi / 2) < 1e-15 and eq.phi == 0.0
    south = MajoranaStar.from_root(None)
    assert south.theta == math.pi and np.allclose(south.bloch, [0, 0, -1])


def test_star_invariants():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = complex(rng.standard_normal(), rng.standard_normal())
        star = MajoranaStar.from_root(z)
        expected_qubit = np.array(
            [math.cos(star.theta / 2), cmath.exp(1j * star.phi) * math.sin(star.theta / 2)]
        )
        assert np.max(np.abs(star.qubit - expected_qubit)) < 1e-12
        expected_bloch = [
            math.sin(star.theta) * math.cos(star.phi),
            math.sin(star.theta) * math.sin(star.phi),
            math.cos(star.theta),
        ]
        assert np.max(np.abs(star.bloch - expected_bloch)) < 1e-12
        assert 0.0 <= star.phi < 2 * math.pi


def test_stars_to_state_examples():
    north = MajoranaStar.from_angles(0.0, 0.0)
    south = MajoranaStar.from_angles(math.pi, 0.0)
    assert np.allclose(stars_to_state([north, north]).amps, [1, 0, 0], atol=1e-15)
    assert np.allclose(stars_to_state([north, south]).amps, [0, 1, 0], atol=1e-15)


def test_round_trip_property():
    rng = np.random.default_rng(7)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if rng.random() < 0.25:
            vec[0] = 0.0
        if rng.random() < 0.25:
            vec[-1] = 0.0
        if np.linalg.norm(vec) < 1e-6:
            continue
        s = PureState.normalized(vec)
        ss = StarSet.from_state(s)
        assert len(ss.stars) == n - 1
        assert _fidelity(ss.to_state(), s) > 1 - 1e-10


def test_star_set_ordering_and_clusters():
    s = PureState(np.array([0.5, 0.0, math.sqrt(0.75)]))
    ss = StarSet.from_state(s)
    thetas = [st.theta for st in ss.stars]
    assert thetas == sorted(thetas)
    # (1,0,0) has a double root at 0
    clusters = StarSet.from_state(PureState(np.array([1.0, 0, 0]))).clustered_roots()
    assert clusters == [(0j, 2)]
    # (0,0,1) has two roots at infinity
    clusters = StarSet.from_state(PureState(np.array([0.0, 0, 1]))).clustered_roots()
    assert clusters == [(None, 2)]


def test_track_stars_examples():
    s = StarSet.from_state(PureState(np.array([0.3, 0.4, 0.5, math.sqrt(0.5)])))
    tracked = track_stars(s, s)
    assert all(a is b for a, b in zip(tracked.stars, s.stars))

    swapped = StarSet(dim=s.dim, stars=s.stars[::-1], roots=s.roots[::-1])
    recovered = track_stars(s, swapped)
    for a, b in zip(recovered.stars, s.stars):
        assert abs(a.theta - b.theta) < 1e-12 and abs(a.phi - b.phi) < 1e-12


def test_coherent_mapping_trivial():
    e0 = PureState(np.array([1.0, 0, 0]))
    cm = coherent_mapping(e0, e0)
    assert np.allclose(cm.u1.mat, np.eye(3), atol=1e-14)
    assert np.allclose(cm.u2.mat, np.eye(3), atol=1e-14)
    assert cm.phi_i.theta == 0.0 and cm.phi_iprime.theta == 0.0


def test_coherent_mapping_spin1_constants():
    pre = PureState(np.array([2, 1, 1j]) / SQ6)
    eff = effective_state(spin1((0.0, 0.0, 1.0)), pre)
    for mapping_fn in (coherent_mapping, qutrit_explicit_mapping):
        cm = mapping_fn(pre, eff)
        mapped_eff = canonicalize(PureState(cm.u2.mat @ (cm.u1.mat @ eff.amps)))
        expected = np.array(
            [
                math.sqrt(3.0 / 10.0),
                math.sqrt(-3.0 / 5.0 + math.sqrt(6.0 / 5.0)),
                1.0 - math.sqrt(3.0 / 10.0),
            ]
        )
        assert np.max(np.abs(mapped_eff.amps - expected)) < 1e-12
        expected_qubit = np.array(
            [(3.0 / 10.0) ** 0.25, math.sqrt(1.0 - math.sqrt(3.0 / 10.0))]
        )
        assert np.max(np.abs(cm.phi_iprime.qubit - expected_qubit)) < 1e-12


def test_coherent_mapping_invariants():
    # Star positions of an (N-1)-fold degenerate state are conditioned as
    # eps^(1/(N-1)), so the coincidence check runs on star positions for
    # N <= 3 (double roots) and on the fidelity to the analytic coherent
    # state (machine-exact for every N) above that.
    rng = np.random.default_rng(11)
    for _ in range(150):
        n = int(rng.integers(2, 7))
        pre, eff = random_state(rng, n), random_state(rng, n)
        cm = coherent_mapping(pre, eff)
        u = cm.u2.mat @ cm.u1.mat
        image = u @ pre.amps
        assert abs(abs(image[0]) - 1.0) < 1e-10
        assert np.max(np.abs(image[1:])) < 1e-10
        mapped_eff = u @ eff.amps
        if n <= 3:
            stars = StarSet.from_state(PureState.normalized(mapped_eff)).stars
            for a in stars:
                for b in stars:
                    gap = math.acos(min(1.0, max(-1.0, float(np.dot(a.bloch, b.bloch)))))
                    assert gap < 1e-6
        target = stars_to_state([cm.phi_iprime] * (n - 1))
        assert abs(np.vdot(target.amps, mapped_eff)) ** 2 > 1 - 1e-10


def _explicit_u2(psi_ip: np.ndarray) -> np.ndarray:
    # independent oracle: the parametrized 1-2 block rotation
    c0, c1, c2 = psi_ip
    theta = math.acos(min(1.0, abs(c0)))
    eps = math.atan2(abs(c2), abs(c1))
    chi1 = math.atan2(c1.imag, c1.real)
    chi2 = math.atan2(c2.imag, c2.real)
    a = -eps + math.asin(min(1.0, math.tan(theta / 2)))
    e1, e2 = cmath.exp(-1j * chi1), cmath.exp(-1j * chi2)
    return np.array(
        [
            [1, 0, 0],
            [0, e1 * math.cos(a), -e2 * math.sin(a)],
            [0, e1 * math.sin(a), e2 * math.cos(a)],
        ],
        dtype=complex,
    )


def test_generic_u2_agrees_with_parametrized_matrix_on_image():
    rng = np.random.default_rng(13)
    for _ in range(100):
        pre, eff = random_state(rng, 3), random_state(rng, 3)
        if abs(overlap(pre, eff)) < 1e-3:
            continue
        cm = coherent_mapping(pre, eff)
        psi_ip = canonicalize(PureState(cm.u1.mat @ eff.amps)).amps
        if abs(psi_ip[1]) < 1e-8 or abs(psi_ip[2]) < 1e-8:
            continue  # parametrization degenerate; skip
        image_generic = cm.u2.mat @ psi_ip
        image_explicit = _explicit_u2(psi_ip) @ psi_ip
        fid = abs(np.vdot(image_generic, image_explicit))
        assert fid > 1 - 1e-10


def test_decompose_trivial_projector():
    rng = np.random.default_rng(17)
    pre = random_state(rng, 3)
    proj = Observable(np.outer(pre.amps, pre.amps.conj()))
    d = decompose_argument(proj, pre, pre)
    assert all(abs(w - 1.0) < 1e-10 for w in d.qubit_wvs)
    assert all(abs(o) < 1e-10 for o in d.solid_angles)
    assert abs(d.total_arg) < 1e-10
    assert d.arg_expA == 0.0


def test_decompose_cnot():
    d = decompose_argument(CNOT, CNOT_PRE, CNOT_POST)
    assert len(d.solid_angles) == 3
    direct = math.atan2(-2.0, -1.0)
    assert abs(principal_angle(d.total_arg - direct)) < 1e-9
    assert abs(d.direct_arg - direct) < 1e-13
    # modulus identity: |A_w| = <A^2>/|<A>| * prod |qubit wvs|
    wv = weak_value(CNOT, CNOT_PRE, CNOT_POST)
    prod = float(np.prod([abs(w) for w in d.qubit_wvs]))
    assert abs(wv.exp_A2 / abs(wv.exp_A) * prod - wv.modulus) < 1e-9 * wv.modulus

    reduced, _ = decompose_reduced(CNOT, CNOT_PRE, CNOT_POST)
    assert len(reduced.solid_angles) == 2
    assert abs(principal_angle(reduced.total_arg - d.total_arg)) < 1e-9


def test_decompose_identity_property():
    rng = np.random.default_rng(19)
    checked = 0
    while checked < 300:
        n = int(rng.integers(2, 7))
        a = random_hermitian(rng, n)
        pre, post = random_state(rng, n), random_state(rng, n)
        if abs(expectation(a, pre)) <= 0.05 or abs(overlap(post, pre)) <= 0.05:
            continue
        d = decompose_argument(a, pre, post)
        assert abs(principal_angle(d.total_arg - d.direct_arg)) < 1e-9
        assert all(abs(o + 2.0 * arg(w)) < 1e-12 for o, w in zip(d.solid_angles, d.qubit_wvs))
        wv = weak_value(a, pre, post)
        prod = float(np.prod([abs(w) for w in d.qubit_wvs]))
        assert abs(wv.exp_A2 / abs(wv.exp_A) * prod - wv.modulus) < 1e-9 * max(1.0, wv.modulus)
        checked += 1


def test_degenerate_star_triangle_partial():
    # A post-state built so one mapped star is orthogonal to the pre-state star
    # while <post|pre> stays just above the orthogonality cutoff.
    eff = effective_state(CNOT, CNOT_PRE)
    cm = coherent_mapping(CNOT_PRE, eff)
    u = cm.u2.mat @ cm.u1.mat
    target = np.array([8e-13, 1 / math.sqrt(3), 0, 0], dtype=complex)
    target /= np.linalg.norm(target)
    post = PureState(u.conj().T @ target)
    assert abs(overlap(post, CNOT_PRE)) > 1e-12
    with pytest.raises(DegenerateStarTriangleError) as err:
        decompose_argument(CNOT, CNOT_PRE, post)
    partial = err.value.partial
    assert math.isnan(partial.total_arg)
    assert sum(1 for o in partial.solid_angles if math.isnan(o)) == 1
    assert sum(1 for o in partial.solid_angles if not math.isnan(o)) == 2


def test_qutrit_reduction_passthrough():
    rng = np.random.default_rng(23)
    pre, eff, post = (random_state(rng, 3) for _ in range(3))
    p3, e3, f3, frame = qutrit_reduction(pre, eff, post)
    assert np.allclose(p3.amps, pre.amps) and np.allclose(f3.amps, post.amps)
    assert np.allclose(np.vstack(frame), np.eye(3))


def test_qutrit_reduction_qubit_padding():
    rng = np.random.default_rng(29)
    pre, eff, post = (random_state(rng, 2) for _ in range(3))
    p3, e3, f3, frame = qutrit_reduction(pre, eff, post)
    assert p3.dim == 3 and p3.amps[2] == 0
    assert abs(overlap(p3, f3) - overlap(pre, post)) < 1e-15


def test_qutrit_reduction_preserves_overlaps_and_weak_values():
    rng = np.random.default_rng(31)
    checked = 0
    while checked < 100:
        n = int(rng.integers(4, 7))
        a = random_hermitian(rng, n)
        pre, post = random_state(rng, n), random_state(rng, n)
        if abs(expectation(a, pre)) <= 0.05 or abs(overlap(post, pre)) <= 0.05:
            continue
        wv = weak_value(a, pre, post)
        eff = wv.effective_state
        p3, e3, f3, _ = qutrit_reduction(pre, eff, post)
        for (x, y), (x3, y3) in (
            ((pre, eff), (p3, e3)),
            ((pre, post), (p3, f3)),
            ((eff, post), (e3, f3)),
        ):
            assert abs(overlap(x, y) - overlap(x3, y3)) < 1e-12
        reduced_value = wv.prop_const * projector_weak_value(p3, e3, f3)
        assert abs(reduced_value - wv.value) < 1e-10 * max(1.0, abs(wv.value))
        checked += 1


def test_qutrit_reduction_rank_deficient():
    pre = PureState(np.array([1.0, 0, 0, 0]))
    eff = PureState(np.array([0.0, 1.0, 0, 0]))
    p3, e3, f3, frame = qutrit_reduction(pre, eff, pre)
    assert np.max(np.abs(frame[2])) == 0.0  # third direction padded
    assert abs(overlap(p3, f3) - 1.0) < 1e-14


def test_cnot_reduction_consistency():
    eff = effective_state(CNOT, CNOT_PRE)
    p3, e3, f3, _ = qutrit_reduction(CNOT_PRE, eff, CNOT_POST)
    original = projector_weak_value(CNOT_PRE, eff, CNOT_POST)
    reduced = projector_weak_value(p3, e3, f3)
    assert abs(original - reduced) < 1e-12

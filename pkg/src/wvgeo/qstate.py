"""Pure states, Hermitian observables and unitary maps on small N-level systems.

All values are immutable after construction (arrays are marked read-only) and
every operation is a pure function of its inputs, so everything here is safe
to share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonHermitianError,
    NonRealExpectationError,
    NonUnitaryError,
    ValidationError,
    ZeroStateError,
)

UNIT_NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-10
UNITARY_ATOL = 1e-12
ZERO_AMP_ATOL = 1e-12

# Below this gap between phase-aligned src and dst the reflection direction is
# numerically meaningless; fall back to the phase-matched identity.
_RAY_EQUAL_TOL = 1e-8

TWO_PI = 2.0 * math.pi


def arg(z: complex) -> float:
    """Argument of a complex number in (-pi, pi]; arg(0) is defined as 0."""
    z = complex(z)
    if z == 0:
        return 0.0
    a = math.atan2(z.imag, z.real)
    return math.pi if a == -math.pi else a


def principal_angle(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    y = math.remainder(x, TWO_PI)
    return math.pi if y <= -math.pi else y


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState:
    """Unit vector of complex amplitudes."""

    amps: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amps, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("state amplitudes must form a nonempty 1-D vector")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValidationError("state amplitudes must be finite")
        norm_sq = float(np.real(np.vdot(arr, arr)))
        if abs(norm_sq - 1.0) > UNIT_NORM_ATOL:
            raise ValidationError(
                f"state is not normalized: sum of |amps|^2 deviates from 1 by {norm_sq - 1.0:.3e}"
            )
        object.__setattr__(self, "amps", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @classmethod
    def normalized(cls, vec) -> "PureState":
        """Build a state from any nonzero vector by normalizing it."""
        arr = np.asarray(vec, dtype=complex)
        n = float(np.linalg.norm(arr))
        if n == 0.0 or not math.isfinite(n):
            raise ZeroStateError("cannot normalize a zero (or non-finite) vector")
        return cls(arr / n)


@dataclass(frozen=True)
class SphericalParam:
    """Canonical qutrit ray coordinates (theta in [0, pi/2], phases in radians)."""

    theta: float
    epsilon: float
    chi1: float
    chi2: float

    def __post_init__(self):
        vals = (self.theta, self.epsilon, self.chi1, self.chi2)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("spherical parameters must be finite")
        if not -1e-12 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValidationError(f"theta must lie in [0, pi/2], got {self.theta!r}")


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix acting on an N-level system."""

    mat: np.ndarray

    def __post_init__(self):
        arr = np.array(self.mat, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError("observable must be a square matrix")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValidationError("observable entries must be finite")
        residue = float(np.max(np.abs(arr - arr.conj().T)))
        if residue > HERMITIAN_ATOL:
            raise NonHermitianError(f"matrix deviates from Hermitian by {residue:.3e}")
        object.__setattr__(self, "mat", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class UnitaryOp:
    """Unitary matrix acting on an N-level system."""

    mat: np.ndarray

    def __post_init__(self):
        arr = np.array(self.mat, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError("unitary must be a square matrix")
        residue = float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))))
        if residue > UNITARY_ATOL:
            raise NonUnitaryError(f"matrix deviates from unitary by {residue:.3e}")
        object.__setattr__(self, "mat", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def apply(self, s: PureState) -> PureState:
        if self.dim != s.dim:
            raise DimensionMismatchError(f"unitary dim {self.dim} vs state dim {s.dim}")
        return PureState(self.mat @ s.amps)


def from_spherical(p: SphericalParam) -> PureState:
    """Qutrit state (cos t, e^{i chi1} cos e sin t, e^{i chi2} sin e sin t)."""
    st = math.sin(p.theta)
    amps = np.array(
        [
            math.cos(p.theta),
            cmath.exp(1j * p.chi1) * math.cos(p.epsilon) * st,
            cmath.exp(1j * p.chi2) * math.sin(p.epsilon) * st,
        ]
    )
    return PureState(amps)


def canonicalize(s: PureState, atol: float = ZERO_AMP_ATOL) -> PureState:
    """Strip the global phase so the first nonzero amplitude is real and >= 0.

    The returned state is on the same ray. Raises ZeroStateError when no
    amplitude exceeds ``atol`` (impossible for a valid unit state).
    """
    mags = np.abs(s.amps)
    pivots = np.flatnonzero(mags > atol)
    if pivots.size == 0:
        raise ZeroStateError("all amplitudes are numerically zero")
    k = int(pivots[0])
    phase = s.amps[k] / mags[k]
    out = s.amps * phase.conjugate()
    out[k] = mags[k]  # pin the pivot exactly on the positive real axis
    return PureState(out)


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product <a|b> with conjugation on ``a``."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"state dims differ: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def expectation(A: Observable, s: PureState, imag_atol: float = 1e-12) -> float:
    """Real expectation value <s|A|s>; the tiny imaginary residue is checked then dropped."""
    if A.dim != s.dim:
        raise DimensionMismatchError(f"observable dim {A.dim} vs state dim {s.dim}")
    v = complex(np.vdot(s.amps, A.mat @ s.amps))
    if abs(v.imag) > imag_atol:
        raise NonRealExpectationError(
            f"expectation has imaginary residue {v.imag:.3e} above {imag_atol:.1e}"
        )
    return v.real


def mapping_unitary(src: PureState, dst: PureState) -> UnitaryOp:
    """Unitary sending ``src`` exactly to ``dst``.

    Built as the phased Householder reflection
    ``e^{-i g} (I - 2 |d><d|)`` with ``g = arg<dst|src>`` and
    ``|d> ~ e^{-i g}|src> - |dst>``. When the phase-aligned states coincide
    within 1e-8 the reflection direction is pure noise and the phase-matched
    identity is returned instead (the residual is then bounded by that gap).
    """
    if src.dim != dst.dim:
        raise DimensionMismatchError(f"state dims differ: {src.dim} vs {dst.dim}")
    c = complex(np.vdot(dst.amps, src.amps))
    phase = cmath.exp(-1j * arg(c))
    delta = phase * src.amps - dst.amps
    gap = float(np.linalg.norm(delta))
    n = src.dim
    if gap < _RAY_EQUAL_TOL:
        u = phase * np.eye(n, dtype=complex)
    else:
        d_hat = delta / gap
        u = phase * (np.eye(n, dtype=complex) - 2.0 * np.outer(d_hat, d_hat.conj()))
    return UnitaryOp(u)


def _gell_mann() -> tuple[np.ndarray, ...]:
    l1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    l2 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
    l3 = np.array([[1, 0, 0], [0, -1, 0], [0, 0, 0]], dtype=complex)
    l4 = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex)
    l5 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex)
    l6 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
    l7 = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex)
    l8 = np.array([[1, 0, 0], [0, 1, 0], [0, 0, -2]], dtype=complex) / math.sqrt(3)
    return tuple(_readonly(m) for m in (l1, l2, l3, l4, l5, l6, l7, l8))


#: The eight traceless Hermitian SU(3) generators, Tr(g_a g_b) = 2 delta_ab.
GELL_MANN: tuple[np.ndarray, ...] = _gell_mann()


def gell_mann_expand(A: Observable) -> tuple[float, np.ndarray]:
    """Coefficients (a_I, a_1..a_8) with A = a_I I + sum_a a_a g_a."""
    if A.dim != 3:
        raise DimensionMismatchError(f"Gell-Mann expansion needs dim 3, got {A.dim}")
    a_i = float(np.trace(A.mat).real) / 3.0
    coeffs = np.array([float(np.trace(A.mat @ g).real) / 2.0 for g in GELL_MANN])
    return a_i, _readonly(coeffs)


def gell_mann_reconstruct(a_i: float, coeffs) -> Observable:
    """Inverse of :func:`gell_mann_expand`."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (8,):
        raise ValidationError("expected 8 Gell-Mann coefficients")
    mat = a_i * np.eye(3, dtype=complex)
    for c, g in zip(coeffs, GELL_MANN):
        mat = mat + c * g
    return Observable(mat)


_SPIN_X = _readonly((GELL_MANN[0] + GELL_MANN[5]) / math.sqrt(2))
_SPIN_Y = _readonly((GELL_MANN[1] + GELL_MANN[6]) / math.sqrt(2))
_SPIN_Z = _readonly((GELL_MANN[2] + math.sqrt(3) * GELL_MANN[7]) / 2.0)


def spin1(axis) -> Observable:
    """Spin-1 operator n_x S_x + n_y S_y + n_z S_z along a unit axis (hbar = 1)."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValidationError("axis must be a 3-vector")
    if abs(float(np.linalg.norm(n)) - 1.0) > 1e-12:
        raise ValidationError("axis must be a unit vector")
    return Observable(n[0] * _SPIN_X + n[1] * _SPIN_Y + n[2] * _SPIN_Z)

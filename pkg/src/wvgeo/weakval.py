"""Weak values, the effective-projector factorization, and Bargmann invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NilImageError,
    NonConvergentError,
    OrthogonalPrePostError,
    ValidationError,
    VanishingExpectationError,
    VanishingOverlapError,
)
from .qstate import Observable, PureState, arg, canonicalize, expectation, overlap, principal_angle

ORTHOGONALITY_ATOL = 1e-12
NIL_IMAGE_ATOL = 1e-12
# Looser than machine precision: the proportionality constant amplifies noise
# as 1/<A> near a vanishing expectation.
VANISHING_EXPECTATION_ATOL = 1e-10
DEFAULT_EPS_SCHEDULE = (1e-3, 1e-4, 1e-5)
CONVERGENCE_ATOL = 1e-6


@dataclass(frozen=True)
class WeakValueResult:
    """Weak value together with the scalars of its effective-projector split.

    ``prop_const`` is None when <A> vanishes (the split is undefined) and
    ``effective_state`` is None when <A^2> vanishes (the weak value is 0).
    """

    value: complex
    modulus: float
    argument: float
    exp_A: float
    exp_A2: float
    prop_const: Optional[float]
    effective_state: Optional[PureState]


@dataclass(frozen=True)
class BargmannInvariant:
    order: int
    value: complex


def _check_dims(A: Observable, pre: PureState, post: PureState) -> None:
    if not (A.dim == pre.dim == post.dim):
        raise DimensionMismatchError(
            f"dims differ: observable {A.dim}, pre {pre.dim}, post {post.dim}"
        )


def effective_state(A: Observable, pre: PureState) -> PureState:
    """Normalized image A|pre>, canonicalized; the ray of the effective projector."""
    if A.dim != pre.dim:
        raise DimensionMismatchError(f"observable dim {A.dim} vs state dim {pre.dim}")
    image = A.mat @ pre.amps
    exp_a2 = float(np.real(np.vdot(image, image)))
    if exp_a2 <= NIL_IMAGE_ATOL:
        raise NilImageError("observable annihilates the pre-selected state")
    return canonicalize(PureState(image / math.sqrt(exp_a2)))


def weak_value(
    A: Observable,
    pre: PureState,
    post: PureState,
    orthogonality_atol: float | None = None,
) -> WeakValueResult:
    """<post|A|pre> / <post|pre> with the effective-projector bookkeeping.

    Only exact-zero protection is applied to the denominator: near-orthogonal
    pairs still produce (huge) values, which is the regime of interest.
    """
    if orthogonality_atol is None:
        orthogonality_atol = ORTHOGONALITY_ATOL
    _check_dims(A, pre, post)
    ov = overlap(post, pre)
    if abs(ov) <= orthogonality_atol:
        raise OrthogonalPrePostError(
            f"|<post|pre>| = {abs(ov):.3e} is below {orthogonality_atol:.1e}"
        )
    image = A.mat @ pre.amps
    value = complex(np.vdot(post.amps, image)) / ov
    exp_a = expectation(A, pre)
    exp_a2 = float(np.real(np.vdot(image, image)))
    eff = None
    if exp_a2 > NIL_IMAGE_ATOL:
        eff = canonicalize(PureState(image / math.sqrt(exp_a2)))
    prop = exp_a2 / exp_a if abs(exp_a) > VANISHING_EXPECTATION_ATOL else None
    return WeakValueResult(
        value=value,
        modulus=abs(value),
        argument=arg(value),
        exp_A=exp_a,
        exp_A2=exp_a2,
        prop_const=prop,
        effective_state=eff,
    )


def projector_weak_value(pre: PureState, mid: PureState, post: PureState) -> complex:
    """Weak value <post|mid><mid|pre>/<post|pre> of the projector onto ``mid``."""
    ov = overlap(post, pre)
    if abs(ov) <= ORTHOGONALITY_ATOL:
        raise OrthogonalPrePostError("pre and post are orthogonal")
    return overlap(post, mid) * overlap(mid, pre) / ov


def proportional_decomposition(
    A: Observable, pre: PureState, post: PureState
) -> tuple[float, complex]:
    """Split A_w into a real constant <A^2>/<A> times a projector weak value."""
    _check_dims(A, pre, post)
    exp_a = expectation(A, pre)
    if abs(exp_a) <= VANISHING_EXPECTATION_ATOL:
        raise VanishingExpectationError(
            f"|<A>| = {abs(exp_a):.3e}; use epsilon_limit_argument instead"
        )
    eff = effective_state(A, pre)
    image = A.mat @ pre.amps
    exp_a2 = float(np.real(np.vdot(image, image)))
    return exp_a2 / exp_a, projector_weak_value(pre, eff, post)


def epsilon_limit_argument(
    A: Observable,
    pre: PureState,
    post: PureState,
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
    return_table: bool = False,
):
    """Argument of A_w when <A> vanishes, via perturbed pre-states.

    For each eps the pre-state is nudged to ``normalize(pre + eps A pre)``,
    where the proportional split is defined again; the argument estimates are
    Richardson-extrapolated to eps -> 0 (last two entries of the schedule).
    The direct formula arg<post|A|pre> - arg<post|pre> anchors convergence:
    the extrapolants must settle on it within 1e-6 or NonConvergentError is
    raised. With ``return_table`` the per-eps estimates are returned as well.
    """
    _check_dims(A, pre, post)
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 2 or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValidationError("eps schedule must be at least two descending positive values")
    image = A.mat @ pre.amps
    exp_a2 = float(np.real(np.vdot(image, image)))
    if exp_a2 <= NIL_IMAGE_ATOL:
        raise NilImageError("observable annihilates the pre-selected state")
    ov = overlap(post, pre)
    if abs(ov) <= ORTHOGONALITY_ATOL:
        raise OrthogonalPrePostError("pre and post are orthogonal")

    direct = principal_angle(arg(complex(np.vdot(post.amps, image))) - arg(ov))

    table = []
    for e in eps:
        pre_e = PureState.normalized(pre.amps + e * image)
        prop_e, pw_e = proportional_decomposition(A, pre_e, post)
        shift = 0.0 if prop_e >= 0 else math.pi
        table.append((e, principal_angle(arg(pw_e) + shift)))

    # Extrapolate the (small) deviations from the direct value; this keeps the
    # arithmetic free of branch-cut wraps.
    rel = [principal_angle(est - direct) for _, est in table]
    extrapolants = []
    for k in range(1, len(eps)):
        e1, e2 = eps[k - 1], eps[k]
        extrapolants.append((e1 * rel[k] - e2 * rel[k - 1]) / (e1 - e2))
    if len(extrapolants) >= 2 and abs(extrapolants[-1] - extrapolants[-2]) > CONVERGENCE_ATOL:
        raise NonConvergentError(
            f"extrapolants differ by {abs(extrapolants[-1] - extrapolants[-2]):.3e}"
        )
    if abs(extrapolants[-1]) > CONVERGENCE_ATOL:
        raise NonConvergentError(
            f"limit deviates from the direct argument by {abs(extrapolants[-1]):.3e}"
        )
    limit = principal_angle(direct + extrapolants[-1])
    if return_table:
        return limit, table
    return limit


def bargmann3(s1: PureState, s2: PureState, s3: PureState) -> BargmannInvariant:
    """Third-order Bargmann invariant <s1|s2><s2|s3><s3|s1>.

    The three overlaps are multiplied in a sorted order so cyclic calls
    return bit-identical values.
    """
    factors = sorted(
        (overlap(s1, s2), overlap(s2, s3), overlap(s3, s1)),
        key=lambda z: (z.real, z.imag),
    )
    return BargmannInvariant(order=3, value=factors[0] * factors[1] * factors[2])


def bargmann_n_arg_reduction(
    states: Sequence[PureState], overlap_atol: float = ORTHOGONALITY_ATOL
) -> tuple[float, list[float]]:
    """Argument of the order-n invariant and its n-2 third-order pieces.

    Returns ``(total_arg, third_order_args)`` where the total is the argument
    of the cyclic overlap product over all n states and entry k is the
    argument of the invariant of (s1, s_{k+2}, s_{k+3}); the two agree modulo
    2 pi whenever every consecutive and fan overlap is nonzero.
    """
    n = len(states)
    if n < 3:
        raise ValidationError("need at least three states")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatchError("states must share one dimension")

    def _checked(i: int, j: int) -> complex:
        ov = overlap(states[i], states[j])
        if abs(ov) <= overlap_atol:
            raise VanishingOverlapError(f"overlap of states {i + 1} and {j + 1} vanishes")
        return ov

    cycle = complex(1.0)
    for k in range(n):
        cycle *= _checked(k, (k + 1) % n)
    for k in range(2, n - 1):
        _checked(0, k)  # fan overlaps must be nonzero for the reduction
    thirds = [
        arg(bargmann3(states[0], states[k], states[k + 1]).value) for k in range(1, n - 1)
    ]
    return arg(cycle), thirds

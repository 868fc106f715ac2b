"""Weak values of N-level observables and their Bloch-sphere geometry."""

from . import blochgeo, cli, experiments, majorana, qstate, serialize, weakval
from .errors import WvgeoError
from .majorana import (
    ArgumentDecomposition,
    CoherentMapping,
    MajoranaStar,
    StarSet,
    coherent_mapping,
    decompose_argument,
    qutrit_reduction,
    stars_to_state,
    track_stars,
)
from .qstate import (
    GELL_MANN,
    Observable,
    PureState,
    SphericalParam,
    UnitaryOp,
    canonicalize,
    expectation,
    from_spherical,
    gell_mann_expand,
    mapping_unitary,
    overlap,
    spin1,
)
from .weakval import (
    BargmannInvariant,
    WeakValueResult,
    bargmann3,
    bargmann_n_arg_reduction,
    effective_state,
    epsilon_limit_argument,
    proportional_decomposition,
    weak_value,
)

__version__ = "0.1.0"

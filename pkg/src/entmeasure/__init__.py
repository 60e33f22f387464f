"""Entanglement measure of pure quantum states.

Quantifies how entangled a pure state is by the squared distance J from the
state to the nearest product state. For a bipartite split J = 1 - lambda with
lambda the top eigenvalue of the coefficient Gram matrix; for N parts the
nearest rank-1 tensor is found by alternating maximization and J = 1 - gamma^2
with gamma the best product overlap. Includes a Dirac-ket expression parser
and a CLI.
"""

__version__ = "0.1.0"

from .bipartite import (
    BipartiteReport,
    HermitianMatrix,
    bipartite_measure,
    gram,
    jacobi_eigen,
    power_iterate,
    verify_stationarity,
)
from .errors import (
    DimensionMismatchError,
    InvalidSplitError,
    KetSyntaxError,
    MixedAlphabetError,
    MixedLabelLengthError,
    NoConvergenceError,
    NotAPermutationError,
    StateFormatError,
    UnknownNameError,
    UnsupportedShapeError,
    ZeroContractionError,
    ZeroStateError,
)
from .ketparse import evaluate, format_state, parse, parse_state
from .multipartite import (
    MultipartiteReport,
    als_measure,
    brute_force_product_search,
    cyclic_update,
    product_overlap,
)
from .states import (
    CoefficientMatrix,
    Dims,
    LocalUnitary,
    PureState,
    apply_local_unitary,
    dumps_state,
    load_state,
    loads_state,
    make_named_state,
    make_perm_phase_state,
    normalize,
    random_state,
    random_unitary,
    reshape_bipartite,
    s2,
    save_state,
    state_from_bipartite,
    state_from_document,
    state_to_document,
    tensor_product,
)

__all__ = [
    "__version__",
    "BipartiteReport",
    "CoefficientMatrix",
    "Dims",
    "HermitianMatrix",
    "LocalUnitary",
    "MultipartiteReport",
    "PureState",
    "als_measure",
    "apply_local_unitary",
    "bipartite_measure",
    "brute_force_product_search",
    "cyclic_update",
    "dumps_state",
    "evaluate",
    "format_state",
    "gram",
    "jacobi_eigen",
    "load_state",
    "loads_state",
    "make_named_state",
    "make_perm_phase_state",
    "normalize",
    "parse",
    "parse_state",
    "power_iterate",
    "product_overlap",
    "random_state",
    "random_unitary",
    "reshape_bipartite",
    "s2",
    "save_state",
    "state_from_bipartite",
    "state_from_document",
    "state_to_document",
    "tensor_product",
    "verify_stationarity",
    "DimensionMismatchError",
    "InvalidSplitError",
    "KetSyntaxError",
    "MixedAlphabetError",
    "MixedLabelLengthError",
    "NoConvergenceError",
    "NotAPermutationError",
    "StateFormatError",
    "UnknownNameError",
    "UnsupportedShapeError",
    "ZeroContractionError",
    "ZeroStateError",
]

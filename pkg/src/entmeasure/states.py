"""Pure-state representation, reshaping, canonical families, and state-file I/O.

Amplitudes are stored as a flat complex128 vector in row-major order over the
subsystem dimensions, with subsystem 0 as the slowest index. That convention
is fixed here and used by every other module.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidSplitError,
    NotAPermutationError,
    StateFormatError,
    UnknownNameError,
    ZeroStateError,
)

NORM_TOL = 1e-12


def _abs2_terms(values: np.ndarray):
    """Per-entry |z|^2 terms, computed the same way everywhere so that sums
    over relabeled copies of the same entries agree exactly."""
    flat = np.asarray(values).reshape(-1)
    return flat.real * flat.real + flat.imag * flat.imag


def _exact_abs2_sum(values: np.ndarray) -> float:
    # math.fsum is correctly rounded, hence independent of summation order.
    return math.fsum(_abs2_terms(values))


@dataclass(frozen=True)
class Dims:
    """Ordered subsystem dimensions; every entry must be an integer >= 2."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValueError("at least one subsystem is required")
        if any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, index: int) -> int:
        return self.dims[index]


def _as_dims(dims) -> Dims:
    return dims if isinstance(dims, Dims) else Dims(tuple(dims))


@dataclass(frozen=True)
class PureState:
    """A pure quantum state: subsystem dimensions plus a flat amplitude vector."""

    dims: Dims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != dims.total_dim:
            raise DimensionMismatchError(
                f"expected {dims.total_dim} amplitudes for dims {dims.dims}, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amplitudes.reshape(self.dims.dims)

    @property
    def norm_squared(self) -> float:
        return _exact_abs2_sum(self.amplitudes)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared - 1.0) <= tol


@dataclass(frozen=True)
class CoefficientMatrix:
    """State amplitudes arranged with one subsystem group indexing rows and
    the complementary group indexing columns."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise DimensionMismatchError("coefficient matrix must be 2-dimensional")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class LocalUnitary:
    """A unitary acting on a single subsystem."""

    target: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError("local unitary must be a square matrix")
        gram = matrix.conj().T @ matrix
        if np.max(np.abs(gram - np.eye(matrix.shape[0]))) > 1e-12:
            raise ValueError("matrix is not unitary within 1e-12")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


def normalize(state: PureState) -> PureState:
    """Scale the state by a positive real so its squared norm is 1.

    A state already normalized within NORM_TOL is returned unchanged, so
    normalizing twice is bit-exact."""
    nsq = state.norm_squared
    if nsq == 0.0:
        raise ZeroStateError("cannot normalize the zero state")
    if abs(nsq - 1.0) <= NORM_TOL:
        return state
    return PureState(state.dims, state.amplitudes * (1.0 / math.sqrt(nsq)))


def s2(matrix) -> float:
    """Sum of squared entry moduli, Tr(B^dagger B). Accepts a CoefficientMatrix
    or a plain array."""
    entries = matrix.entries if isinstance(matrix, CoefficientMatrix) else np.asarray(matrix)
    return _exact_abs2_sum(entries)


def _validated_split(n_subsystems: int, left_group) -> tuple[list[int], list[int]]:
    left = sorted({int(i) for i in left_group})
    if any(i < 0 or i >= n_subsystems for i in left):
        raise InvalidSplitError(
            f"split indices {left} out of range for {n_subsystems} subsystems"
        )
    if not left:
        raise InvalidSplitError("left group must not be empty")
    if len(left) == n_subsystems:
        raise InvalidSplitError("left group must not cover every subsystem")
    right = [i for i in range(n_subsystems) if i not in left]
    return left, right


def reshape_bipartite(state: PureState, left_group) -> CoefficientMatrix:
    """Relabel the amplitude tensor as a matrix: rows run over `left_group`
    (ascending subsystem order), columns over the complement. No arithmetic
    is performed, so s2 of the result equals the state's squared norm."""
    left, right = _validated_split(len(state.dims), left_group)
    rows = math.prod(state.dims[i] for i in left)
    cols = math.prod(state.dims[i] for i in right)
    matrix = np.transpose(state.tensor, left + right).reshape(rows, cols)
    return CoefficientMatrix(matrix)


def state_from_bipartite(matrix: CoefficientMatrix, dims, left_group) -> PureState:
    """Inverse of reshape_bipartite: rebuild the flat amplitude vector."""
    dims = _as_dims(dims)
    left, right = _validated_split(len(dims), left_group)
    shape = [dims[i] for i in left] + [dims[i] for i in right]
    if matrix.entries.size != dims.total_dim:
        raise DimensionMismatchError("matrix size does not match dims")
    perm = left + right
    inverse = [0] * len(perm)
    for position, axis in enumerate(perm):
        inverse[axis] = position
    tensor = np.transpose(matrix.entries.reshape(shape), inverse)
    return PureState(dims, tensor.reshape(-1))


def make_perm_phase_state(n: int, perm, phases) -> PureState:
    """Two-subsystem state on dims [n, n] whose coefficient matrix has a single
    entry e^{i phi_jk}/sqrt(n) per row, at column perm[j]. Its Gram matrix is
    identity/n for every permutation and phase choice."""
    if n < 2:
        raise ValueError("n must be >= 2")
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise NotAPermutationError(f"{perm} is not a permutation of 0..{n - 1}")
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (n, n):
        raise DimensionMismatchError(f"phases must have shape ({n}, {n})")
    matrix = np.zeros((n, n), dtype=np.complex128)
    root = 1.0 / math.sqrt(n)
    for j in range(n):
        k = perm[j]
        matrix[j, k] = root * np.exp(1j * phases[j, k])
    return PureState(Dims((n, n)), matrix.reshape(-1))


_NAMED_WITH_SIZE = re.compile(r"^([a-z_]+)\((\d+)\)$")


def make_named_state(name: str, n: int | None = None) -> PureState:
    """Canonical qubit states: bell_singlet, bell_phi_plus, ghz(N), w(N)."""
    match = _NAMED_WITH_SIZE.match(name.strip())
    if match:
        if n is not None:
            raise ValueError("pass the size either inline or as n, not both")
        name, n = match.group(1), int(match.group(2))
    name = name.strip()
    if name == "bell_singlet":
        root = 1.0 / math.sqrt(2)
        return PureState(Dims((2, 2)), [0.0, root, -root, 0.0])
    if name == "bell_phi_plus":
        root = 1.0 / math.sqrt(2)
        return PureState(Dims((2, 2)), [root, 0.0, 0.0, root])
    if name in ("ghz", "w"):
        n = 3 if n is None else int(n)
        if n < 3:
            raise ValueError(f"{name} requires at least 3 qubits, got {n}")
        amps = np.zeros(2**n, dtype=np.complex128)
        if name == "ghz":
            amps[0] = amps[-1] = 1.0 / math.sqrt(2)
        else:
            for k in range(n):
                amps[1 << k] = 1.0 / math.sqrt(n)
        return PureState(Dims((2,) * n), amps)
    raise UnknownNameError(f"unknown state name {name!r}")


def random_state(dims, seed: int) -> PureState:
    """Normalized state with i.i.d. complex-Gaussian amplitudes; deterministic
    for a given seed."""
    dims = _as_dims(dims)
    rng = np.random.default_rng(seed)
    total = dims.total_dim
    amps = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return normalize(PureState(dims, amps))


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random dim x dim unitary. `seed` may be an int or a Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def apply_local_unitary(state: PureState, u: LocalUnitary) -> PureState:
    """Contract the unitary with the target subsystem index."""
    if u.target < 0 or u.target >= len(state.dims):
        raise DimensionMismatchError(f"no subsystem {u.target} in dims {state.dims.dims}")
    if u.matrix.shape[0] != state.dims[u.target]:
        raise DimensionMismatchError(
            f"unitary of size {u.matrix.shape[0]} does not fit subsystem of "
            f"dimension {state.dims[u.target]}"
        )
    rotated = np.tensordot(u.matrix, state.tensor, axes=(1, u.target))
    rotated = np.moveaxis(rotated, 0, u.target)
    return PureState(state.dims, rotated.reshape(-1))


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Outer product; dims concatenate and norms multiply."""
    return PureState(Dims(a.dims.dims + b.dims.dims), np.kron(a.amplitudes, b.amplitudes))


# -- state file format --------------------------------------------------------
#
# A state document is a JSON object {"dims": [...], "amplitudes": [[re, im], ...]}
# with amplitudes row-major over dims. Floats round-trip at full double precision.


def state_to_document(state: PureState) -> dict:
    return {
        "dims": list(state.dims.dims),
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }


def state_from_document(document) -> PureState:
    if not isinstance(document, dict):
        raise StateFormatError("state document must be an object")
    if set(document) != {"dims", "amplitudes"}:
        raise StateFormatError("state document needs exactly the fields dims and amplitudes")
    dims = document["dims"]
    amps = document["amplitudes"]
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise StateFormatError("dims must be an array of integers")
    if not isinstance(amps, list):
        raise StateFormatError("amplitudes must be an array of [re, im] pairs")
    values = np.empty(len(amps), dtype=np.complex128)
    for index, pair in enumerate(amps):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise StateFormatError(f"amplitude {index} is not a [re, im] number pair")
        values[index] = complex(pair[0], pair[1])
    try:
        dims = Dims(tuple(dims))
    except ValueError as exc:
        raise StateFormatError(str(exc)) from exc
    if values.size != dims.total_dim:
        raise StateFormatError(
            f"expected {dims.total_dim} amplitudes for dims {dims.dims}, got {values.size}"
        )
    return PureState(dims, values)


def dumps_state(state: PureState) -> str:
    return json.dumps(state_to_document(state))


def loads_state(text: str) -> PureState:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"not valid JSON: {exc}") from exc
    return state_from_document(document)


def save_state(state: PureState, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_state(state))
        handle.write("\n")


def load_state(path) -> PureState:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_state(handle.read())

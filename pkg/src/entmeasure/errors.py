"""Exception types shared across the package."""


class ZeroStateError(ValueError):
    """The state has zero norm and the requested operation needs a direction."""


class InvalidSplitError(ValueError):
    """The bipartite split is empty, covers every subsystem, or is out of range."""


class NotAPermutationError(ValueError):
    """The supplied index sequence is not a bijection of {0..n-1}."""


class UnknownNameError(ValueError):
    """No canonical state is registered under the requested name."""


class DimensionMismatchError(ValueError):
    """An operand's shape does not match the subsystem it targets."""


class StateFormatError(ValueError):
    """A state document violates the dims/amplitudes file schema."""


class UnsupportedShapeError(ValueError):
    """The operation is only defined for small qubit registers."""


class NoConvergenceError(RuntimeError):
    """An iterative eigensolver ran out of sweeps or iterations."""


class ZeroContractionError(RuntimeError):
    """A partial contraction vanished; the current factors need a fresh restart."""


class KetSyntaxError(ValueError):
    """Malformed ket expression text. `offset` points inside the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class MixedLabelLengthError(KetSyntaxError):
    """Ket labels within one expression disagree on subsystem count."""


class MixedAlphabetError(KetSyntaxError):
    """A label position mixes digit and +/- symbols across kets."""

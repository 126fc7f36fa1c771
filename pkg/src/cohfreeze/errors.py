"""Exception types. Every error carries a stable ``name`` used by the CLI."""


class CoherenceError(ValueError):
    """Base class for validation failures."""

    @property
    def name(self) -> str:
        return type(self).__name__


class NotHermitian(CoherenceError):
    pass


class NotUnitary(CoherenceError):
    pass


class NotPSD(CoherenceError):
    pass


class NotDensityMatrix(CoherenceError):
    pass


class NotPermutation(CoherenceError):
    pass


class DimMismatch(CoherenceError):
    pass


class OutOfRange(CoherenceError):
    pass


class SamplingExhausted(CoherenceError):
    pass


class NotGeneralizedPermutation(CoherenceError):
    def __init__(self, index: int, axis: str, line: int):
        self.index = index
        self.axis = axis
        self.line = line
        super().__init__(
            f"Kraus operator {index} has two or more nonzeros in {axis} {line}"
        )


class NotComplete(CoherenceError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"||sum K^dag K - I||_max = {residual:.3e}")


class EmptyKraus(CoherenceError):
    pass


class NotProbabilityVector(CoherenceError):
    pass


class DimTooLarge(CoherenceError):
    pass


class NotXState(CoherenceError):
    pass


class HypothesisNotMet(CoherenceError):
    pass


class TheoremViolation(RuntimeError):
    """Structural verdict and operational verdict disagree.

    ``witness`` is a JSON-serializable dict holding everything needed to
    reproduce the disagreement.
    """

    def __init__(self, message: str, witness: dict):
        self.witness = witness
        super().__init__(message)

    @property
    def name(self) -> str:
        return "TheoremViolation"

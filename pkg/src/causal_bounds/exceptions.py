class CausalBoundsError(Exception):
    """Base class for every error raised by causal_bounds."""


class InvalidRecord(CausalBoundsError, ValueError):
    pass


class ParseError(CausalBoundsError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class EmptyArm(CausalBoundsError, ValueError):
    def __init__(self, z: int):
        self.z = z
        super().__init__(f"no records with z={z}")


class InvalidDistribution(CausalBoundsError, ValueError):
    pass


class InvalidModel(CausalBoundsError, ValueError):
    pass


class InadmissibleModel(InvalidModel):
    """
    The model breaks the exclusion restriction beyond tolerance, so the
    bound theorems do not apply to it.
    """

    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(
            f"exclusion restriction violated: deviation {deviation:.3e} > {tol:.1e}"
        )


class DimMismatch(CausalBoundsError, ValueError):
    pass


class NotHermitian(CausalBoundsError, ValueError):
    pass


class InvalidOperator(CausalBoundsError, ValueError):
    pass


class UsageError(CausalBoundsError):
    pass

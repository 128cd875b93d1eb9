from typing import Optional


class LtiocoError(Exception):
    """Base class for every error raised by the toolkit."""


class ModelSyntaxError(LtiocoError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ModelSemanticError(LtiocoError):
    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class NotComposable(LtiocoError):
    pass


class UnknownClock(LtiocoError):
    pass


class EmptyZone(LtiocoError):
    pass


class ClockMismatch(LtiocoError):
    pass


class DiagonalConstraint(LtiocoError):
    pass


class InvalidCeiling(LtiocoError):
    pass


class UnknownLabel(LtiocoError):
    pass


class AlphabetMismatch(LtiocoError):
    pass


class StrictConstraintRejected(LtiocoError):
    pass


class ExplorationLimitExceeded(LtiocoError):
    pass

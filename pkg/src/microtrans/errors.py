"""Exception types shared across the toolkit."""


class MicrotransError(Exception):
    """Base class for all toolkit errors."""


class TableFormatError(MicrotransError):
    """A substitution table violates its structural invariants."""


class CorpusFormatError(MicrotransError):
    """A corpus file cannot be parsed; message carries the line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ModelFormatError(MicrotransError):
    """A model file is corrupt; message carries the failing byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"at byte {offset}: {message}"
        super().__init__(message)
        self.offset = offset


class TrainingDiverged(MicrotransError):
    """Training produced a non-finite loss."""

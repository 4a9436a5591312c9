"""Exception types raised across vatkit."""

from __future__ import annotations


class VatkitError(ValueError):
    """Base class for invalid inputs and failed preconditions."""


class ParseError(VatkitError):
    """Malformed input file. ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, path=None, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"row {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class TsneError(VatkitError):
    """t-SNE failure; ``iteration`` is set when optimization diverged."""

    def __init__(self, message: str, iteration: int | None = None):
        self.iteration = iteration
        super().__init__(message)


class PipelineError(VatkitError):
    """A pipeline stage failed; wraps the module error with the stage name."""

    def __init__(self, stage: str, detail: Exception | str):
        self.stage = stage
        self.detail = detail
        super().__init__(f"stage '{stage}' failed: {detail}")

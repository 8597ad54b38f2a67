"""Exception types shared across the package."""


class RangeError(ValueError):
    """A mutation profile leaves [0, 1] somewhere on the opinion interval."""


class DomainError(ValueError):
    """An opinion argument lies outside [0, 1]."""


class ParamError(ValueError):
    """A structural parameter (sizes, rates, bounds) is invalid."""


class ShapeError(ValueError):
    """Two histograms or densities have incompatible bin counts."""


class ParseError(ValueError):
    """Malformed text input; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SweepError(RuntimeError):
    """A sweep task failed; carries the task's grid coordinates."""

    def __init__(self, message: str, replicate_index: int, d_index: int):
        super().__init__(
            f"task (replicate={replicate_index}, d_index={d_index}): {message}"
        )
        self.replicate_index = replicate_index
        self.d_index = d_index

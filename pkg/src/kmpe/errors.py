"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class SingularSystemError(ArithmeticError):
    """A linear system could not be solved because its matrix is singular."""

    def __init__(self, rank, size, message=None):
        self.rank = rank
        self.size = size
        if message is None:
            message = (f"singular system: effective rank {rank} < {size} "
                       f"(rank deficiency {size - rank})")
        super().__init__(message)


class DivergenceError(ArithmeticError):
    """An iterative solver produced a non-finite objective."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite loss at iteration {iteration}")


class DegenerateWeightsError(ValueError):
    """All sample weights vanished, so a weighted statistic is undefined."""


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

from typing import Any, Optional


class CommunityDetectionError(Exception):
    """Base class for every error raised by the library."""


class InvalidArgumentError(CommunityDetectionError, ValueError):
    """Raised when a caller passes an argument outside the documented domain."""


class GraphParseError(InvalidArgumentError):
    """Raised when an edge list cannot be parsed."""

    line: int

    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DegenerateWalkError(InvalidArgumentError):
    """Raised when a graph cannot carry the community walk (isolated node, all-zero row)."""

    node: Optional[int]

    def __init__(self, message: str, *, node: Optional[int] = None) -> None:
        super().__init__(message)
        self.node = node


class ReducibleChainError(CommunityDetectionError):
    """Raised when a chain has a state that cannot reach another."""

    source: Any
    target: Any

    def __init__(self, *, source: Any, target: Any) -> None:
        super().__init__(
            f"Chain is reducible: state {target!r} is unreachable from state {source!r}."
        )
        self.source = source
        self.target = target


class NumericalError(CommunityDetectionError, ArithmeticError):
    """Raised when a linear solve is singular or its residual is out of tolerance."""


class NotCoalescedError(CommunityDetectionError):
    """Raised when a coupling run hits its depth cap before coalescing."""

    depth: int

    def __init__(self, message: str = "Coupling did not coalesce.", *, depth: int) -> None:
        super().__init__(f"{message} (depth {depth})")
        self.depth = depth

"""
dirac-kit exception hierarchy.

Exit codes used by the command line:
    InputError -> 2, RankError -> 3. Check failures are not exceptions.
"""

from typing import Optional, Sequence


class DiracKitError(Exception):
    """Base class for all dirac-kit errors"""

    exit_code = 1


class InputError(DiracKitError):
    """Unusable input: bad config, unknown name, malformed chart, bad parameter"""

    exit_code = 2


class ExpressionError(InputError):
    """Expression text that does not parse or refers to unknown names"""

    def __init__(self, message: str, source: str = "", offset: int = 0):
        self.source = source
        self.offset = offset
        if source:
            message = f"{message} at offset {offset} in {source!r}"
        super().__init__(message)


class ChartMismatchError(InputError):
    """Two fields that must share a chart do not"""


class DimensionError(InputError):
    """Vectors, forms or maps with incompatible dimensions"""


class InadmissibleError(DiracKitError):
    """A function or action that does not meet an operation's precondition"""


class JetOrderError(DiracKitError):
    """A derivative was requested beyond the order a jet carries"""


class RankError(DiracKitError):
    """Sampled rank is not constant, or a rank hypothesis fails"""

    exit_code = 3

    def __init__(self, message: str, stage: str = "",
                 points: Optional[Sequence[Sequence[float]]] = None):
        self.stage = stage
        self.points = [list(map(float, p)) for p in (points or [])]
        if stage:
            message = f"[{stage}] {message}"
        super().__init__(message)

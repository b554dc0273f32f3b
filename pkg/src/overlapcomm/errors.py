"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class OverlapCommError(Exception):
    exit_code = 1


class InvalidInputError(OverlapCommError, ValueError):
    exit_code = 2


class InvalidParamsError(OverlapCommError, ValueError):
    exit_code = 4


class BudgetExceededError(OverlapCommError, RuntimeError):
    exit_code = 5


class GenerationInfeasibleError(OverlapCommError, RuntimeError):
    exit_code = 6


class FormatError(OverlapCommError, ValueError):
    """Malformed graph, truth or config file."""

    exit_code = 3

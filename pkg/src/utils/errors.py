"""
Error hierarchy shared by the library, the harness and the CLI
"""


class HboaError(Exception):
    """Base class for every error raised on purpose by this package"""

    exit_code = 1


class InvalidInputError(HboaError, ValueError):
    """Arguments violate an operation's preconditions"""

    exit_code = 2


class InvalidStateError(HboaError, RuntimeError):
    """An object is in a state the operation cannot work with"""


class ConfigurationError(HboaError):
    """Run or experiment configuration is infeasible"""

    exit_code = 3


class OracleRefusalError(HboaError):
    """Exact optimum requested beyond the oracle's size cap"""

    exit_code = 4


class UnsolvableAtCapError(HboaError):
    """Bisection doubled past the population cap without 10/10 success"""

    exit_code = 3


class ParseError(HboaError, ValueError):
    """
    Malformed instance, model, bias or config file

    Args:
        message: What went wrong
        path: File being parsed (optional)
        line: 1-based line number of the offending line (optional)
    """

    exit_code = 2

    def __init__(self, message, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ''
        if self.path is not None:
            where = self.path
        if line is not None:
            where = f'{where}:{line}' if where else f'line {line}'
        super().__init__(f'{where}: {message}' if where else message)


class VersionError(ParseError):
    """File header declares an unsupported format version"""


class IllegalSplitError(InvalidInputError):
    """Split would repeat a path variable, use the target, or close a cycle"""

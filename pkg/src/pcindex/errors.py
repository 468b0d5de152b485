"""Exception hierarchy shared by all modules.

Each error carries an ``exit_code`` used by the command line front end:
2 for malformed input, 3 for mathematically inadmissible input and 4 for
numerical failures.
"""


class PCIndexError(Exception):
    exit_code = 4

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update({k: v for k, v in self.details.items() if _jsonable(v)})
        return out


def _jsonable(v):
    return isinstance(v, (str, int, float, bool, list, tuple, type(None)))


class InputError(PCIndexError):
    """Malformed input or violated precondition."""
    exit_code = 2


class DomainError(PCIndexError):
    """Input is well formed but outside the mathematical domain."""
    exit_code = 3


class Singular(DomainError):
    pass


class BranchOnBoundary(DomainError):
    pass


class ResonantData(DomainError):
    pass


class NonDiagonalizableSum(DomainError):
    pass


class FuchsViolation(DomainError):
    pass


class NotFuchsianAt(DomainError):
    pass


class ColocatedSingularities(InputError):
    pass


class GeometryFailure(InputError):
    pass


class NumericalError(PCIndexError):
    exit_code = 4


class NonConvergence(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class NotConstant(NumericalError):
    pass


class AmbiguousPairing(NumericalError):
    pass

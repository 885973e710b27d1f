"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line layer can map
failures without a lookup table: 2 input error, 3 solver error, 4 optimizer
non-convergence, 5 fit failure.
"""


class PurcellKitError(Exception):
    exit_code = 1


class InputError(PurcellKitError, ValueError):
    exit_code = 2


class SolverError(PurcellKitError, ArithmeticError):
    exit_code = 3


class OptimizerError(PurcellKitError, RuntimeError):
    exit_code = 4


class FitError(PurcellKitError, RuntimeError):
    exit_code = 5


# circuit core
class InvalidNetlist(InputError):
    pass


class PortCountMismatch(InputError):
    pass


class SingularSystem(SolverError):
    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


# analytic models
class ZeroDetuning(InputError):
    pass


class PoleDetuning(InputError):
    pass


class StraddlePole(InputError):
    pass


class UnsolvableSign(InputError):
    pass


class NegativeRealAdmittance(SolverError):
    pass


class DivisionByZero(InputError, ZeroDivisionError):
    pass


class NonConvergence(OptimizerError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


# filter design
class RetuneFailure(NonConvergence):
    pass


class BracketFailure(NonConvergence):
    pass


class ValidityCeiling(NonConvergence):
    pass


class NoInteriorMinimum(InputError):
    pass


class DuplicateFrequency(InputError):
    pass


# spectroscopy
class FitDiverged(FitError):
    pass


class InsufficientSpan(FitError):
    pass

"""Exception types raised by the estimator and its diagnostics."""


class NumericOverflowError(ArithmeticError):
    """An exponential factor left the range of double precision.

    Raised instead of silently returning ``inf`` whenever ``1/phi_k`` or
    one of the edge integrals blows up (tiny bandwidths, huge noise).
    """

    def __init__(self, exponent, message=None):
        self.exponent = float(exponent)
        if message is None:
            message = f"exp({self.exponent:.6g}) overflows double precision"
        super().__init__(message)


class DegenerateScaleError(ValueError):
    """The self-normalising scale s_n is zero."""


class ConfigError(ValueError):
    """A study or CLI configuration failed validation.

    ``problems`` lists every violation as ``"path: message"``.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))

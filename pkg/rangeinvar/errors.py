# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function


__all__ = [
    'AdmissibilityError',
    'CoefficientError',
    'ConfigurationError',
    'DenominatorError',
    'DimensionError',
    'ExpressionError',
    'NumericError',
    'RangeInvarError',
    'ResonanceError',
    'SolvabilityError',
]


class RangeInvarError(Exception):

    """
    Base class of every error raised by rangeinvar
    """

    pass


class DimensionError(RangeInvarError, ValueError):

    """
    An exception when a vector or matrix does not match the space it is used in
    """

    pass


class NumericError(RangeInvarError, ValueError):

    """
    An exception when an input or a computed value is not finite
    """

    pass


class ConfigurationError(RangeInvarError, ValueError):

    """
    An exception when a grid partition, a named segment, a configuration file
    or an audit requirement (such as a known truth) is invalid
    """

    pass


class CoefficientError(RangeInvarError, ValueError):

    """
    An exception when a coefficient that must be positive is not
    """

    pass


class AdmissibilityError(RangeInvarError, ValueError):

    """
    An exception when a parameter lies outside the admissible set
    """

    pass


class SolvabilityError(RangeInvarError):

    """
    An exception when a discrete forward problem is singular or cannot be
    solved to the required residual, i.e. the parameter left the domain D(F)
    of the forward operator
    """

    pass


class ResonanceError(SolvabilityError):

    """
    An exception when a spectral shift is too close to a generalized
    eigenvalue of the unshifted operator
    """

    pass


class DenominatorError(RangeInvarError):

    """
    An exception when a state used as a denominator by an r-map comes too
    close to zero
    """

    pass


class ExpressionError(RangeInvarError, ValueError):

    """
    An exception when a coefficient expression can not be parsed or evaluated
    """

    offset = None

    def __init__(self, message, offset=None):
        """
        :param message:
            A unicode string of the error description

        :param offset:
            None or an integer byte offset into the expression source
        """

        if offset is not None:
            message = '%s (at offset %d)' % (message, offset)
        RangeInvarError.__init__(self, message)
        self.offset = offset

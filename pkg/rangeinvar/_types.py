# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import inspect
import numbers

import numpy as np

from ._errors import pretty_message
from .errors import DimensionError, NumericError


__all__ = [
    'as_vector',
    'int_types',
    'is_real',
    'real_types',
    'str_cls',
    'type_name',
]


str_cls = str
int_types = (int, np.integer)
real_types = (numbers.Real, np.floating, np.integer)


def type_name(value):
    """
    Returns a user-readable name for the type of an object

    :param value:
        A value to get the type name of

    :return:
        A unicode string of the object's type name
    """

    if inspect.isclass(value):
        cls = value
    else:
        cls = value.__class__
    if cls.__module__ in set(['builtins', '__builtin__']):
        return cls.__name__
    return '%s.%s' % (cls.__module__, cls.__name__)


def is_real(value):
    """
    :param value:
        Any object

    :return:
        A bool if the value is a real scalar (bools excluded)
    """

    return isinstance(value, real_types) and not isinstance(value, bool)


def as_vector(value, name, length=None):
    """
    Converts an array-like value into a finite, one-dimensional float array

    :param value:
        A list, tuple or numpy array of real numbers

    :param name:
        A unicode string of the parameter name, used in error messages

    :param length:
        None, or the integer length the vector must have

    :raises:
        TypeError - when value is not array-like
        rangeinvar.errors.DimensionError - when the length does not match
        rangeinvar.errors.NumericError - when an entry is not finite

    :return:
        A new numpy.ndarray of dtype float64
    """

    if not isinstance(value, (list, tuple, np.ndarray)):
        raise TypeError(pretty_message(
            '''
            %s must be a list, tuple or numpy array, not %s
            ''',
            name,
            type_name(value)
        ))

    vector = np.array(value, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionError(pretty_message(
            '''
            %s must be one-dimensional - has %d dimensions
            ''',
            name,
            vector.ndim
        ))

    if length is not None and vector.shape[0] != length:
        raise DimensionError(pretty_message(
            '''
            %s must have length %d - has length %d
            ''',
            name,
            length,
            vector.shape[0]
        ))

    if not np.all(np.isfinite(vector)):
        raise NumericError(pretty_message(
            '''
            %s contains non-finite entries
            ''',
            name
        ))

    return vector

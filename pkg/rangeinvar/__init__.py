# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

from .version import __version__, __version_info__


__all__ = [
    '__version__',
    '__version_info__',
    'load_order',
]


def load_order():
    """
    Returns a list of the module and sub-module names for rangeinvar in
    dependency load order, for the sake of live reloading code

    :return:
        A list of unicode strings of module names, as they would appear in
        sys.modules, ordered by which module should be reloaded first
    """

    return [
        'rangeinvar._errors',
        'rangeinvar.errors',
        'rangeinvar._types',
        'rangeinvar.version',
        'rangeinvar',
        'rangeinvar.numerics',
        'rangeinvar.pde',
        'rangeinvar._expr',
        'rangeinvar._problem',
        'rangeinvar._potential',
        'rangeinvar._robin',
        'rangeinvar._diffabs',
        'rangeinvar._model',
        'rangeinvar.problems',
        'rangeinvar.solvers',
        'rangeinvar.verify',
        'rangeinvar.cli',
        'rangeinvar.__main__',
    ]

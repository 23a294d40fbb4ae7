# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import importlib.util
import os
import sys
import unittest


__version__ = '0.9.0'
__version_info__ = (0, 9, 0)


_rangeinvar_module = None


def local_rangeinvar():
    """
    Make sure the rangeinvar package from the source checkout is used, if
    the tests are being run from one

    :return:
        The rangeinvar module
    """

    global _rangeinvar_module

    if _rangeinvar_module:
        return _rangeinvar_module

    tests_dir = os.path.dirname(os.path.abspath(__file__))

    # If we are in a source checkout, load the local rangeinvar package.
    # Otherwise do a normal import.
    if os.path.basename(tests_dir) == 'tests':
        _rangeinvar_module = _import_from(
            'rangeinvar',
            os.path.abspath(os.path.join(tests_dir, '..'))
        )
    if _rangeinvar_module is None:
        import rangeinvar as _rangeinvar_module

    return _rangeinvar_module


def _import_from(mod, path, mod_dir=None):
    """
    Imports a package from a specific path

    :param mod:
        A unicode string of the module name

    :param path:
        A unicode string to the directory containing the package

    :param mod_dir:
        If the sub directory of "path" is different than the "mod" name,
        pass the sub directory as a unicode string

    :return:
        None if not loaded, otherwise the module
    """

    if mod in sys.modules:
        return sys.modules[mod]

    if mod_dir is None:
        mod_dir = mod

    init_path = os.path.join(path, mod_dir, '__init__.py')
    if not os.path.exists(init_path):
        return None

    try:
        spec = importlib.util.spec_from_file_location(mod, init_path)
        module = importlib.util.module_from_spec(spec)
        sys.modules[mod] = module
        spec.loader.exec_module(module)
        return module
    except ImportError:
        sys.modules.pop(mod, None)
        return None


def make_suite():
    """
    Constructs a unittest.TestSuite() of all tests for the package. For use
    with setuptools.

    :return:
        A unittest.TestSuite() object
    """

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for test_class in test_classes():
        tests = loader.loadTestsFromTestCase(test_class)
        suite.addTests(tests)
    return suite


def test_classes():
    """
    Returns a list of unittest.TestCase classes for the package

    :return:
        A list of unittest.TestCase classes
    """

    rangeinvar = local_rangeinvar()

    if rangeinvar.__version__ != __version__:
        raise AssertionError(
            ('rangeinvar_tests version %s can not be run with ' % __version__) +
            ('rangeinvar version %s' % rangeinvar.__version__)
        )

    from .test_errors import ErrorsTests
    from .test_numerics import NumericsTests
    from .test_pde import PdeTests
    from .test_expr import ExprTests
    from .test_problems import ProblemsTests
    from .test_solvers import SolversTests
    from .test_verify import VerifyTests
    from .test_cli import CliTests
    from .test_init import InitTests

    return [
        ErrorsTests,
        NumericsTests,
        PdeTests,
        ExprTests,
        ProblemsTests,
        SolversTests,
        VerifyTests,
        CliTests,
        InitTests,
    ]

# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import importlib.util
import os
import sys

from . import package_root


def _import_from(mod, path, mod_dir=None, allow_error=False):
    """
    Imports a module from a specific path

    :param mod:
        A unicode string of the module name

    :param path:
        A unicode string to the directory containing the module

    :param mod_dir:
        If the sub directory of "path" is different than the "mod" name,
        pass the sub directory as a unicode string

    :param allow_error:
        If an ImportError should be raised when the module can't be imported

    :return:
        None if not loaded, otherwise the module
    """

    if mod in sys.modules:
        return sys.modules[mod]

    if mod_dir is None:
        mod_dir = mod.replace('.', os.sep)

    if not os.path.exists(path):
        return None

    full_path = os.path.join(path, mod_dir, '__init__.py')
    if not os.path.exists(full_path):
        full_path = os.path.join(path, mod_dir + '.py')
        if not os.path.exists(full_path):
            return None

    try:
        spec = importlib.util.spec_from_file_location(mod, full_path)
        module = importlib.util.module_from_spec(spec)
        sys.modules[mod] = module
        spec.loader.exec_module(module)
        return module
    except ImportError:
        sys.modules.pop(mod, None)
        if allow_error:
            raise
        return None


def _preload(print_info):
    """
    Preloads rangeinvar from the local source checkout, or from a normal
    install, and prints the versions of the numeric stack

    :param print_info:
        A bool if info about the environment should be printed
    """

    if print_info:
        print('Working dir: ' + os.getcwd())
        print('Python ' + sys.version.replace('\n', ''))

    rangeinvar_tests = _import_from('rangeinvar_tests', package_root, 'tests')
    if rangeinvar_tests is None:
        import rangeinvar_tests
    rangeinvar = rangeinvar_tests.local_rangeinvar()

    if print_info:
        import numpy
        import scipy
        print('\nnumpy: %s, scipy: %s' % (numpy.__version__, scipy.__version__))
        print('rangeinvar: %s, %s' % (rangeinvar.__version__, os.path.dirname(rangeinvar.__file__)))

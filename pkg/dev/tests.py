# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import re
import unittest
import warnings

from ._import import _preload

from tests import test_classes


run_args = [
    {
        'name': 'regex',
        'kwarg': 'matcher',
    },
]


def run(matcher=None, ci=False):
    """
    Runs the unittest suite of rangeinvar, treating DeprecationWarning as an
    error

    :param matcher:
        None, or a unicode string regular expression selecting the test
        methods to run by name

    :param ci:
        If the run is part of ci, which prints the versions only once

    :return:
        A bool - if every selected test passed
    """

    _preload(not ci)

    warnings.filterwarnings('error', category=DeprecationWarning)

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for test_class in test_classes():
        if matcher:
            names = [name for name in loader.getTestCaseNames(test_class) if re.search(matcher, name)]
            suite.addTests(test_class(name) for name in names)
        else:
            suite.addTests(loader.loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2 if matcher else 1).run(suite)
    return result.wasSuccessful()

# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import sys

from ._import import _preload
from .lint import run as run_lint
from .tests import run as run_tests


def run():
    """
    Runs the linter, the tests and the audit suite of every default problem

    :return:
        A bool - if every step succeeded
    """

    _preload(True)

    print('')
    lint_result = run_lint()

    print('\nRunning tests')
    sys.stdout.flush()
    tests_result = run_tests(ci=True)
    sys.stdout.flush()

    from rangeinvar.cli import verify_suite

    print('\nRunning the audit suite')
    sys.stdout.flush()
    audit_result = verify_suite('all') == 0

    return lint_result and tests_result and audit_result

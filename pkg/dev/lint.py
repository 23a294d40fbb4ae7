# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import os

from . import package_name, package_root

import flake8
from flake8.api.legacy import get_style_guide


def _paths():
    """
    :return:
        A sorted list of the .py files of the package, dev/ and tests/, plus
        run.py and setup.py
    """

    paths = [os.path.join(package_root, name) for name in ('run.py', 'setup.py')]
    for _dir in (package_name, 'dev', 'tests'):
        for root, _, filenames in os.walk(os.path.join(package_root, _dir)):
            paths.extend(os.path.join(root, f) for f in filenames if f.endswith('.py'))
    return sorted(paths)


def run():
    """
    Runs flake8 with the settings of tox.ini

    :return:
        A bool - if flake8 reported no errors
    """

    print('Running flake8 %s' % flake8.__version__)

    style = get_style_guide(config_file=os.path.join(package_root, 'tox.ini'))
    report = style.check_files(_paths())
    if report.total_errors:
        print('%d errors' % report.total_errors)
        return False
    print('OK')
    return True

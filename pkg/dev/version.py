# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import io
import os
import re

from . import package_root, package_name, has_tests_package


run_args = [
    {
        'name': 'pep440_version',
        'required': True
    },
]


_PREFIXES = ('__version__ = ', '__version_info__ = ', 'PACKAGE_VERSION = ')


def run(new_version):
    """
    Updates the package version in rangeinvar/version.py, setup.py and the
    tests package

    :param new_version:
        A unicode string of the new version, a restricted PEP 440 version

    :return:
        A bool - if the version number was successfully bumped
    """

    version_match = re.match(r'(\d+)\.(\d+)\.(\d+)(?:\.((?:dev|a|b|rc)\d+))?$', new_version)
    if not version_match:
        raise ValueError('Invalid PEP 440 version: %s' % new_version)

    new_version_info = tuple(int(version_match.group(i)) for i in (1, 2, 3))
    if version_match.group(4):
        new_version_info += (version_match.group(4),)

    replacements = {
        '__version__ = ': '__version__ = %r\n' % new_version,
        '__version_info__ = ': '__version_info__ = %r\n' % (new_version_info,),
        'PACKAGE_VERSION = ': 'PACKAGE_VERSION = %r\n' % new_version,
    }

    file_paths = [
        os.path.join(package_root, package_name, 'version.py'),
        os.path.join(package_root, 'setup.py'),
    ]
    if has_tests_package:
        file_paths.append(os.path.join(package_root, 'tests', '__init__.py'))

    for file_path in file_paths:
        with io.open(file_path, 'r', encoding='utf-8') as f:
            orig_source = f.read()

        found = 0
        lines = []
        for line in orig_source.splitlines(True):
            prefix = next((p for p in _PREFIXES if line.startswith(p)), None)
            if prefix is None:
                lines.append(line)
                continue
            found += 1
            lines.append(replacements[prefix])
        new_source = ''.join(lines)

        if found == 0:
            raise ValueError('Did not find any versions in %s' % file_path)

        rel_path = os.path.relpath(file_path, package_root)
        if new_source != orig_source:
            print('Updated %d version(s) in %s' % (found, rel_path))
            with io.open(file_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(new_source)
        else:
            print('%d version(s) in %s up-to-date' % (found, rel_path))

    return True

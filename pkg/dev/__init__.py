# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import os


package_name = "rangeinvar"

task_keyword_args = [
    {
        'name': 'output_root',
        'placeholder': '/path/to/output',
        'env_var': 'RANGEINVAR_OUTPUT_ROOT',
    },
]

has_tests_package = True

package_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))

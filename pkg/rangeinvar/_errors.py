# coding: utf-8

"""
Formatting of exception and log messages. Exports the following items:

 - pretty_message()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import re
import textwrap


__all__ = [
    'pretty_message',
]


def pretty_message(string, *params):
    """
    Turns an indented triple-quoted message into a single line: dedents it,
    joins the wrapped lines with single spaces and strips it

    :param string:
        The message template, interpolated with % when params are given

    :param *params:
        Values for the template

    :return:
        A unicode string
    """

    output = re.sub('\\s*\n\\s*', ' ', textwrap.dedent(string).strip())
    if params:
        output = output % params
    return output

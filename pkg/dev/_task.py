# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import ast
import os
import sys

from . import package_root, task_keyword_args
from ._import import _import_from


def _list_tasks():
    """
    Lists the tasks in dev/ along with the args they accept, reading the
    run_args literal of each file rather than importing it

    :return:
        A list of 2-element tuples:
         0: a unicode string of the task name
         1: a list of dicts of the parameter definitions
    """

    out = []
    dev_path = os.path.join(package_root, 'dev')
    for fname in sorted(os.listdir(dev_path)):
        if fname.startswith(('.', '_')) or not fname.endswith('.py'):
            continue

        full_path = os.path.join(dev_path, fname)
        with open(full_path, 'r', encoding='utf-8') as f:
            tree = ast.parse(f.read(), filename=full_path)

        args = ()
        for node in ast.iter_child_nodes(tree):
            if isinstance(node, ast.Assign) and len(node.targets) == 1 \
                    and isinstance(node.targets[0], ast.Name) and node.targets[0].id == 'run_args':
                args = ast.literal_eval(node.value)
                break
        out.append((fname[:-3], args))
    return out


def show_usage():
    """
    Prints the valid task invocations to stderr and exits
    """

    valid_tasks = []
    for name, run_args in _list_tasks():
        usage = name
        for run_arg in run_args:
            template = ' {%s}' if run_arg.get('required', False) else ' [%s]'
            usage += template % run_arg.get('name', '')
        valid_tasks.append(usage)

    out = 'Usage: run.py'
    for karg in task_keyword_args:
        out += ' [%s=%s]' % (karg['name'], karg['placeholder'])
    out += ' (%s)' % ' | '.join(valid_tasks)

    print(out, file=sys.stderr)
    sys.exit(1)


def run_task():
    """
    Parses sys.argv and invokes the requested task, exiting with 0 when the
    task returned True
    """

    argv = sys.argv[1:]

    # Leading name=value args set the environment of the task
    while argv:
        karg = None
        for candidate in task_keyword_args:
            if argv[0].startswith(candidate['name'] + '='):
                karg = candidate
                break
        if karg is None:
            break
        os.environ[karg['env_var']] = argv[0][len(karg['name']) + 1:]
        argv = argv[1:]

    if not argv:
        show_usage()

    task_mod = _import_from('dev.%s' % argv[0], package_root, allow_error=True)
    if task_mod is None:
        show_usage()

    run_args = task_mod.__dict__.get('run_args', [])
    values = argv[1:]
    if len(values) > len(run_args):
        show_usage()

    args = []
    kwargs = {}
    for i, run_arg in enumerate(run_args):
        if i >= len(values):
            if run_arg.get('required', False):
                show_usage()
            break
        val = values[i]
        if run_arg.get('kwarg'):
            kwargs[run_arg['kwarg']] = val
        else:
            args.append(val)

    result = task_mod.run(*args, **kwargs)
    sys.exit(int(not result))

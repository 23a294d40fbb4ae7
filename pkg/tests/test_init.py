# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import ast
import io
import os
import unittest

import rangeinvar


PACKAGE = rangeinvar.__name__

# "from . import __version__" names an attribute of the package
ATTRIBUTES = {
    'rangeinvar.__version__': 'rangeinvar',
}


def _sources():
    """
    :return:
        A sorted list of (module name, parsed ast.Module) tuples for every
        .py file of the package
    """

    root = os.path.abspath(os.path.dirname(rangeinvar.__file__))
    out = []
    for fname in sorted(os.listdir(root)):
        if not fname.endswith('.py'):
            continue
        with io.open(os.path.join(root, fname), 'r', encoding='utf-8') as f:
            tree = ast.parse(f.read(), filename=fname)
        name = fname[:-3]
        out.append((PACKAGE if name == '__init__' else '%s.%s' % (PACKAGE, name), tree))
    return out


def _top_level(tree):
    """
    Yields the statements of a module, descending into if/try blocks but not
    into functions, where imports are deferred
    """

    for node in ast.iter_child_nodes(tree):
        if isinstance(node, (ast.If, ast.Try)):
            for child in node.body + node.orelse + getattr(node, 'finalbody', []):
                yield child
                for nested in _top_level(child):
                    yield nested
        else:
            yield node


def _imports(modname, tree):
    """
    :return:
        A set of the package modules imported at module level
    """

    found = set()
    package = modname if modname == PACKAGE else modname.rsplit('.', 1)[0]
    for node in _top_level(tree):
        if isinstance(node, ast.Import):
            found.update(a.name for a in node.names if a.name.startswith(PACKAGE))
        elif isinstance(node, ast.ImportFrom):
            if node.level == 0:
                if node.module and node.module.startswith(PACKAGE):
                    found.add(node.module)
                continue
            if node.module:
                found.add('%s.%s' % (package, node.module))
            else:
                for alias in node.names:
                    target = '%s.%s' % (package, alias.name)
                    found.add(ATTRIBUTES.get(target, target))
    return found


class InitTests(unittest.TestCase):

    def test_load_order(self):
        deps = dict((name, _imports(name, tree)) for name, tree in _sources())
        load_order = rangeinvar.load_order()
        self.assertEqual(sorted(deps), sorted(load_order))

        loaded = set()
        for mod in load_order:
            self.assertEqual((mod, set()), (mod, deps[mod] - loaded))
            loaded.add(mod)

    def test_modules_declare_all(self):
        for name, tree in _sources():
            if name.endswith('__main__') or name.endswith('.version'):
                continue
            names = [
                target.id
                for node in tree.body if isinstance(node, ast.Assign)
                for target in node.targets if isinstance(target, ast.Name)
            ]
            self.assertIn('__all__', names, name)

    def test_version(self):
        self.assertEqual('%d.%d.%d' % rangeinvar.__version_info__, rangeinvar.__version__)

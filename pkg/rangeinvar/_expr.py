# coding: utf-8

"""
A top-down operator precedence parser for coefficient expressions such as
"1 + 0.5*sin(pi*x)". Grammar: numbers, x, y, pi, unary -, + - * / ^,
sin cos exp tanh and parentheses. ^ binds tighter than unary -, which binds
tighter than * and /, which bind tighter than + and -. ^ is right
associative, the others left associative.
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import re

import numpy as np

from ._errors import pretty_message
from ._types import type_name, str_cls
from .errors import ExpressionError


__all__ = [
    'CoeffExpr',
    'parse_expr',
]


FUNCTIONS = {
    'sin': np.sin,
    'cos': np.cos,
    'exp': np.exp,
    'tanh': np.tanh,
}

VARIABLES = ('x', 'y')

_TOKEN = re.compile(r'\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(.))')

# Binding powers
_ADD = 10
_MUL = 20
_NEG = 25
_POW = 30


class _Node(object):
    def evaluate(self, env):
        raise NotImplementedError()

    def source(self):
        raise NotImplementedError()

    def names(self):
        return set()


class _Number(_Node):
    def __init__(self, value):
        self.value = value

    def evaluate(self, env):
        return self.value

    def source(self):
        return repr(self.value)


class _Name(_Node):
    def __init__(self, name):
        self.name = name

    def evaluate(self, env):
        if self.name == 'pi':
            return np.pi
        return env[self.name]

    def source(self):
        return self.name

    def names(self):
        return set() if self.name == 'pi' else set([self.name])


class _Negate(_Node):
    def __init__(self, operand):
        self.operand = operand

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def source(self):
        return '(-%s)' % self.operand.source()

    def names(self):
        return self.operand.names()


class _Binary(_Node):
    _OPS = {
        '+': np.add,
        '-': np.subtract,
        '*': np.multiply,
        '/': np.divide,
        '^': np.power,
    }

    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right

    def evaluate(self, env):
        with np.errstate(all='ignore'):
            return self._OPS[self.op](self.left.evaluate(env), self.right.evaluate(env))

    def source(self):
        return '(%s %s %s)' % (self.left.source(), self.op, self.right.source())

    def names(self):
        return self.left.names() | self.right.names()


class _Call(_Node):
    def __init__(self, function, argument):
        self.function = function
        self.argument = argument

    def evaluate(self, env):
        with np.errstate(all='ignore'):
            return FUNCTIONS[self.function](self.argument.evaluate(env))

    def source(self):
        return '%s(%s)' % (self.function, self.argument.source())

    def names(self):
        return self.argument.names()


class _Token(object):
    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset

    @property
    def lbp(self):
        if self.kind != 'op':
            return 0
        if self.text in ('+', '-'):
            return _ADD
        if self.text in ('*', '/'):
            return _MUL
        if self.text == '^':
            return _POW
        return 0


def _byte_offset(src, index):
    return len(src[:index].encode('utf-8'))


def _tokenize(src):
    """
    Splits src into tokens whose offsets count UTF-8 bytes
    """

    tokens = []
    position = 0
    length = len(src)
    while position < length and src[position:].strip():
        match = _TOKEN.match(src, position)
        if match is None or match.end() == position:
            break
        number, name, other = match.groups()
        offset = _byte_offset(src, match.end() - len(number or name or other or ''))
        if number:
            tokens.append(_Token('number', number, offset))
        elif name:
            tokens.append(_Token('name', name, offset))
        elif other:
            if other in '+-*/^':
                tokens.append(_Token('op', other, offset))
            elif other in '(),':
                tokens.append(_Token(other, other, offset))
            else:
                raise ExpressionError('unexpected character %r' % other, offset)
        position = match.end()
    tokens.append(_Token('end', '', _byte_offset(src, length)))
    return tokens


class _Parser(object):

    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.index = 0

    @property
    def token(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind):
        token = self.token
        if token.kind != kind:
            found = 'end of input' if token.kind == 'end' else repr(token.text)
            raise ExpressionError('expected %r, found %s' % (kind, found), token.offset)
        return self.advance()

    def expression(self, rbp=0):
        left = self.nud(self.advance())
        while rbp < self.token.lbp:
            left = self.led(self.advance(), left)
        return left

    def nud(self, token):
        if token.kind == 'number':
            return _Number(float(token.text))

        if token.kind == 'name':
            if token.text in FUNCTIONS:
                if self.token.kind != '(':
                    raise ExpressionError('function %s requires an argument in parentheses' % token.text,
                                          self.token.offset)
                self.advance()
                if self.token.kind == ')':
                    raise ExpressionError('function %s takes exactly one argument, got 0' % token.text,
                                          self.token.offset)
                argument = self.expression()
                if self.token.kind == ',':
                    raise ExpressionError('function %s takes exactly one argument' % token.text, self.token.offset)
                self.expect(')')
                return _Call(token.text, argument)
            if token.text in VARIABLES or token.text == 'pi':
                return _Name(token.text)
            raise ExpressionError('unknown identifier %r' % token.text, token.offset)

        if token.kind == 'op' and token.text == '-':
            return _Negate(self.expression(_NEG))

        if token.kind == '(':
            inner = self.expression()
            self.expect(')')
            return inner

        if token.kind == 'end':
            raise ExpressionError('unexpected end of input', token.offset)
        raise ExpressionError('unexpected %r' % token.text, token.offset)

    def led(self, token, left):
        if token.text == '^':
            # One less than its own power makes ^ right associative
            return _Binary('^', left, self.expression(_POW - 1))
        return _Binary(token.text, left, self.expression(token.lbp))


class CoeffExpr(object):

    """
    A parsed coefficient expression in x and y
    """

    src = None
    _tree = None

    def __init__(self, src, tree):
        self.src = src
        self._tree = tree

    @property
    def variables(self):
        """
        A sorted list of the variables used
        """

        return sorted(self._tree.names())

    def to_source(self):
        """
        :return:
            A fully parenthesized unicode string that parses back to an
            equivalent expression
        """

        return self._tree.source()

    def evaluate(self, x, y=None):
        """
        :param x:
            A numpy array of x coordinates

        :param y:
            None for 1-D use, or a numpy array of y coordinates

        :raises:
            rangeinvar.errors.ExpressionError - when y is used without y
            coordinates or a value is not finite

        :return:
            A numpy array shaped like x
        """

        x = np.asarray(x, dtype=np.float64)
        if y is None and 'y' in self._tree.names():
            raise ExpressionError(pretty_message(
                '''
                expression %s uses y, which is not available in one dimension
                ''',
                repr(self.src)
            ))
        env = {'x': x, 'y': np.zeros_like(x) if y is None else np.asarray(y, dtype=np.float64)}
        values = self._tree.evaluate(env) + np.zeros_like(x)
        if not np.all(np.isfinite(values)):
            raise ExpressionError(pretty_message(
                '''
                expression %s does not evaluate to finite values
                ''',
                repr(self.src)
            ))
        return values

    def on_grid(self, grid, segment=None):
        """
        :param grid:
            A rangeinvar.pde.Grid

        :param segment:
            None for all nodes, or a segment name

        :return:
            A numpy array of the values at the nodes
        """

        x = grid.coordinates(0, segment)
        y = grid.coordinates(1, segment) if grid.dim == 2 else None
        return self.evaluate(x, y)

    def __repr__(self):
        return 'CoeffExpr(%r)' % self.src


def parse_expr(src):
    """
    Parses a coefficient expression

    :param src:
        A unicode string

    :raises:
        rangeinvar.errors.ExpressionError - on a syntax error, an unknown
        identifier or a function called with the wrong number of arguments

    :return:
        A CoeffExpr
    """

    if not isinstance(src, str_cls):
        raise TypeError(pretty_message(
            '''
            src must be a unicode string, not %s
            ''',
            type_name(src)
        ))
    parser = _Parser(src)
    tree = parser.expression()
    if parser.token.kind != 'end':
        raise ExpressionError('unexpected %r' % parser.token.text, parser.token.offset)
    return CoeffExpr(src, tree)

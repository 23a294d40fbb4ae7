# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import unittest

import numpy as np

from rangeinvar import pde
from rangeinvar._expr import parse_expr
from rangeinvar.errors import ExpressionError

from .unittest_data import data_decorator, data


@data_decorator
class ExprTests(unittest.TestCase):

    @staticmethod
    def values():
        return (
            ('constant', '1', 0.3, 1.0),
            ('sine', '1 + 0.5*sin(pi*x)', 0.5, 1.5),
            ('right_assoc_power', '2^3^2', 0.0, 512.0),
            ('negated_power', '-2^2', 0.0, -4.0),
            ('precedence', '1 + 2*3 - 4/2', 0.0, 5.0),
            ('left_assoc_minus', '10 - 3 - 2', 0.0, 5.0),
            ('parentheses', '(1 + 2)*3', 0.0, 9.0),
            ('functions', 'exp(0) + cos(0) + tanh(0)', 0.0, 2.0),
            ('scientific', '1e-3*x + .5', 2.0, 0.502),
            ('trailing_space', '1 + 2  ', 0.0, 3.0),
        )

    @data('values', True)
    def evaluate(self, src, x, expected):
        result = parse_expr(src).evaluate(np.array([x]))
        self.assertAlmostEqual(expected, result[0], places=12)

    @staticmethod
    def invalid():
        return (
            ('unknown_identifier', 'z + 1', 0),
            ('unknown_function', 'log(x)', 0),
            ('dangling_operator', '1 +', 3),
            ('unbalanced', '(1 + x', 6),
            ('two_arguments', 'sin(x, y)', 5),
            ('no_arguments', 'cos()', 4),
            ('bad_character', '1 $ 2', 2),
            ('trailing', '1 2', 2),
            ('character_after_wide_space', '1\u00a0+ $', 5),
            ('end_after_wide_space', '1 +\u3000', 6),
            ('identifier_after_wide_space', '\u3000z\u00e9', 3),
        )

    @data('invalid', True)
    def syntax_errors(self, src, offset):
        with self.assertRaises(ExpressionError) as context:
            parse_expr(src)
        self.assertEqual(offset, context.exception.offset)

    def test_variables(self):
        self.assertEqual(['x', 'y'], parse_expr('sin(pi*x)*y').variables)
        self.assertEqual([], parse_expr('pi').variables)

    def test_to_source_round_trip(self):
        expr = parse_expr('1 + 0.5*sin(pi*x)*y^2 - -x')
        again = parse_expr(expr.to_source())
        x = np.linspace(0.0, 1.0, 7)
        y = np.linspace(1.0, 0.0, 7)
        np.testing.assert_allclose(expr.evaluate(x, y), again.evaluate(x, y), rtol=0.0, atol=1e-15)
        self.assertEqual(expr.to_source(), again.to_source())

    def test_y_in_one_dimension(self):
        with self.assertRaises(ExpressionError):
            parse_expr('x + y').evaluate(np.array([0.5]))

    def test_non_finite(self):
        with self.assertRaises(ExpressionError):
            parse_expr('1/x').evaluate(np.array([0.0, 1.0]))

    def test_on_grid(self):
        grid = pde.make_grid(2, 3)
        values = parse_expr('x + 10*y').on_grid(grid)
        np.testing.assert_allclose(grid.coordinates(0) + 10.0 * grid.coordinates(1), values)

    def test_on_segment(self):
        grid = pde.make_grid(2, 5, [('robin', 'bottom'), ('rest', ('left', 'right', 'top'))])
        values = parse_expr('1 + x').on_grid(grid, 'robin')
        np.testing.assert_allclose([1.0, 1.25, 1.5, 1.75, 2.0], values)

    def test_constant_broadcasts(self):
        values = parse_expr('2').evaluate(np.zeros(4))
        self.assertEqual((4,), values.shape)

    def test_rejects_bytes(self):
        with self.assertRaises(TypeError):
            parse_expr(b'1')

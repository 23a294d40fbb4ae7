# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import unittest

import numpy as np

from rangeinvar import numerics
from rangeinvar.errors import DimensionError, NumericError
from rangeinvar.numerics import LinOpRep, WeightedSpace

from .unittest_data import data_decorator, data


def _space(weights):
    return WeightedSpace(np.array(weights, dtype=np.float64))


def _random_op(rng, rows, cols):
    domain = WeightedSpace(rng.uniform(0.1, 2.0, cols))
    codomain = WeightedSpace(rng.uniform(0.1, 2.0, rows))
    return LinOpRep(rng.standard_normal((rows, cols)), domain, codomain)


@data_decorator
class NumericsTests(unittest.TestCase):

    @staticmethod
    def inner_products():
        return (
            ('orthogonal', [1.0, 1.0], [1.0, 0.0], [0.0, 1.0], 0.0),
            ('weighted', [2.0, 3.0], [1.0, 1.0], [1.0, 1.0], 5.0),
            ('negative', [0.5, 4.0], [2.0, -1.0], [1.0, 1.0], -3.0),
        )

    @data('inner_products', True)
    def weighted_inner(self, weights, x, y, expected):
        space = _space(weights)
        self.assertAlmostEqual(expected, numerics.weighted_inner(space, x, y), places=14)
        self.assertAlmostEqual(
            numerics.weighted_inner(space, x, y),
            numerics.weighted_inner(space, y, x),
            places=14
        )

    def test_weighted_inner_positive(self):
        space = _space([0.3, 1.0, 2.5])
        rng = np.random.default_rng(3)
        x = rng.standard_normal(3)
        self.assertGreater(numerics.weighted_inner(space, x, x), 0.0)
        self.assertEqual(0.0, numerics.weighted_inner(space, np.zeros(3), np.zeros(3)))

    def test_weighted_inner_length_mismatch(self):
        with self.assertRaises(DimensionError):
            numerics.weighted_inner(_space([1.0, 1.0]), [1.0, 2.0, 3.0], [1.0, 2.0])

    def test_weighted_space_rejects_non_positive(self):
        with self.assertRaises(ValueError):
            WeightedSpace([1.0, 0.0])

    def test_lin_op_rejects_bad_shape(self):
        with self.assertRaises(DimensionError):
            LinOpRep(np.zeros((2, 3)), _space([1.0, 1.0]), _space([1.0, 1.0]))

    def test_lin_op_rejects_non_finite(self):
        with self.assertRaises(NumericError):
            LinOpRep([[np.nan]], _space([1.0]), _space([1.0]))

    def test_adjoint_euclidean(self):
        matrix = np.arange(6.0).reshape(2, 3)
        op = LinOpRep(matrix, WeightedSpace.euclidean(3), WeightedSpace.euclidean(2))
        np.testing.assert_array_equal(matrix.T, numerics.adjoint(op).matrix)

    def test_adjoint_scalar(self):
        op = LinOpRep([[2.0]], _space([0.5]), _space([2.0]))
        self.assertAlmostEqual(8.0, numerics.adjoint(op).matrix[0, 0], places=14)

    def test_adjoint_identity(self):
        rng = np.random.default_rng(11)
        op = _random_op(rng, 5, 4)
        op_adj = numerics.adjoint(op)
        norm = numerics.operator_norm(op)
        for _ in range(20):
            x = rng.standard_normal(4)
            y = rng.standard_normal(5)
            lhs = numerics.weighted_inner(op.codomain, op.apply(x), y)
            rhs = numerics.weighted_inner(op.domain, x, op_adj.apply(y))
            bound = 1e-12 * norm * numerics.weighted_norm(op.domain, x) * numerics.weighted_norm(op.codomain, y)
            self.assertLessEqual(abs(lhs - rhs), bound)

    def test_adjoint_involution(self):
        rng = np.random.default_rng(12)
        op = _random_op(rng, 3, 6)
        twice = numerics.adjoint(numerics.adjoint(op))
        np.testing.assert_allclose(op.matrix, twice.matrix, rtol=0.0, atol=1e-14)
        self.assertEqual(op.domain, twice.domain)
        self.assertEqual(op.codomain, twice.codomain)

    def test_solve_regularized_zero_operators(self):
        space = WeightedSpace.euclidean(1)
        zero = LinOpRep.zero(space, space)
        z = numerics.solve_regularized(zero, zero, 2.0, [4.0])
        self.assertAlmostEqual(2.0, z[0], places=14)

    def test_solve_regularized_identity(self):
        space = WeightedSpace.euclidean(2)
        z = numerics.solve_regularized(LinOpRep.identity(space), None, 1.0, [2.0, 4.0])
        np.testing.assert_allclose([1.0, 2.0], z, rtol=1e-14)

    def test_solve_regularized_rejects_alpha(self):
        space = WeightedSpace.euclidean(2)
        with self.assertRaises(ValueError):
            numerics.solve_regularized(LinOpRep.identity(space), None, 0.0, [1.0, 1.0])

    def test_solve_regularized_rejects_non_finite(self):
        space = WeightedSpace.euclidean(2)
        with self.assertRaises(NumericError):
            numerics.solve_regularized(LinOpRep.identity(space), None, 1.0, [1.0, np.inf])

    def test_solve_regularized_residual(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            K = _random_op(rng, 7, 5)
            P = LinOpRep(rng.standard_normal((5, 5)), K.domain, K.domain)
            rhs = rng.standard_normal(5)
            z = numerics.solve_regularized(K, P, 0.1, rhs)
            K_adj = numerics.adjoint(K)
            P_adj = numerics.adjoint(P)
            applied = K_adj.apply(K.apply(z)) + P_adj.apply(P.apply(z)) + 0.1 * z
            residual = numerics.weighted_norm(K.domain, applied - rhs)
            self.assertLessEqual(residual, 1e-10 * numerics.weighted_norm(K.domain, rhs))

    def test_solve_regularized_minimizer(self):
        rng = np.random.default_rng(6)
        K = _random_op(rng, 6, 4)
        P = LinOpRep(rng.standard_normal((3, 4)), K.domain, _space(rng.uniform(0.5, 1.5, 3)))
        a = rng.standard_normal(6)
        b = rng.standard_normal(3)
        c = rng.standard_normal(4)
        alpha = 0.3
        rhs = numerics.adjoint(K).apply(a) + numerics.adjoint(P).apply(b) + alpha * c
        z = numerics.solve_regularized(K, P, alpha, rhs)

        # Stacked least squares in sqrt-weighted coordinates
        wk = np.sqrt(K.codomain.weights)
        wp = np.sqrt(P.codomain.weights)
        wd = np.sqrt(K.domain.weights)
        stacked = np.vstack([
            wk[:, None] * K.matrix,
            wp[:, None] * P.matrix,
            np.sqrt(alpha) * np.diag(wd),
        ])
        target = np.concatenate([wk * a, wp * b, np.sqrt(alpha) * wd * c])
        expected = np.linalg.lstsq(stacked, target, rcond=None)[0]
        np.testing.assert_allclose(expected, z, rtol=1e-9, atol=1e-12)

    def test_nullspace_identity(self):
        space = WeightedSpace.euclidean(3)
        sigma, basis = numerics.numerical_nullspace(LinOpRep.identity(space), 1e-8)
        self.assertEqual(0, len(basis))
        np.testing.assert_allclose([1.0, 1.0, 1.0], sigma)

    def test_nullspace_repeated_rows(self):
        op = LinOpRep([[1.0, 0.0], [1.0, 0.0]], WeightedSpace.euclidean(2), WeightedSpace.euclidean(2))
        sigma, basis = numerics.numerical_nullspace(op, 1e-8)
        self.assertEqual(1, len(basis))
        self.assertAlmostEqual(0.0, basis[0][0], places=14)
        self.assertAlmostEqual(1.0, abs(basis[0][1]), places=14)

    def test_nullspace_small_singular_value(self):
        space = WeightedSpace.euclidean(2)
        op = LinOpRep(np.diag([1.0, 1e-12]), space, space)
        _, basis = numerics.numerical_nullspace(op, 1e-8)
        self.assertEqual(1, len(basis))

    def test_nullspace_zero_matrix(self):
        op = LinOpRep.zero(WeightedSpace.euclidean(3), WeightedSpace.euclidean(2))
        _, basis = numerics.numerical_nullspace(op, 1e-8)
        self.assertEqual(3, len(basis))

    def test_nullspace_basis_properties(self):
        rng = np.random.default_rng(8)
        domain = WeightedSpace(rng.uniform(0.2, 2.0, 6))
        codomain = WeightedSpace(rng.uniform(0.2, 2.0, 4))
        op = LinOpRep(rng.standard_normal((4, 6)), domain, codomain)
        sigma, basis = numerics.numerical_nullspace(op, 1e-6)
        self.assertEqual(2, len(basis))
        for i, u in enumerate(basis):
            self.assertLessEqual(numerics.weighted_norm(codomain, op.apply(u)), 2e-6 * sigma[0])
            for j, v in enumerate(basis):
                expected = 1.0 if i == j else 0.0
                self.assertAlmostEqual(expected, numerics.weighted_inner(domain, u, v), places=12)

    def test_nullspace_rejects_tolerance(self):
        space = WeightedSpace.euclidean(2)
        with self.assertRaises(ValueError):
            numerics.numerical_nullspace(LinOpRep.identity(space), 1.5)

    def test_fd_jacobian_identity(self):
        jac = numerics.fd_jacobian(lambda v: v, np.array([0.3, -1.2, 4.0]))
        np.testing.assert_allclose(np.eye(3), jac.matrix, rtol=0.0, atol=1e-10)

    def test_fd_jacobian_square(self):
        jac = numerics.fd_jacobian(lambda v: v ** 2, np.array([3.0]), 1e-4)
        self.assertAlmostEqual(6.0, jac.matrix[0, 0], delta=1e-7)

    def test_fd_jacobian_linear(self):
        matrix = np.array([[1.0, 2.0], [-3.0, 0.5], [0.0, 4.0]])
        for step in (1e-6, 1e-3, 0.5):
            jac = numerics.fd_jacobian(matrix.dot, np.array([1.0, -2.0]), step)
            np.testing.assert_allclose(matrix, jac.matrix, rtol=0.0, atol=1e-10)

    def test_fd_jacobian_propagates_failures(self):
        def failing(v):
            raise NumericError('solve failed')

        with self.assertRaises(NumericError):
            numerics.fd_jacobian(failing, np.array([1.0]))

    def test_operator_norm(self):
        space = WeightedSpace.euclidean(2)
        op = LinOpRep(np.diag([3.0, -5.0]), space, space)
        self.assertAlmostEqual(5.0, numerics.operator_norm(op), places=12)

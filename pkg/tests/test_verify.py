# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import json
import unittest

import numpy as np

from rangeinvar import pde, problems, verify
from rangeinvar.errors import ConfigurationError
from rangeinvar.numerics import LinOpRep, WeightedSpace


def _toy(r=None, x0=(0.0, 0.0)):
    space = WeightedSpace.euclidean(len(x0))
    K = LinOpRep(np.diag([1.0, 0.1][:len(x0)]), space, space)
    return problems.build_model_problem(K, list(x0), r=r, truth=[0.0] * len(x0))


def _diag(values):
    space = WeightedSpace.euclidean(len(values))
    return LinOpRep(np.diag(values), space, space)


def _rows(*rows):
    rows = np.array(rows, dtype=np.float64)
    return LinOpRep(rows, WeightedSpace.euclidean(rows.shape[1]), WeightedSpace.euclidean(rows.shape[0]))


class VerifyTests(unittest.TestCase):

    def test_range_invariance_at_x0(self):
        problem = problems.default_problem('potential1d', n=17)
        report = verify.check_range_invariance(problem, problem.x0)
        self.assertTrue(report.passed)
        self.assertEqual(0.0, report.measured['relative_residual'])

    def test_range_invariance_potential(self):
        rng = np.random.default_rng(0)
        for formulation in ('reduced', 'all-at-once'):
            problem = problems.default_problem('potential1d', formulation, n=17)
            draws = [verify.random_draw(problem, 0.3, rng) for _ in range(5)]
            for draw in draws:
                spread = np.abs(np.concatenate(draw.slices) - np.concatenate(problem.x0.slices)).max()
                self.assertLessEqual(spread, 0.3 + 1e-14)
            report = verify.check_range_invariance(problem, draws)
            self.assertTrue(report.passed)
            self.assertLessEqual(report.measured['relative_residual'], 1e-10)
            self.assertEqual(5, report.samples)

    def test_range_invariance_diffabs_signs(self):
        grid = pde.make_grid(2, 7)
        x, y = grid.coordinates(0), grid.coordinates(1)
        problem = problems.build_diffabs_problem(grid, [0.0, 1.0], 2, truth=(5.0 + x * y, 1.0 + 0.2 * x))
        rng = np.random.default_rng(3)
        draws = [verify.random_draw(problem, 0.3, rng) for _ in range(3)]
        report = verify.check_range_invariance(problem, draws)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.measured['relative_residual'], 1e-9)
        self.assertGreater(report.measured['relative_residual_opposite_sign'], 1e-4)

    def test_rid_constant_linear(self):
        report = verify.estimate_rid_constant(_toy(), 0.1, samples=10)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.measured['c_hat'], 1e-12)

    def test_rid_constant_scalar(self):
        problem = _toy(r=lambda v: v + 0.5 * v ** 2, x0=(0.0,))
        report = verify.estimate_rid_constant(problem, 0.1, samples=20, seed=5)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.measured['c_hat'], 0.05 + 1e-12)
        self.assertGreater(report.measured['c_hat'], 0.0)

    def test_rid_constant_monotone(self):
        problem = problems.default_problem('potential1d', n=17)
        rho = 0.1 * np.sqrt(np.dot(problem.slice_space.weights, problem.x0.collapse() ** 2))
        full = verify.estimate_rid_constant(problem, rho, samples=10, seed=2)
        half = verify.estimate_rid_constant(problem, rho / 2.0, samples=10, seed=2)
        self.assertTrue(full.passed)
        self.assertLessEqual(half.measured['c_hat'], full.measured['c_hat'])
        self.assertLess(full.measured['c_hat'], 1.0)

    def test_rid_constant_requires_truth(self):
        space = WeightedSpace.euclidean(2)
        problem = problems.build_model_problem(LinOpRep.identity(space), [0.0, 0.0])
        with self.assertRaises(ConfigurationError):
            verify.estimate_rid_constant(problem, 0.1)

    def test_spectral_bounds_diagonal(self):
        report = verify.check_spectral_bounds(_diag([1.0, 0.0]), _diag([0.0, 1.0]), [1.0], 'a')
        self.assertTrue(report.passed)
        self.assertAlmostEqual(0.5, report.measured['norm_kk'][0], places=12)
        self.assertAlmostEqual(0.5, report.measured['norm_k_adjoint'][0], places=12)

    def test_spectral_bounds_zero_penalty(self):
        rng = np.random.default_rng(4)
        space = WeightedSpace(rng.uniform(0.5, 2.0, 5))
        K = LinOpRep(rng.standard_normal((3, 5)), space, WeightedSpace.euclidean(3))
        alphas = [1e-4, 1e-2, 1.0]
        report = verify.check_spectral_bounds(K, LinOpRep.zero(space, space), alphas, 'a')
        self.assertTrue(report.passed)
        for norm, alpha in zip(report.measured['norm_k_adjoint'], alphas):
            self.assertLessEqual(norm, np.sqrt(1.0 / alpha) + 1e-8)

    def test_spectral_bounds_random_cases(self):
        rng = np.random.default_rng(6)
        for case in ('a', 'b'):
            for _ in range(10):
                K, P = verify.random_spectral_pair(case, rng)
                alphas = list(10.0 ** rng.uniform(-4.0, 0.0, 5))
                report = verify.check_spectral_bounds(K, P, alphas, case)
                self.assertEqual('holds', report.measured['precondition'])
                self.assertTrue(report.passed)

    def test_spectral_bounds_violated_precondition(self):
        report = verify.check_spectral_bounds(_diag([1.0, 0.0]), _diag([1.0, 0.0]), [1.0], 'a')
        self.assertFalse(report.passed)
        self.assertEqual('violated', report.measured['precondition'])

    def test_nullspace_stacked_identity(self):
        report = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([0.0, 1.0]), 1e-6, expect_trivial=True)
        self.assertTrue(report.passed)
        self.assertEqual(0, report.measured['joint_dimension'])
        self.assertEqual(1, report.measured['k_dimension'])

    def test_nullspace_shared_kernel(self):
        report = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([1.0, 0.0]), 1e-6)
        self.assertTrue(report.passed)
        self.assertEqual(1, report.measured['joint_dimension'])
        failed = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([1.0, 0.0]), 1e-6, expect_trivial=True)
        self.assertFalse(failed.passed)

    def test_nullspace_sigma_ratio(self):
        report = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([0.0, 0.5]), 1e-6, expect_trivial=True)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(0.5, report.measured['sigma_ratio'], places=14)
        singular = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([0.0, 0.0]), 1e-6)
        self.assertEqual(0.0, singular.measured['sigma_ratio'])
        self.assertEqual(1, singular.measured['joint_dimension'])

    def test_nullspace_robin_coarse(self):
        problem = problems.default_problem('robin', n=5)
        report = verify.nullspace_joint_diag(problem.frozen_k(), problem.penalty_op(), 1e-6, expect_trivial=True)
        self.assertTrue(report.passed)
        self.assertEqual(0, report.measured['joint_dimension'])
        self.assertGreater(report.measured['sigma_ratio'], 1e-6)

    def test_frozen_vs_fd_linear(self):
        report = verify.check_frozen_vs_fd(_toy(), step=0.5, tolerance=1e-12)
        self.assertTrue(report.passed)

    def test_frozen_vs_fd_potential(self):
        report = verify.check_frozen_vs_fd(problems.default_problem('potential1d'))
        self.assertTrue(report.passed)
        self.assertLessEqual(report.measured['relative_error'], 1e-6)

    def test_frozen_vs_fd_robin_tanh(self):
        report = verify.check_frozen_vs_fd(problems.default_problem('robin_tanh', n=9), tolerance=1e-5)
        self.assertTrue(report.passed)

    def test_frozen_vs_fd_sampled_columns(self):
        problem = problems.default_problem('potential2d', n=7)
        report = verify.check_frozen_vs_fd(problem, columns=10, seed=1)
        self.assertEqual(10, report.measured['columns'])
        self.assertTrue(report.passed)

    def test_adjoints(self):
        rng = np.random.default_rng(10)
        identity = LinOpRep.identity(WeightedSpace.euclidean(4))
        domain = WeightedSpace(rng.uniform(0.1, 3.0, 5))
        codomain = WeightedSpace(rng.uniform(0.1, 3.0, 8))
        random_op = LinOpRep(rng.standard_normal((8, 5)), domain, codomain)
        report = verify.check_adjoints([identity, random_op])
        self.assertTrue(report.passed)
        self.assertEqual(0.0, report.measured['residuals'][0])
        self.assertLessEqual(report.measured['residuals'][1], 1e-13)

    def test_adjoints_unweighted_transpose(self):
        rng = np.random.default_rng(11)
        domain = WeightedSpace(rng.uniform(0.1, 3.0, 5))
        codomain = WeightedSpace(rng.uniform(0.1, 3.0, 8))
        op = LinOpRep(rng.standard_normal((8, 5)), domain, codomain)
        naive = LinOpRep(op.matrix.T, codomain, domain)
        self.assertFalse(verify.check_adjoints([(op, naive)]).passed)

    def test_nonlinearity_constants_context_only(self):
        problem = problems.default_problem('potential1d', n=17)
        report = verify.sample_nonlinearity_constants(problem, 0.1, samples=3)
        self.assertTrue(report.context_only)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.measured['tangential_cone'], 0.0)

    def test_report_serializes(self):
        report = verify.nullspace_joint_diag(_rows([1.0, 0.0]), _rows([0.0, 1.0]))
        data = json.loads(json.dumps(report.to_dict()))
        self.assertEqual('nullspace', data['check'])
        self.assertEqual(True, data['passed'])

    def test_run_suite_unknown_kind(self):
        with self.assertRaises(ConfigurationError):
            verify.run_suite('heat')

    def _assert_suite_passes(self, reports):
        for report in reports:
            if not report.context_only:
                self.assertTrue(report.passed, repr(report) + ' ' + repr(dict(report.measured)))

    def test_run_suite_robin(self):
        reports = verify.run_suite('robin', draws=3, rid_samples=10)
        checks = set(r.check for r in reports)
        for check in ('range_invariance', 'frozen_vs_fd', 'adjoints', 'rid_constant', 'nullspace',
                      'spectral_bounds', 'spectral_precondition', 'nonlinearity_constants'):
            self.assertIn(check, checks)
        self._assert_suite_passes(reports)

        nullspace = dict((r.instance, r) for r in reports if r.check == 'nullspace')
        self.assertEqual(['robin/reduced', 'robin_tanh/reduced'], sorted(nullspace))
        for report in nullspace.values():
            self.assertTrue(report.context_only)
            self.assertTrue(report.thresholds['expect_trivial'])
            self.assertEqual(report.measured['joint_dimension'] == 0, report.measured['trivial'])
        # boundary data on the default grid leave singular values far below the rank tolerance
        robin = nullspace['robin/reduced']
        self.assertGreater(robin.measured['joint_dimension'], 0)
        self.assertLess(robin.measured['sigma_ratio'], 1e-6)

    def test_run_suite_potential(self):
        reports = verify.run_suite('potential', draws=2, rid_samples=10)
        self._assert_suite_passes(reports)
        instances = set(r.instance for r in reports if r.check == 'range_invariance')
        self.assertEqual(set(['potential1d/reduced', 'potential1d/all-at-once', 'potential2d/reduced',
                              'potential2d/all-at-once']), instances)

    def test_run_suite_diffabs(self):
        reports = verify.run_suite('diffabs', draws=2, rid_samples=10)
        self._assert_suite_passes(reports)

        rid = [r for r in reports if r.check == 'rid_constant']
        self.assertEqual(2, len(rid))
        for report in rid:
            self.assertLess(report.measured['c_hat'], 1.0)
        self.assertLessEqual(rid[1].measured['c_hat'], rid[0].measured['c_hat'])

        nullspace = [r for r in reports if r.check == 'nullspace']
        self.assertEqual(1, len(nullspace))
        self.assertFalse(nullspace[0].context_only)
        self.assertLessEqual(nullspace[0].measured['joint_dimension'], nullspace[0].measured['k_dimension'])

        adjoints = dict((r.instance, r) for r in reports if r.check == 'adjoints')
        self.assertEqual(set(['diffabs/reduced', 'diffabs/all-at-once']), set(adjoints))
        self.assertEqual(3, len(adjoints['diffabs/all-at-once'].measured['residuals']))

    def test_range_invariance_all_at_once_defaults(self):
        rng = np.random.default_rng(12)
        for name in ('diffabs', 'robin_tanh'):
            problem = problems.default_problem(name, 'all-at-once')
            draws = [verify.random_draw(problem, 0.3, rng) for _ in range(3)]
            report = verify.check_range_invariance(problem, draws)
            self.assertTrue(report.passed, name)
            self.assertLessEqual(report.measured['relative_residual'], 1e-9)

    def test_adjoints_matrix_free(self):
        problem = problems.default_problem('diffabs', 'all-at-once')
        pair = (problem.frozen_apply, problem.frozen_adjoint_apply, problem.domain, problem.data_space)
        report = verify.check_adjoints([pair], probes=3)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.measured['residuals'][0], 1e-12)

        def zero(vector):
            return np.zeros(problem.domain.dim)

        wrong = (problem.frozen_apply, zero, problem.domain, problem.data_space)
        self.assertFalse(verify.check_adjoints([wrong], probes=1).passed)

# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import csv
import io
import json
import os
import shutil
import sys
import tempfile
import unittest

import numpy as np

from rangeinvar import cli
from rangeinvar.errors import ConfigurationError, ExpressionError
from rangeinvar.numerics import WeightedSpace, weighted_norm


MINIMAL = '''
[problem]
kind = potential
dim = 1
n = 33
observation = interior

[truth]
q = "1 + 0.5*sin(pi*x)"

[init]
q = 1

[noise]
deltas = 0
seeds = 0

[solver]
method = frozen_newton
max_iter = 30
stop_rule = none

[output]
timing = off
'''

SWEEP = '''
[problem]
kind = potential
n = 9

[truth]
q = "1 + 0.5*sin(pi*x)"

[noise]
deltas = 1e-2, 1e-3, 1e-4
seeds = 1, 2

[solver]
max_iter = 3
'''


class _Quiet(object):

    def __enter__(self):
        self.stdout = sys.stdout
        self.stderr = sys.stderr
        sys.stdout = io.StringIO()
        sys.stderr = io.StringIO()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.output = sys.stdout.getvalue()
        self.errors = sys.stderr.getvalue()
        sys.stdout = self.stdout
        sys.stderr = self.stderr


class CliTests(unittest.TestCase):

    def setUp(self):
        self.root = tempfile.mkdtemp()
        self.saved_env = os.environ.pop(cli.OUTPUT_ROOT_ENV, None)

    def tearDown(self):
        shutil.rmtree(self.root)
        os.environ.pop(cli.OUTPUT_ROOT_ENV, None)
        if self.saved_env is not None:
            os.environ[cli.OUTPUT_ROOT_ENV] = self.saved_env

    def _write(self, text, name='experiment.ini'):
        path = os.path.join(self.root, name)
        with io.open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def _runs(self, directory):
        return sorted(name for name in os.listdir(directory) if name.startswith('run_'))

    def test_parse_minimal(self):
        config = cli.ExperimentConfig.from_string(MINIMAL)
        self.assertEqual('potential', config.kind)
        self.assertEqual(33, config.n)
        self.assertEqual('interior', config.observation)
        self.assertEqual([0.0], config.deltas)
        self.assertEqual('frozen_newton', config.solver.method)
        self.assertEqual(30, config.solver.max_iter)
        self.assertFalse(config.timing)
        self.assertEqual(['csv', 'json'], config.formats)
        self.assertEqual('1 + 0.5*sin(pi*x)', config.sections['truth']['q'].strip('"'))

    def test_parse_defaults(self):
        config = cli.ExperimentConfig.from_string('[problem]\nkind = diffabs\n')
        self.assertEqual(2, config.dim)
        self.assertEqual(17, config.n)
        self.assertEqual([0.0, 1.0, 2.0, 4.0], config.lambdas)
        self.assertEqual([0], config.seeds)

    def test_parse_errors(self):
        cases = (
            '[problem]\nkind = heat\n',
            '[problem]\nsize = 3\n',
            '[problem]\nn = three\n',
            '[physics]\nkind = potential\n',
            '[noise]\ndeltas = -1\n',
            '[solver]\ntheta = 2\n',
            '[solver]\nstep = 1\n',
            '[output]\nformats = csv, xml\n',
            '[output]\ntiming = maybe\n',
            '[truth]\nc = 1\n',
            'kind = potential\n',
        )
        for text in cases:
            with self.assertRaises(ConfigurationError):
                cli.ExperimentConfig.from_string(text)

    def test_parse_bad_expression(self):
        with self.assertRaises(ExpressionError):
            cli.ExperimentConfig.from_string('[truth]\nq = "1 + "\n')

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            cli.ExperimentConfig.from_file(os.path.join(self.root, 'missing.ini'))

    def test_build_problem_requires_truth(self):
        config = cli.ExperimentConfig.from_string('[problem]\nkind = potential\nn = 9\n')
        with self.assertRaises(ConfigurationError):
            cli.build_problem(config)

    def test_build_problem_kinds(self):
        robin = cli.ExperimentConfig.from_string('[problem]\nkind = robin\nn = 5\n[truth]\nq = "1 + x"\n')
        problem = cli.build_problem(robin)
        self.assertEqual('robin', problem.kind)
        np.testing.assert_allclose([1.25, 1.5, 1.75], problem.truth.slices[0])

        diffabs = cli.ExperimentConfig.from_string(
            '[problem]\nkind = diffabs\nn = 5\nm = 1\nlambdas = 0, 1\n[truth]\nc = 5\na = "1 + 0.1*x*y"\n'
        )
        problem = cli.build_problem(diffabs)
        self.assertEqual('diffabs', problem.kind)
        self.assertEqual(2, problem.x0.experiment_count)

    def test_make_noise(self):
        y = np.linspace(0.0, 1.0, 20)
        np.testing.assert_array_equal(y, cli.make_noise(y, 0.0, 3))
        noisy = cli.make_noise(y, 0.01, 3)
        self.assertAlmostEqual(0.01, np.linalg.norm(noisy - y), places=15)
        np.testing.assert_array_equal(noisy, cli.make_noise(y, 0.01, 3))
        self.assertFalse(np.array_equal(noisy, cli.make_noise(y, 0.01, 4)))

    def test_make_noise_weighted(self):
        space = WeightedSpace(np.linspace(0.5, 2.0, 10))
        y = np.ones(10)
        noisy = cli.make_noise(y, 0.2, 0, space)
        self.assertAlmostEqual(0.2, weighted_norm(space, noisy - y), places=14)
        with self.assertRaises(ValueError):
            cli.make_noise(y, -0.1, 0)

    def test_run_minimal(self):
        config = cli.ExperimentConfig.from_string(MINIMAL)
        with _Quiet():
            self.assertEqual(0, cli.run(config, root=self.root))

        runs = self._runs(self.root)
        self.assertEqual(['run_0_delta_0.0_seed_0'], runs)
        directory = os.path.join(self.root, runs[0])
        with io.open(os.path.join(directory, 'record.csv'), 'r', encoding='utf-8', newline='') as f:
            text = f.read()
        self.assertNotIn('\r', text)
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(list(cli.CSV_COLUMNS), rows[0])
        self.assertLessEqual(len(rows) - 1, 30)
        self.assertEqual(0.0, float(rows[-1][6]))

        with io.open(os.path.join(directory, 'summary.json'), 'r', encoding='utf-8') as f:
            summary = json.load(f)
        self.assertTrue(summary['success'])
        self.assertEqual('max_iter', summary['stop_reason'])
        self.assertLess(summary['final_relative_error'], 1e-3)

        with io.open(os.path.join(self.root, 'summary.json'), 'r', encoding='utf-8') as f:
            aggregate = json.load(f)
        self.assertTrue(aggregate['success'])
        self.assertEqual(1, len(aggregate['runs']))

    def test_run_zero_potential_fails(self):
        text = MINIMAL.replace('[init]\nq = 1', '[init]\nq = "0"')
        config = cli.ExperimentConfig.from_string(text)
        with _Quiet() as quiet:
            self.assertNotEqual(0, cli.run(config, root=self.root))
        self.assertIn('error', quiet.errors)
        with io.open(os.path.join(self.root, 'summary.json'), 'r', encoding='utf-8') as f:
            aggregate = json.load(f)
        self.assertFalse(aggregate['success'])

    def test_sweep(self):
        path = self._write(SWEEP + '\n[output]\ndirectory = "%s"\n' % os.path.join(self.root, 'sweep'))
        with _Quiet():
            status = cli.main(['sweep', '--config', path, '--workers', '3'])
        self.assertEqual(0, status)
        runs = self._runs(os.path.join(self.root, 'sweep'))
        self.assertEqual(6, len(runs))
        self.assertIn('run_5_delta_0.0001_seed_2', runs)

    def test_sweep_matches_sequential(self):
        config = cli.ExperimentConfig.from_string(SWEEP)
        first = os.path.join(self.root, 'first')
        second = os.path.join(self.root, 'second')
        with _Quiet():
            cli.run(config, workers=1, root=first)
            cli.run(config, workers=4, root=second)
        for name in self._runs(first):
            with io.open(os.path.join(first, name, 'summary.json'), 'r', encoding='utf-8') as f:
                a = json.load(f)
            with io.open(os.path.join(second, name, 'summary.json'), 'r', encoding='utf-8') as f:
                b = json.load(f)
            self.assertEqual(a['final_error'], b['final_error'])

    def test_output_root_env(self):
        target = os.path.join(self.root, 'from_env')
        os.environ[cli.OUTPUT_ROOT_ENV] = target
        self.assertEqual(target, cli.output_root('output'))
        config = cli.ExperimentConfig.from_string(SWEEP.replace('seeds = 1, 2', 'seeds = 1'))
        with _Quiet():
            cli.run(config, root=os.path.join(self.root, 'ignored'))
        self.assertEqual(3, len(self._runs(target)))
        self.assertFalse(os.path.exists(os.path.join(self.root, 'ignored')))

    def test_verify_unknown_kind(self):
        with _Quiet():
            self.assertEqual(2, cli.verify_suite('heat', root=self.root))
            self.assertEqual(2, cli.main(['verify', '--problem', 'heat']))

    def test_main_usage_errors(self):
        with _Quiet():
            self.assertEqual(2, cli.main([]))
            self.assertEqual(2, cli.main(['run', '--config', os.path.join(self.root, 'missing.ini')]))
            self.assertEqual(0, cli.main(['--version']))

# coding: utf-8

"""
Experiment configuration, data generation, orchestration and reporting.
Exports the following items:

 - ExperimentConfig
 - build_problem()
 - main()
 - make_noise()
 - output_root()
 - run()
 - verify_suite()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import argparse
import csv
import io
import json
import logging
import os
import sys
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from configparser import ConfigParser, Error as ConfigParserError
except ImportError:
    from ConfigParser import SafeConfigParser as ConfigParser, Error as ConfigParserError

from . import __version__
from ._errors import pretty_message
from ._expr import parse_expr
from ._types import type_name, is_real
from .errors import ConfigurationError, RangeInvarError
from .numerics import WeightedSpace, weighted_norm
from .pde import make_grid
from .problems import (
    ROBIN_SEGMENTS,
    build_diffabs_problem,
    build_potential_problem,
    build_robin_problem,
)
from .solvers import SolverConfig, solve
from .verify import SUITE_KINDS, run_suite


__all__ = [
    'CSV_COLUMNS',
    'ExperimentConfig',
    'OUTPUT_ROOT_ENV',
    'build_problem',
    'main',
    'make_noise',
    'output_root',
    'run',
    'verify_suite',
]


_log = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = 'RANGEINVAR_OUTPUT_ROOT'

CSV_COLUMNS = ('n', 'alpha', 'residual', 'penalty', 'error', 'j_spread', 'ms')

_SOLVER_TYPES = OrderedDict([
    ('method', 'str'),
    ('alpha0', 'float'),
    ('theta', 'float'),
    ('tau', 'float'),
    ('tau_apriori', 'float'),
    ('c_estimate', 'float'),
    ('max_iter', 'int'),
    ('stop_rule', 'str'),
    ('inner_iterations', 'int'),
    ('mu', 'float'),
    ('inner_tol', 'float'),
    ('var_alpha', 'float'),
    ('var_beta', 'float'),
    ('var_eta', 'float'),
])

_PROBLEM_KEYS = ('kind', 'dim', 'n', 'm', 'lambdas', 'phi', 'formulation', 'observation', 'eps_u')
_COEFFICIENT_KEYS = {'potential': ('q',), 'robin': ('q',), 'diffabs': ('c', 'a')}
_OUTPUT_KEYS = ('directory', 'formats', 'timing', 'workers')
_NOISE_KEYS = ('deltas', 'seeds')


def _unquote(value):
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ('"', "'"):
        return value[1:-1]
    return value


def _as_list(value):
    return [_unquote(part) for part in value.split(',') if part.strip()]


def _as_number(section, key, value, kind):
    try:
        if kind == 'int':
            return int(value)
        return float(value)
    except ValueError:
        raise ConfigurationError(pretty_message(
            '''
            [%s] %s must be %s, not %s
            ''',
            section,
            key,
            'an integer' if kind == 'int' else 'a number',
            repr(value)
        ))


class ExperimentConfig(object):

    """
    A parsed experiment file. Sections: [problem], [truth], [init], [noise],
    [solver] and [output], each of key = value lines; strings may be quoted
    and lists are comma separated.
    """

    kind = 'potential'
    dim = 1
    n = 33
    m = 4
    lambdas = None
    phi = 'linear'
    formulation = 'reduced'
    observation = 'boundary'
    eps_u = 1e-3
    truth = None
    init = None
    deltas = None
    seeds = None
    solver = None
    directory = 'output'
    formats = None
    timing = True
    workers = 1
    sections = None

    def __init__(self, sections):
        """
        :param sections:
            An OrderedDict of section name to OrderedDict of raw string values

        :raises:
            rangeinvar.errors.ConfigurationError - when a value is invalid
            rangeinvar.errors.ExpressionError - when an expression is invalid
        """

        self.sections = sections
        problem = sections.get('problem', {})
        self._check_keys('problem', problem, _PROBLEM_KEYS)

        self.kind = _unquote(problem.get('kind', self.kind))
        if self.kind not in _COEFFICIENT_KEYS:
            raise ConfigurationError(pretty_message(
                '''
                [problem] kind must be one of potential, robin, diffabs, not %s
                ''',
                repr(self.kind)
            ))
        default_dim = '1' if self.kind == 'potential' else '2'
        self.dim = _as_number('problem', 'dim', problem.get('dim', default_dim), 'int')
        self.n = _as_number('problem', 'n', problem.get('n', '33' if self.dim == 1 else '17'), 'int')
        self.m = _as_number('problem', 'm', problem.get('m', '4'), 'int')
        self.lambdas = [
            _as_number('problem', 'lambdas', v, 'float')
            for v in _as_list(problem.get('lambdas', '0, 1, 2, 4'))
        ]
        self.phi = _unquote(problem.get('phi', self.phi))
        self.formulation = _unquote(problem.get('formulation', self.formulation))
        self.observation = _unquote(problem.get('observation', self.observation))
        self.eps_u = _as_number('problem', 'eps_u', problem.get('eps_u', '1e-3'), 'float')

        names = _COEFFICIENT_KEYS[self.kind]
        self.truth = self._expressions('truth', sections.get('truth', {}), names)
        self.init = self._expressions('init', sections.get('init', {}), names)

        noise = sections.get('noise', {})
        self._check_keys('noise', noise, _NOISE_KEYS)
        self.deltas = [_as_number('noise', 'deltas', v, 'float') for v in _as_list(noise.get('deltas', '0'))]
        self.seeds = [_as_number('noise', 'seeds', v, 'int') for v in _as_list(noise.get('seeds', '0'))]
        if not self.deltas or any(d < 0.0 for d in self.deltas):
            raise ConfigurationError('[noise] deltas must be a non-empty list of non-negative numbers')
        if not self.seeds:
            raise ConfigurationError('[noise] seeds must not be empty')

        solver = sections.get('solver', {})
        self._check_keys('solver', solver, tuple(_SOLVER_TYPES))
        options = {}
        for key, value in solver.items():
            if _SOLVER_TYPES[key] == 'str':
                options[key] = _unquote(value)
            else:
                options[key] = _as_number('solver', key, value, _SOLVER_TYPES[key])
        try:
            self.solver = SolverConfig(**options)
        except (TypeError, ValueError) as e:
            raise ConfigurationError('[solver] %s' % e)

        output = sections.get('output', {})
        self._check_keys('output', output, _OUTPUT_KEYS)
        self.directory = _unquote(output.get('directory', self.directory))
        self.formats = _as_list(output.get('formats', 'csv, json'))
        for fmt in self.formats:
            if fmt not in ('csv', 'json'):
                raise ConfigurationError('[output] formats may only contain csv and json, not %r' % fmt)
        timing = _unquote(output.get('timing', 'on')).lower()
        if timing not in ('on', 'off'):
            raise ConfigurationError('[output] timing must be on or off, not %r' % timing)
        self.timing = timing == 'on'
        self.workers = _as_number('output', 'workers', output.get('workers', '1'), 'int')
        if self.workers < 1:
            raise ConfigurationError('[output] workers must be at least 1')

    @staticmethod
    def _check_keys(section, values, allowed):
        for key in values:
            if key not in allowed:
                raise ConfigurationError(pretty_message(
                    '''
                    unknown key %s in section [%s]
                    ''',
                    repr(key),
                    section
                ))

    def _expressions(self, section, values, names):
        self._check_keys(section, values, names)
        return OrderedDict((key, parse_expr(_unquote(values[key]))) for key in names if key in values)

    @classmethod
    def from_string(cls, text):
        """
        :param text:
            A unicode string of the experiment file contents

        :raises:
            rangeinvar.errors.ConfigurationError - when the file is malformed

        :return:
            An ExperimentConfig
        """

        parser = ConfigParser(interpolation=None) if sys.version_info >= (3,) else ConfigParser()
        try:
            parser.read_file(io.StringIO(text))
        except ConfigParserError as e:
            raise ConfigurationError('malformed experiment file: %s' % e)
        sections = OrderedDict()
        for name in parser.sections():
            sections[name] = OrderedDict(parser.items(name))
        for name in sections:
            if name not in ('problem', 'truth', 'init', 'noise', 'solver', 'output'):
                raise ConfigurationError('unknown section [%s]' % name)
        return cls(sections)

    @classmethod
    def from_file(cls, path):
        try:
            with io.open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except (IOError, OSError) as e:
            raise ConfigurationError('unable to read experiment file %s: %s' % (path, e))
        return cls.from_string(text)

    def to_dict(self):
        return OrderedDict((name, OrderedDict(values)) for name, values in self.sections.items())


def output_root(default):
    """
    :return:
        The output directory: the RANGEINVAR_OUTPUT_ROOT environment variable
        when set, otherwise default
    """

    return os.environ.get(OUTPUT_ROOT_ENV) or default


def make_noise(y, delta, seed, space=None):
    """
    Adds noise of exactly the norm delta to the data

    :param y:
        A numpy array of exact data

    :param delta:
        A non-negative real noise level

    :param seed:
        An integer seed

    :param space:
        None for unit weights, or the WeightedSpace of y

    :return:
        A numpy array y_delta with |y - y_delta| = delta
    """

    if not is_real(delta) or delta < 0.0:
        raise ValueError(pretty_message(
            '''
            delta must be a non-negative real - is %s
            ''',
            repr(delta)
        ))
    y = np.asarray(y, dtype=np.float64)
    if delta == 0.0:
        return y.copy()
    if space is None:
        space = WeightedSpace.euclidean(y.shape[0])
    rng = np.random.default_rng(seed)
    while True:
        e = rng.standard_normal(y.shape[0])
        norm = weighted_norm(space, e)
        if norm > 0.0:
            break
    return y + delta * e / norm


def _coefficient(config, grid, which, name, default, segment=None):
    expressions = getattr(config, which)
    if name in expressions:
        return expressions[name].on_grid(grid, segment)
    return default


def build_problem(config):
    """
    Builds the problem an ExperimentConfig describes, truth included

    :param config:
        An ExperimentConfig

    :raises:
        rangeinvar.errors.ConfigurationError - when the truth is missing

    :return:
        A ProblemInstance
    """

    if not isinstance(config, ExperimentConfig):
        raise TypeError(pretty_message(
            '''
            config must be an instance of ExperimentConfig, not %s
            ''',
            type_name(config)
        ))
    names = _COEFFICIENT_KEYS[config.kind]
    for name in names:
        if name not in config.truth:
            raise ConfigurationError('[truth] must define %s for the %s problem' % (name, config.kind))

    if config.kind == 'potential':
        grid = make_grid(config.dim, config.n)
        return build_potential_problem(
            grid,
            config.m,
            _coefficient(config, grid, 'init', 'q', 1.0),
            config.formulation,
            config.observation,
            truth=_coefficient(config, grid, 'truth', 'q', None),
            eps_u=config.eps_u
        )

    if config.kind == 'robin':
        grid = make_grid(2, config.n, ROBIN_SEGMENTS)
        return build_robin_problem(
            grid,
            _coefficient(config, grid, 'init', 'q', 1.0, 'robin'),
            config.phi,
            config.formulation,
            truth=_coefficient(config, grid, 'truth', 'q', None, 'robin'),
            eps_u=config.eps_u
        )

    grid = make_grid(config.dim, config.n)
    return build_diffabs_problem(
        grid,
        config.lambdas,
        config.m,
        _coefficient(config, grid, 'init', 'c', 5.0),
        _coefficient(config, grid, 'init', 'a', 1.0),
        config.formulation,
        config.observation,
        truth=(_coefficient(config, grid, 'truth', 'c', None), _coefficient(config, grid, 'truth', 'a', None)),
        eps_u=config.eps_u
    )


def _number(value):
    if value is None:
        return ''
    return '%.17e' % value


def _write_csv(path, record, timing):
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for entry, ms in zip(record.entries, record.timings):
            writer.writerow([
                '%d' % entry.n,
                _number(entry.alpha),
                _number(entry.residual),
                _number(entry.penalty),
                _number(entry.error),
                _number(entry.j_spread),
                _number(ms if timing else 0.0),
            ])


def _write_json(path, data):
    with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(json.dumps(data, indent=2, separators=(',', ': ')))
        f.write('\n')


def _run_name(index, delta, seed):
    return 'run_%d_delta_%s_seed_%d' % (index, repr(float(delta)), seed)


def _run_one(config, problem, y, index, delta, seed, root):
    name = _run_name(index, delta, seed)
    directory = os.path.join(root, name)
    if not os.path.isdir(directory):
        os.makedirs(directory)

    summary = OrderedDict([('run', name), ('delta', delta), ('seed', seed), ('method', config.solver.method)])
    try:
        y_delta = make_noise(y, delta, seed, problem.data_space)
        record = solve(problem, y_delta, delta, config.solver)
    except (RangeInvarError, ValueError) as e:
        _log.error('%s failed: %s', name, e)
        summary['stop_reason'] = 'error'
        summary['error_message'] = str(e)
        summary['success'] = False
    else:
        final = record.final_entry()
        summary['stop_reason'] = record.stop_reason
        summary['iterations'] = record.iterations
        summary['initial_residual'] = record.initial_residual
        summary['final_residual'] = None if final is None else final.residual
        summary['final_error'] = None if final is None else final.error
        summary['final_relative_error'] = None if final is None else final.relative_error
        summary['final_j_spread'] = None if final is None else final.j_spread
        summary['error_message'] = record.error_message
        summary['success'] = record.stop_reason != 'error'
        if 'csv' in config.formats:
            _write_csv(os.path.join(directory, 'record.csv'), record, config.timing)

    if 'json' in config.formats:
        per_run = OrderedDict(summary)
        per_run['version'] = __version__
        per_run['config'] = config.to_dict()
        _write_json(os.path.join(directory, 'summary.json'), per_run)
    return summary


def run(config, workers=None, root=None):
    """
    Runs the configured solver for every (delta, seed) pair and writes
    record.csv and summary.json per run plus an aggregated summary.json

    :param config:
        An ExperimentConfig

    :param workers:
        None for config.workers, or the number of concurrent runs

    :param root:
        None for the configured output directory; RANGEINVAR_OUTPUT_ROOT
        overrides both

    :return:
        0 when every run succeeded, 1 otherwise
    """

    root = output_root(root or config.directory)
    if not os.path.isdir(root):
        os.makedirs(root)
    workers = workers or config.workers

    aggregate = OrderedDict([('version', __version__), ('config', config.to_dict()), ('runs', [])])
    try:
        problem = build_problem(config)
        y = problem.forward(problem.truth)
        problem.frozen_k()
    except RangeInvarError as e:
        _log.error('unable to build the problem: %s', e)
        aggregate['error_message'] = str(e)
        aggregate['success'] = False
        _write_json(os.path.join(root, 'summary.json'), aggregate)
        print('error: %s' % e, file=sys.stderr)
        return 1

    jobs = []
    index = 0
    for delta in config.deltas:
        for seed in config.seeds:
            jobs.append((index, delta, seed))
            index += 1

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_one, config, problem, y, i, d, s, root) for i, d, s in jobs]
            summaries = [future.result() for future in futures]
    else:
        summaries = [_run_one(config, problem, y, i, d, s, root) for i, d, s in jobs]

    aggregate['runs'] = summaries
    aggregate['success'] = all(s['success'] for s in summaries)
    _write_json(os.path.join(root, 'summary.json'), aggregate)

    for summary in summaries:
        error = summary.get('final_error')
        print('%-40s %-12s %s' % (
            summary['run'],
            summary['stop_reason'],
            'n/a' if error is None else '%.6e' % error
        ))
    return 0 if aggregate['success'] else 1


def verify_suite(kind, json_path=None, root=None):
    """
    Runs the audit suite, writes audit.json and prints a pass/fail table

    :param kind:
        "all" or one of "potential", "robin", "diffabs"

    :param json_path:
        None for audit.json in the output root, or a file path

    :return:
        0 when every audit passed, 1 when one failed, 2 for an unknown kind
    """

    try:
        reports = run_suite(kind)
    except ConfigurationError as e:
        print('error: %s' % e, file=sys.stderr)
        return 2
    if json_path is None:
        directory = output_root(root or 'output')
        if not os.path.isdir(directory):
            os.makedirs(directory)
        json_path = os.path.join(directory, 'audit.json')

    data = OrderedDict([
        ('version', __version__),
        ('problem', kind),
        ('passed', all(r.passed for r in reports if not r.context_only)),
        ('reports', [r.to_dict() for r in reports]),
    ])
    _write_json(json_path, data)

    for report in reports:
        status = 'context' if report.context_only else ('pass' if report.passed else 'FAIL')
        print('%-24s %-36s %s' % (report.check, report.instance, status))
    return 0 if data['passed'] else 1


def _parser():
    parser = argparse.ArgumentParser(prog='rangeinvar', description='Range invariant inverse problem experiments')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug logging')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command')

    run_parser = commands.add_parser('run', help='run the experiment of a config file')
    run_parser.add_argument('--config', required=True, help='path of the experiment file')

    sweep_parser = commands.add_parser('sweep', help='run all (delta, seed) pairs of a config file concurrently')
    sweep_parser.add_argument('--config', required=True, help='path of the experiment file')
    sweep_parser.add_argument('--workers', type=int, default=None, help='concurrent runs')

    verify_parser = commands.add_parser('verify', help='run the audit suite')
    verify_parser.add_argument('--problem', required=True, choices=list(SUITE_KINDS) + ['all'])
    verify_parser.add_argument('--json', default=None, help='path of the audit.json to write')
    return parser


def main(argv=None):
    """
    :param argv:
        None for sys.argv[1:], or a list of unicode strings

    :return:
        An integer exit status: 0 on success, 1 on failure, 2 on a usage error
    """

    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    if args.command == 'verify':
        return verify_suite(args.problem, args.json)

    try:
        config = ExperimentConfig.from_file(args.config)
    except (ConfigurationError, ValueError) as e:
        print('error: %s' % e, file=sys.stderr)
        return 2

    if args.command == 'sweep':
        if args.workers is not None and args.workers < 1:
            print('error: --workers must be at least 1', file=sys.stderr)
            return 2
        return run(config, args.workers or max(config.workers, 2))
    return run(config, 1)

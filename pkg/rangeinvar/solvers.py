# coding: utf-8

"""
Iterative regularization methods built on the frozen operator K = F'(x0).
Exports the following items:

 - IterationEntry
 - RunRecord
 - SolverConfig
 - alt_frozen_newton()
 - apriori_budget()
 - frozen_newton()
 - newton()
 - solve()
 - stop_apriori()
 - stop_discrepancy()
 - variational()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging
import math
import time

import numpy as np

from ._errors import pretty_message
from ._problem import ProblemInstance
from ._types import type_name, int_types, is_real, as_vector
from .errors import RangeInvarError
from .numerics import adjoint, solve_gram, weighted_norm


__all__ = [
    'IterationEntry',
    'METHODS',
    'RunRecord',
    'STOP_RULES',
    'SolverConfig',
    'alt_frozen_newton',
    'apriori_budget',
    'frozen_newton',
    'newton',
    'solve',
    'stop_apriori',
    'stop_discrepancy',
    'variational',
]


_log = logging.getLogger(__name__)

METHODS = ('frozen_newton', 'newton', 'alt_frozen_newton', 'variational')

STOP_RULES = ('discrepancy', 'apriori', 'none')

STOP_REASONS = ('discrepancy', 'apriori', 'max_iter', 'tolerance', 'error')


class SolverConfig(object):

    """
    Parameters of a solver run, validated on construction
    """

    method = 'frozen_newton'
    alpha0 = 1.0
    theta = 0.5
    tau = 1.5
    tau_apriori = 1.0
    c_estimate = 0.5
    max_iter = 50
    stop_rule = 'discrepancy'
    inner_iterations = 5
    mu = 1e-8
    inner_tol = 1e-10
    var_alpha = None
    var_beta = None
    var_eta = None

    _FIELDS = (
        'method', 'alpha0', 'theta', 'tau', 'tau_apriori', 'c_estimate', 'max_iter', 'stop_rule',
        'inner_iterations', 'mu', 'inner_tol', 'var_alpha', 'var_beta', 'var_eta'
    )

    def __init__(self, **kwargs):
        """
        :param kwargs:
            Any of method, alpha0, theta, tau, tau_apriori, c_estimate,
            max_iter, stop_rule, inner_iterations, mu, inner_tol, var_alpha,
            var_beta, var_eta

        :raises:
            TypeError - when an unknown field or a value of the wrong type is given
            ValueError - when a value is out of range
        """

        for key, value in kwargs.items():
            if key not in self._FIELDS:
                raise TypeError(pretty_message(
                    '''
                    unknown solver option %s
                    ''',
                    repr(key)
                ))
            setattr(self, key, value)
        self.validate()

    def _positive(self, name, allow_none=False):
        value = getattr(self, name)
        if value is None and allow_none:
            return
        if not is_real(value):
            raise TypeError(pretty_message(
                '''
                %s must be a real number, not %s
                ''',
                name,
                type_name(value)
            ))
        if not value > 0.0:
            raise ValueError(pretty_message(
                '''
                %s must be positive - is %s
                ''',
                name,
                repr(value)
            ))

    def _count(self, name):
        value = getattr(self, name)
        if not isinstance(value, int_types) or isinstance(value, bool):
            raise TypeError(pretty_message(
                '''
                %s must be an integer, not %s
                ''',
                name,
                type_name(value)
            ))
        if value < 1:
            raise ValueError(pretty_message(
                '''
                %s must be at least 1 - is %s
                ''',
                name,
                repr(value)
            ))

    def validate(self):
        if self.method not in METHODS:
            raise ValueError(pretty_message(
                '''
                method must be one of %s, not %s
                ''',
                ', '.join(METHODS),
                repr(self.method)
            ))
        if self.stop_rule not in STOP_RULES:
            raise ValueError(pretty_message(
                '''
                stop_rule must be one of %s, not %s
                ''',
                ', '.join(STOP_RULES),
                repr(self.stop_rule)
            ))
        for name in ('alpha0', 'theta', 'tau', 'tau_apriori', 'c_estimate', 'mu', 'inner_tol'):
            self._positive(name)
        for name in ('var_alpha', 'var_beta', 'var_eta'):
            self._positive(name, allow_none=True)
        self._count('max_iter')
        self._count('inner_iterations')

        if not self.theta < 1.0:
            raise ValueError(pretty_message(
                '''
                theta must lie in (0, 1) - is %s
                ''',
                repr(self.theta)
            ))
        if not self.c_estimate < 1.0:
            raise ValueError(pretty_message(
                '''
                c_estimate must lie in (0, 1) - is %s
                ''',
                repr(self.c_estimate)
            ))
        if not self.tau > 1.0:
            raise ValueError(pretty_message(
                '''
                tau must be greater than 1 - is %s
                ''',
                repr(self.tau)
            ))
        if not self.theta > self.c_estimate ** 2:
            raise ValueError(pretty_message(
                '''
                theta (%s) must exceed c_estimate squared (%s) for the a-priori
                budget to stay bounded
                ''',
                repr(self.theta),
                repr(self.c_estimate ** 2)
            ))

    def alpha(self, n):
        """
        :return:
            The regularization parameter alpha0 * theta^n
        """

        return self.alpha0 * self.theta ** n

    def to_dict(self):
        return dict((name, getattr(self, name)) for name in self._FIELDS)

    def __repr__(self):
        return 'SolverConfig(%s)' % ', '.join('%s=%r' % (k, getattr(self, k)) for k in self._FIELDS)


class IterationEntry(object):

    """
    The measurements taken at the iterate x_n
    """

    n = None
    alpha = None
    residual = None
    penalty = None
    error = None
    relative_error = None
    j_spread = None
    extras = None

    def __init__(self, n, alpha, residual, penalty, error, relative_error, j_spread, extras=None):
        self.n = n
        self.alpha = alpha
        self.residual = residual
        self.penalty = penalty
        self.error = error
        self.relative_error = relative_error
        self.j_spread = j_spread
        self.extras = extras or {}

    def to_dict(self):
        out = {
            'n': self.n,
            'alpha': self.alpha,
            'residual': self.residual,
            'penalty': self.penalty,
            'error': self.error,
            'relative_error': self.relative_error,
            'j_spread': self.j_spread,
        }
        out.update(self.extras)
        return out

    def __eq__(self, other):
        return isinstance(other, IterationEntry) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return 'IterationEntry(n=%d, alpha=%.3e, residual=%.3e)' % (self.n, self.alpha, self.residual)


class RunRecord(object):

    """
    The history of a solver run. Wall times are kept in timings, apart from
    the entries, so that records of identical runs compare equal.
    """

    method = None
    entries = None
    timings = None
    initial_residual = None
    final = None
    error_message = None
    _stop_reason = None

    def __init__(self, method):
        self.method = method
        self.entries = []
        self.timings = []

    @property
    def stop_reason(self):
        return self._stop_reason

    def stop(self, reason, message=None):
        """
        Sets the stop reason

        :param reason:
            One of "discrepancy", "apriori", "max_iter", "tolerance", "error"

        :raises:
            ValueError - when the reason is unknown or was already set
        """

        if reason not in STOP_REASONS:
            raise ValueError('unknown stop reason %r' % reason)
        if self._stop_reason is not None:
            raise ValueError(pretty_message(
                '''
                stop reason already set to %s
                ''',
                repr(self._stop_reason)
            ))
        self._stop_reason = reason
        self.error_message = message

    def append(self, entry, ms):
        self.entries.append(entry)
        self.timings.append(ms)

    @property
    def iterations(self):
        return len(self.entries)

    def final_entry(self):
        return self.entries[-1] if self.entries else None

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return False
        if self.method != other.method or self.stop_reason != other.stop_reason:
            return False
        if self.entries != other.entries:
            return False
        if (self.final is None) != (other.final is None):
            return False
        if self.final is not None:
            mine = np.concatenate(self.final.slices + self.final.shared)
            theirs = np.concatenate(other.final.slices + other.final.shared)
            return mine.shape == theirs.shape and bool(np.all(mine == theirs))
        return True

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return 'RunRecord(%s, %d iterations, stop_reason=%r)' % (self.method, len(self.entries), self.stop_reason)


def stop_discrepancy(residual, delta, tau):
    """
    :return:
        True when residual <= tau * delta; never for delta = 0
    """

    if delta <= 0.0:
        return False
    return residual <= tau * delta


def apriori_budget(cfg, delta, n):
    """
    :return:
        delta * sum_{j=0}^{n-1} c^j alpha_{n-j-1}^(-1/2)
    """

    total = 0.0
    for j in range(n):
        total += cfg.c_estimate ** j / math.sqrt(cfg.alpha(n - j - 1))
    return delta * total


def stop_apriori(cfg, delta, n):
    """
    :param cfg:
        A SolverConfig

    :param delta:
        The noise level

    :param n:
        The index of the iterate about to be computed

    :return:
        True when the a-priori budget at n exceeds cfg.tau_apriori
    """

    if delta <= 0.0:
        return False
    return apriori_budget(cfg, delta, n) > cfg.tau_apriori


def _check_inputs(problem, y_delta, delta, cfg):
    if not isinstance(problem, ProblemInstance):
        raise TypeError(pretty_message(
            '''
            problem must be an instance of ProblemInstance, not %s
            ''',
            type_name(problem)
        ))
    if not isinstance(cfg, SolverConfig):
        raise TypeError(pretty_message(
            '''
            cfg must be an instance of SolverConfig, not %s
            ''',
            type_name(cfg)
        ))
    if not is_real(delta) or delta < 0.0:
        raise ValueError(pretty_message(
            '''
            delta must be a non-negative real - is %s
            ''',
            repr(delta)
        ))
    return as_vector(y_delta, 'y_delta', problem.data_space.dim)


class _Run(object):

    """
    Bookkeeping shared by the solvers: measuring iterates, the stopping
    rules and the run record
    """

    def __init__(self, problem, y_delta, delta, cfg, method):
        self.problem = problem
        self.y_delta = y_delta
        self.delta = float(delta)
        self.cfg = cfg
        self.record = RunRecord(method)
        self.penalty = problem.penalty_op()
        self.started = time.time()

    def residual(self, data):
        return weighted_norm(self.problem.data_space, data - self.y_delta)

    def measure(self, n, alpha, x, data, extras=None):
        problem = self.problem
        penalty = weighted_norm(self.penalty.codomain, self.penalty.apply(problem.pack(x)))
        error = relative = None
        if problem.truth is not None:
            error = problem.absolute_error(x)
            relative = problem.relative_error(x)
        entry = IterationEntry(n, alpha, self.residual(data), penalty, error, relative, problem.j_spread(x), extras)
        now = time.time()
        self.record.append(entry, (now - self.started) * 1000.0)
        self.started = now
        _log.debug(
            '%s n=%d alpha=%.3e residual=%.6e error=%s',
            self.record.method,
            n,
            alpha,
            entry.residual,
            'n/a' if error is None else '%.6e' % error
        )
        return entry

    def discrepancy_reached(self, residual):
        return self.cfg.stop_rule == 'discrepancy' and stop_discrepancy(residual, self.delta, self.cfg.tau)

    def apriori_reached(self, n):
        return self.cfg.stop_rule == 'apriori' and stop_apriori(self.cfg, self.delta, n)

    def finish(self, x, reason, message=None):
        self.record.final = x
        self.record.stop(reason, message)
        final = self.record.final_entry()
        _log.info(
            '%s stopped after %d iterations (%s), residual %s',
            self.record.method,
            self.record.iterations,
            reason,
            'n/a' if final is None else '%.6e' % final.residual
        )
        return self.record


def _newton_type(problem, y_delta, delta, cfg, method, step):
    run = _Run(problem, y_delta, delta, cfg, method)
    x = problem.x0.copy()
    try:
        data = problem.forward(x)
        run.record.initial_residual = run.residual(data)
        if run.discrepancy_reached(run.record.initial_residual):
            return run.finish(x, 'discrepancy')

        for n in range(cfg.max_iter):
            if run.apriori_reached(n + 1):
                return run.finish(x, 'apriori')
            alpha = cfg.alpha(n)
            vector, extras = step(problem, run, x, data, alpha)
            x = problem.unpack(vector)
            data = problem.forward(x)
            entry = run.measure(n + 1, alpha, x, data, extras)
            if run.discrepancy_reached(entry.residual):
                return run.finish(x, 'discrepancy')

    except RangeInvarError as e:
        _log.warning('%s aborted: %s', method, e)
        return run.finish(x, 'error', str(e))

    return run.finish(x, 'max_iter')


def frozen_newton(problem, y_delta, delta, cfg):
    """
    Runs the frozen Newton method
    x_{n+1} = x_n + (K*K + P*P + alpha_n)^-1 (K*(y - F(x_n)) - P*P x_n + alpha_n (x0 - x_n))

    :param problem:
        A ProblemInstance

    :param y_delta:
        A vector of the data space

    :param delta:
        The noise level, >= 0

    :param cfg:
        A SolverConfig

    :return:
        A RunRecord
    """

    y_delta = _check_inputs(problem, y_delta, delta, cfg)
    K = problem.frozen_k()
    K_adj = adjoint(K)
    x0 = problem.pack(problem.x0)

    def step(problem, run, x, data, alpha):
        current = problem.pack(x)
        P = run.penalty
        rhs = K_adj.apply(run.y_delta - data) \
            - adjoint(P).apply(P.apply(current)) \
            + alpha * (x0 - current)
        return current + solve_gram([(1.0, K), (1.0, P)], alpha, rhs), None

    return _newton_type(problem, y_delta, delta, cfg, 'frozen_newton', step)


def newton(problem, y_delta, delta, cfg):
    """
    Runs the Newton method written in terms of the r-map, solving
    ((K R)*(K R) + P*P + alpha R*R) s = (K R)*(y - K r(x_n) - F(x0)) - P*P x_n - alpha R* r(x_n)
    with R = r'(x_n)

    :return:
        A RunRecord
    """

    y_delta = _check_inputs(problem, y_delta, delta, cfg)
    K = problem.frozen_k()
    y0 = problem.forward(problem.x0)

    def step(problem, run, x, data, alpha):
        current = problem.pack(x)
        P = run.penalty
        R = problem.r_prime(x)
        KR = K.compose(R)
        r = problem.r_map(x)
        rhs = adjoint(KR).apply(run.y_delta - K.apply(r) - y0) \
            - adjoint(P).apply(P.apply(current)) \
            - alpha * adjoint(R).apply(r)
        return current + solve_gram([(1.0, KR), (1.0, P), (alpha, R)], 0.0, rhs), None

    return _newton_type(problem, y_delta, delta, cfg, 'newton', step)


def alt_frozen_newton(problem, y_delta, delta, cfg):
    """
    Runs the frozen Newton method with r'(x_n) replaced by r'(x0) = id,
    predicting the data by F(x0) + K r(x_n). Each step records the relative
    residual of F(x_n) - F(x0) = K r(x_n).

    :return:
        A RunRecord
    """

    y_delta = _check_inputs(problem, y_delta, delta, cfg)
    K = problem.frozen_k()
    K_adj = adjoint(K)
    y0 = problem.forward(problem.x0)
    space = problem.data_space

    def step(problem, run, x, data, alpha):
        current = problem.pack(x)
        P = run.penalty
        r = problem.r_map(x)
        predicted = y0 + K.apply(r)
        change = weighted_norm(space, data - y0)
        identity = weighted_norm(space, data - predicted) / max(change, 1e-300)
        if change > 0.0 and identity > 1e-9:
            _log.warning('range invariance residual %.3e at iterate %d', identity, run.record.iterations)
        else:
            _log.debug('range invariance residual %.3e', identity)
        rhs = K_adj.apply(run.y_delta - predicted) \
            - adjoint(P).apply(P.apply(current)) \
            - alpha * r
        vector = current + solve_gram([(1.0, K), (1.0, P)], alpha, rhs)
        return vector, {'identity_residual': identity}

    return _newton_type(problem, y_delta, delta, cfg, 'alt_frozen_newton', step)


def variational(problem, y_delta, delta, cfg):
    """
    Minimizes ||K r_hat - (y - F(x0))||^2 + alpha ||r_hat||^2
    + beta ||r(x) - r_hat||^2 + ||P x||^2 by alternating an exact r_hat-step
    with damped Gauss-Newton steps in x. The defaults are alpha = delta,
    beta = sqrt(delta) and a stopping tolerance of delta^2 on the decrease of
    the objective.

    :raises:
        ValueError - when delta is 0 and alpha or beta are not configured

    :return:
        A RunRecord
    """

    y_delta = _check_inputs(problem, y_delta, delta, cfg)
    alpha = cfg.var_alpha if cfg.var_alpha is not None else delta
    beta = cfg.var_beta if cfg.var_beta is not None else math.sqrt(delta)
    eta = cfg.var_eta if cfg.var_eta is not None else delta ** 2
    if not alpha > 0.0 or not beta > 0.0:
        raise ValueError(pretty_message(
            '''
            the variational method requires delta > 0 or explicit var_alpha
            and var_beta
            '''
        ))

    K = problem.frozen_k()
    K_adj = adjoint(K)
    domain = problem.domain
    run = _Run(problem, y_delta, delta, cfg, 'variational')
    P = run.penalty
    P_adj = adjoint(P)
    x = problem.x0.copy()

    try:
        y0 = problem.forward(problem.x0)
        target = y_delta - y0
        run.record.initial_residual = run.residual(y0)
        previous = None

        for n in range(cfg.max_iter):
            r = problem.r_map(x)
            r_hat = solve_gram([(1.0, K)], alpha + beta, K_adj.apply(target) + beta * r)

            current = problem.pack(x)
            for _ in range(cfg.inner_iterations):
                R = problem.r_prime(problem.unpack(current))
                r = problem.r_map(problem.unpack(current))
                rhs = -(beta * adjoint(R).apply(r - r_hat) + P_adj.apply(P.apply(current)))
                update = solve_gram([(beta, R), (1.0, P)], cfg.mu, rhs)
                current = current + update
                if weighted_norm(domain, update) <= cfg.inner_tol * (1.0 + weighted_norm(domain, current)):
                    break
            x = problem.unpack(current)
            r = problem.r_map(x)

            j_alpha = weighted_norm(K.codomain, K.apply(r_hat) - target) ** 2 \
                + alpha * weighted_norm(domain, r_hat) ** 2
            j_beta = beta * weighted_norm(domain, r - r_hat) ** 2
            j_penalty = weighted_norm(P.codomain, P.apply(current)) ** 2
            objective = j_alpha + j_beta + j_penalty

            data = problem.forward(x)
            extras = {'j_alpha': j_alpha, 'j_beta': j_beta, 'j_penalty': j_penalty, 'objective': objective}
            entry = run.measure(n + 1, alpha, x, data, extras)
            if run.discrepancy_reached(entry.residual):
                return run.finish(x, 'discrepancy')
            if previous is not None and previous - objective <= eta:
                return run.finish(x, 'tolerance')
            previous = objective

    except RangeInvarError as e:
        _log.warning('variational aborted: %s', e)
        return run.finish(x, 'error', str(e))

    return run.finish(x, 'max_iter')


_DISPATCH = {
    'frozen_newton': frozen_newton,
    'newton': newton,
    'alt_frozen_newton': alt_frozen_newton,
    'variational': variational,
}


def solve(problem, y_delta, delta, cfg):
    """
    Runs the method named by cfg.method

    :return:
        A RunRecord
    """

    if not isinstance(cfg, SolverConfig):
        raise TypeError(pretty_message(
            '''
            cfg must be an instance of SolverConfig, not %s
            ''',
            type_name(cfg)
        ))
    return _DISPATCH[cfg.method](problem, y_delta, delta, cfg)

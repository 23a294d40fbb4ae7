# coding: utf-8

"""
Builders of the identification problems and the functions of their common
contract. Exports the following items:

 - ExtendedParam
 - ProblemInstance
 - ROBIN_SEGMENTS
 - build_diffabs_problem()
 - build_model_problem()
 - build_potential_problem()
 - build_robin_problem()
 - collapse()
 - default_problem()
 - forward()
 - frozen_k()
 - penalty_op()
 - r_map()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging

import numpy as np

from ._diffabs import DiffAbsProblem, positive_fluxes
from ._errors import pretty_message
from ._model import ModelProblem
from ._potential import PotentialProblem, default_fluxes
from ._problem import ExtendedParam, ProblemInstance
from ._robin import RobinProblem
from ._types import type_name, int_types, as_vector
from .errors import ConfigurationError, DimensionError
from .pde import Field, Grid, make_grid


__all__ = [
    'DEFAULT_PROBLEMS',
    'ExtendedParam',
    'ProblemInstance',
    'ROBIN_SEGMENTS',
    'build_diffabs_problem',
    'build_model_problem',
    'build_potential_problem',
    'build_robin_problem',
    'collapse',
    'default_problem',
    'forward',
    'frozen_k',
    'penalty_op',
    'r_map',
]


_log = logging.getLogger(__name__)

ROBIN_SEGMENTS = [
    ('dirichlet', ('left', 'right')),
    ('robin', ('bottom',)),
    ('neumann', ('top',)),
]

DEFAULT_PROBLEMS = ('potential1d', 'potential2d', 'robin', 'robin_tanh', 'diffabs')

OBSERVATIONS = ('boundary', 'interior')


def _check_grid(grid):
    if not isinstance(grid, Grid):
        raise TypeError(pretty_message(
            '''
            grid must be an instance of rangeinvar.pde.Grid, not %s
            ''',
            type_name(grid)
        ))


def _check_observation(observation):
    if observation not in OBSERVATIONS:
        raise ConfigurationError(pretty_message(
            '''
            observation must be "boundary" or "interior", not %s
            ''',
            repr(observation)
        ))


def _values(grid, value, name, segment=None):
    """
    Turns a Field, vector or scalar into the values on the nodes of grid, or
    of one of its segments
    """

    length = grid.node_count if segment is None else grid.segment(segment).shape[0]
    if isinstance(value, Field):
        if value.grid is not grid or value.segment != segment:
            raise DimensionError(pretty_message(
                '''
                %s must be a Field on %s of the problem grid
                ''',
                name,
                'the nodes' if segment is None else 'segment %r' % segment
            ))
        return value.values.copy()
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
        return np.full(length, float(value))
    return as_vector(value, name, length)


def _check_count(value, name):
    if not isinstance(value, int_types):
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


def build_potential_problem(grid, m, q0, formulation='reduced', observation='boundary', excitations=None,
                            truth=None, eps_u=1e-3, segment='boundary'):
    """
    Builds the identification of the potential q in -Laplace(u) + q u = 1
    from m Neumann excitations, with one extended copy of q per excitation

    :param grid:
        A Grid

    :param m:
        An integer >= 1 of experiments

    :param q0:
        A nodal Field, vector or scalar of the initial guess

    :param formulation:
        "reduced" or "all-at-once"

    :param observation:
        "boundary" for traces on the excited segment, "interior" for all
        nodal values

    :param excitations:
        None for the default cosine fluxes, or a list of m flux vectors on
        the segment

    :param truth:
        None, or a nodal Field, vector or scalar of the exact potential

    :param eps_u:
        The smallest admissible |u0|

    :param segment:
        The unicode string name of the excited segment

    :raises:
        rangeinvar.errors.SolvabilityError - when q0 is outside D(F)
        rangeinvar.errors.DenominatorError - when min |u0| < eps_u

    :return:
        A ProblemInstance
    """

    _check_grid(grid)
    _check_count(m, 'm')
    _check_observation(observation)
    if excitations is None:
        fluxes = default_fluxes(grid, segment, m)
    else:
        if len(excitations) != m:
            raise ValueError(pretty_message(
                '''
                excitations must have m = %d entries, has %d
                ''',
                m,
                len(excitations)
            ))
        fluxes = [_values(grid, flux, 'excitations[%d]' % i, segment) for i, flux in enumerate(excitations)]
    q0 = _values(grid, q0, 'q0')
    if truth is not None:
        truth = _values(grid, truth, 'truth')
    return PotentialProblem(grid, q0, fluxes, formulation, observation, segment, truth, eps_u)


def build_robin_problem(grid, q0, phi_kind='linear', formulation='reduced', truth=None, eps_u=1e-3):
    """
    Builds the identification of the Robin coefficient on the bottom edge of
    a 2-D grid partitioned by ROBIN_SEGMENTS

    :param grid:
        A 2-D Grid with "dirichlet", "robin" and "neumann" segments

    :param q0:
        A Field on the "robin" segment, vector or scalar, >= 0

    :param phi_kind:
        "linear" for Phi(s) = s, "tanh" for Phi(s) = s + tanh(s) / 2

    :raises:
        rangeinvar.errors.AdmissibilityError - when q0 has negative values

    :return:
        A ProblemInstance
    """

    _check_grid(grid)
    if grid.dim != 2:
        raise ConfigurationError('the Robin problem requires a 2-D grid')
    for name, _ in ROBIN_SEGMENTS:
        grid.segment(name)
    q0 = _values(grid, q0, 'q0', 'robin')
    if truth is not None:
        truth = _values(grid, truth, 'truth', 'robin')
    return RobinProblem(grid, q0, phi_kind, formulation, truth, eps_u)


def build_diffabs_problem(grid, lambdas, m, c0=5.0, a0=1.0, formulation='reduced', observation='boundary',
                          truth=None, eps_u=1e-3, segment='boundary'):
    """
    Builds the joint identification of the absorption c and the diffusion a
    from m Neumann excitations at each spectral shift lambda

    :param lambdas:
        A non-empty list of shifts

    :param m:
        An integer >= 1 of excitations per shift

    :param c0:
        A nodal Field, vector or scalar of the initial absorption

    :param a0:
        A nodal Field, vector or scalar of the initial diffusion, > 0

    :param truth:
        None, or a 2-element tuple (c, a) of the exact coefficients

    :raises:
        rangeinvar.errors.ResonanceError - when a shift is within 1e-6 of
        an eigenvalue of the unshifted operator
        rangeinvar.errors.CoefficientError - when a0 is not positive

    :return:
        A ProblemInstance
    """

    _check_grid(grid)
    _check_count(m, 'm')
    _check_observation(observation)
    if not isinstance(lambdas, (list, tuple, np.ndarray)) or len(lambdas) < 1:
        raise ValueError(pretty_message(
            '''
            lambdas must be a non-empty list of shifts, not %s
            ''',
            type_name(lambdas)
        ))
    lambdas = as_vector(lambdas, 'lambdas')
    c0 = _values(grid, c0, 'c0')
    a0 = _values(grid, a0, 'a0')
    if truth is not None:
        if not isinstance(truth, (list, tuple)) or len(truth) != 2:
            raise TypeError(pretty_message(
                '''
                truth must be a 2-element tuple (c, a), not %s
                ''',
                type_name(truth)
            ))
        truth = (_values(grid, truth[0], 'truth c'), _values(grid, truth[1], 'truth a'))
    fluxes = positive_fluxes(grid, segment, m)
    return DiffAbsProblem(grid, lambdas, fluxes, c0, a0, formulation, observation, segment, truth, eps_u)


def build_model_problem(K, x0, r=None, r_prime=None, P=None, truth=None, y0=None):
    """
    Builds a finite-dimensional problem F(x) = F(x0) + K r(x)

    :param K:
        A LinOpRep

    :param x0:
        A vector of K.domain

    :param r:
        None for r(x) = x - x0, or a callable mapping vectors to vectors

    :param r_prime:
        None, or a callable returning the Jacobian matrix of r

    :param P:
        None for P = 0, or a LinOpRep on K.domain

    :param truth:
        None, or a vector of K.domain

    :param y0:
        None for F(x0) = K x0, or a vector of K.codomain

    :return:
        A ProblemInstance
    """

    return ModelProblem(K, x0, r, r_prime, P, truth, y0)


def _check_problem(problem):
    if not isinstance(problem, ProblemInstance):
        raise TypeError(pretty_message(
            '''
            problem must be an instance of ProblemInstance, not %s
            ''',
            type_name(problem)
        ))


def forward(problem, x):
    """
    :return:
        A numpy array F(x) in the data space of problem
    """

    _check_problem(problem)
    return problem.forward(x)


def frozen_k(problem):
    """
    :return:
        A LinOpRep K = F'(x0)
    """

    _check_problem(problem)
    return problem.frozen_k()


def r_map(problem, x, correction_sign=1.0):
    """
    :param correction_sign:
        1.0 for the r-map with F(x) - F(x0) = K r(x), -1.0 for the variant
        with the state correction subtracted

    :return:
        A numpy array r(x) in the domain of problem
    """

    _check_problem(problem)
    return problem.r_map(x, correction_sign)


def penalty_op(problem):
    _check_problem(problem)
    return problem.penalty_op()


def collapse(x):
    """
    :param x:
        An ExtendedParam

    :return:
        A numpy array of the weighted mean of the slices of x
    """

    if not isinstance(x, ExtendedParam):
        raise TypeError(pretty_message(
            '''
            x must be an instance of ExtendedParam, not %s
            ''',
            type_name(x)
        ))
    return x.collapse()


def default_problem(name, formulation='reduced', observation='boundary', n=None):
    """
    Builds one of the default instances with its truth configured

    :param name:
        One of "potential1d", "potential2d", "robin", "robin_tanh", "diffabs"

    :param n:
        None for the default grid size, or nodes per axis

    :return:
        A ProblemInstance
    """

    if name not in DEFAULT_PROBLEMS:
        raise ConfigurationError(pretty_message(
            '''
            unknown problem %s - must be one of %s
            ''',
            repr(name),
            ', '.join(DEFAULT_PROBLEMS)
        ))

    if name == 'potential1d':
        grid = make_grid(1, n or 33)
        x = grid.coordinates(0)
        truth = 1.0 + 0.5 * np.sin(np.pi * x)
        problem = build_potential_problem(grid, 4, 1.0, formulation, observation, truth=truth)

    elif name == 'potential2d':
        grid = make_grid(2, n or 17)
        x, y = grid.coordinates(0), grid.coordinates(1)
        truth = 1.0 + 0.5 * np.sin(np.pi * x) * np.sin(np.pi * y)
        problem = build_potential_problem(grid, 4, 1.0, formulation, observation, truth=truth)

    elif name in ('robin', 'robin_tanh'):
        grid = make_grid(2, n or 17, ROBIN_SEGMENTS)
        s = grid.coordinates(0, 'robin')
        truth = 1.0 + 0.5 * s * (1.0 - s)
        phi_kind = 'tanh' if name == 'robin_tanh' else 'linear'
        problem = build_robin_problem(grid, 1.0, phi_kind, formulation, truth=truth)

    else:
        grid = make_grid(2, n or 17)
        x, y = grid.coordinates(0), grid.coordinates(1)
        truth = (5.0 + 0.1 * np.sin(np.pi * x) * np.sin(np.pi * y), 1.0 + 0.02 * x * y)
        problem = build_diffabs_problem(grid, [0.0, 1.0, 2.0, 4.0], 4, 5.0, 1.0, formulation, observation,
                                        truth=truth)

    _log.debug('built default problem %s (%s, %s observation)', name, formulation, observation)
    return problem

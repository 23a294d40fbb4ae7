# coding: utf-8

"""
Extended parameters and the forward-problem contract shared by every
identification problem. A PDE problem is described per experiment j by

    D_j u + B_j(u) q - f_j = 0,    y_j = C_j u

where q holds the experiment's slice of the extended coefficient and the
shared coefficients, and B_j(u) q is linear in q. The slice enters through
B0_j(u) dq = E^T (w * den_j(u) * dq) with E the restriction of state values
to the support of the slice. Everything else (the frozen operator, the
r-map, the all-at-once system) is derived from these pieces here.
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging

import numpy as np

from ._errors import pretty_message
from ._types import type_name, as_vector
from .errors import ConfigurationError, DenominatorError, DimensionError
from .numerics import LinOpRep, WeightedSpace, adjoint, fd_jacobian
from .pde import Factorization


__all__ = [
    'Excitation',
    'ExtendedParam',
    'ObservationSetup',
    'PdeProblem',
    'ProblemInstance',
]


_log = logging.getLogger(__name__)

FORMULATIONS = ('reduced', 'all-at-once')


class ExtendedParam(object):

    """
    The unknown x: one slice of the extended coefficient per experiment, the
    experiment-independent coefficients and, in the all-at-once formulation,
    one state per experiment
    """

    slices = None
    shared = None
    state = None
    weights = None

    def __init__(self, slices, shared=(), state=None, weights=None):
        """
        :param slices:
            A non-empty list of equally long vectors, one per experiment

        :param shared:
            A list of vectors of the shared coefficients

        :param state:
            None, or a list of state vectors, one per experiment

        :param weights:
            None for equal weights, or the positive experiment weights used
            by collapse()
        """

        if not isinstance(slices, (list, tuple)) or len(slices) < 1:
            raise ValueError('slices must be a non-empty list of vectors')

        self.slices = [as_vector(s, 'slices[%d]' % i) for i, s in enumerate(slices)]
        length = self.slices[0].shape[0]
        for i, values in enumerate(self.slices):
            if values.shape[0] != length:
                raise DimensionError(pretty_message(
                    '''
                    slices[%d] has length %d, slices[0] has length %d
                    ''',
                    i,
                    values.shape[0],
                    length
                ))

        self.shared = [as_vector(s, 'shared[%d]' % i) for i, s in enumerate(shared)]

        if state is not None:
            if len(state) != len(self.slices):
                raise DimensionError(pretty_message(
                    '''
                    state must have one entry per slice - has %d, expected %d
                    ''',
                    len(state),
                    len(self.slices)
                ))
            state = [as_vector(u, 'state[%d]' % i) for i, u in enumerate(state)]
        self.state = state

        if weights is None:
            weights = np.ones(len(self.slices))
        weights = as_vector(weights, 'weights', len(self.slices))
        if np.any(weights <= 0.0):
            raise ValueError('weights must all be positive')
        self.weights = weights

    @property
    def experiment_count(self):
        return len(self.slices)

    def copy(self):
        return ExtendedParam(
            [s.copy() for s in self.slices],
            [s.copy() for s in self.shared],
            None if self.state is None else [u.copy() for u in self.state],
            self.weights.copy()
        )

    def collapse(self):
        """
        :return:
            A numpy array of the weighted mean of the slices
        """

        stacked = np.vstack(self.slices)
        return self.weights.dot(stacked) / self.weights.sum()

    def __repr__(self):
        return 'ExtendedParam(%d slices of length %d, %d shared, state=%s)' % (
            len(self.slices),
            self.slices[0].shape[0],
            len(self.shared),
            'yes' if self.state is not None else 'no'
        )


class Excitation(object):

    """
    The data of one experiment: a boundary flux, a volume source and a
    spectral shift
    """

    flux = None
    source = None
    shift = 0.0

    def __init__(self, flux=None, source=None, shift=0.0):
        self.flux = None if flux is None else as_vector(flux, 'flux')
        self.source = None if source is None else as_vector(source, 'source')
        self.shift = float(shift)

    def same_as(self, other):
        def _same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.allclose(a, b, rtol=1e-12, atol=1e-14)
        return _same(self.flux, other.flux) and _same(self.source, other.source) \
            and self.shift == other.shift


class ObservationSetup(object):

    """
    The experiments of a problem and what is observed of each state
    """

    experiments = None
    mode = None
    segment = None
    data_space = None

    def __init__(self, experiments, mode, segment, data_space):
        """
        :param experiments:
            A non-empty list of Excitation objects, pairwise distinct

        :param mode:
            "boundary" for traces on a segment, "interior" for nodal values

        :param segment:
            The observed segment name, or None for interior observation

        :param data_space:
            The WeightedSpace Y of the concatenated observations
        """

        experiments = list(experiments)
        if not experiments:
            raise ValueError('at least one experiment is required')
        for i in range(len(experiments)):
            for k in range(i):
                if experiments[i].same_as(experiments[k]):
                    raise ConfigurationError(pretty_message(
                        '''
                        experiments %d and %d have identical excitations
                        ''',
                        k + 1,
                        i + 1
                    ))
        if mode not in ('boundary', 'interior'):
            raise ConfigurationError(pretty_message(
                '''
                observation must be "boundary" or "interior", not %s
                ''',
                repr(mode)
            ))
        self.experiments = experiments
        self.mode = mode
        self.segment = segment
        self.data_space = data_space


class ProblemInstance(object):

    """
    The contract every identification problem fulfils: a forward map F on
    extended parameters, the frozen operator K = F'(x0), the r-map with
    F(x) - F(x0) = K r(x), and the penalty P that vanishes on parameters
    constant across experiments
    """

    kind = None
    grid = None
    setup = None
    formulation = 'reduced'
    eps_u = 1e-3
    penalty_weights = None
    x0 = None
    truth = None
    domain = None
    data_space = None

    _slice_weights = None
    _shared_weights = ()
    _state_weights = None

    @property
    def experiment_count(self):
        return self.penalty_weights.shape[0]

    @property
    def slice_space(self):
        return WeightedSpace(self._slice_weights)

    def _build_domain(self):
        spaces = [WeightedSpace(self._slice_weights)] * self.experiment_count
        spaces += [WeightedSpace(w) for w in self._shared_weights]
        if self.formulation == 'all-at-once':
            spaces += [WeightedSpace(self._state_weights)] * self.experiment_count
        self.domain = WeightedSpace.concat(spaces)

    def _block_sizes(self):
        sizes = [self._slice_weights.shape[0]] * self.experiment_count
        sizes += [w.shape[0] for w in self._shared_weights]
        if self.formulation == 'all-at-once':
            sizes += [self._state_weights.shape[0]] * self.experiment_count
        return sizes

    def _block_offsets(self):
        offsets = np.concatenate([[0], np.cumsum(self._block_sizes())])
        return [int(o) for o in offsets]

    def pack(self, x):
        """
        :param x:
            An ExtendedParam laid out for this problem

        :return:
            A numpy array of the domain X
        """

        self._check_param(x)
        blocks = list(x.slices) + list(x.shared)
        if self.formulation == 'all-at-once':
            blocks += list(x.state)
        return np.concatenate(blocks)

    def unpack(self, vector):
        """
        :param vector:
            A vector of the domain X

        :return:
            An ExtendedParam carrying this problem's penalty weights
        """

        vector = self.domain.check(vector, 'vector')
        offsets = self._block_offsets()
        blocks = [vector[offsets[k]:offsets[k + 1]].copy() for k in range(len(offsets) - 1)]
        count = self.experiment_count
        shared_count = len(self._shared_weights)
        slices = blocks[:count]
        shared = blocks[count:count + shared_count]
        state = None
        if self.formulation == 'all-at-once':
            state = blocks[count + shared_count:]
        return ExtendedParam(slices, shared, state, self.penalty_weights)

    def _check_param(self, x):
        if not isinstance(x, ExtendedParam):
            raise TypeError(pretty_message(
                '''
                x must be an instance of ExtendedParam, not %s
                ''',
                type_name(x)
            ))
        if x.experiment_count != self.experiment_count:
            raise DimensionError(pretty_message(
                '''
                x has %d slices, the problem has %d experiments
                ''',
                x.experiment_count,
                self.experiment_count
            ))
        if x.slices[0].shape[0] != self._slice_weights.shape[0]:
            raise DimensionError('slices of x do not match the coefficient support')
        if len(x.shared) != len(self._shared_weights):
            raise DimensionError('x does not have the shared coefficients of the problem')
        for values, weights in zip(x.shared, self._shared_weights):
            if values.shape[0] != weights.shape[0]:
                raise DimensionError('a shared coefficient of x has the wrong length')
        if (x.state is not None) != (self.formulation == 'all-at-once'):
            raise DimensionError(pretty_message(
                '''
                x must %s a state block in the %s formulation
                ''',
                'have' if self.formulation == 'all-at-once' else 'not have',
                self.formulation
            ))
        if x.state is not None:
            for u in x.state:
                if u.shape[0] != self._state_weights.shape[0]:
                    raise DimensionError('a state of x has the wrong length')

    def penalty_op(self):
        """
        :return:
            A LinOpRep P on X with (Pq)(j) = q(j) - weighted mean of q over
            the experiments on the slice block and zero rows elsewhere
        """

        count = self.experiment_count
        size = self._slice_weights.shape[0]
        dim = self.domain.dim
        matrix = np.zeros((dim, dim))
        if count > 1:
            normalized = self.penalty_weights / self.penalty_weights.sum()
            projector = np.eye(count) - np.outer(np.ones(count), normalized)
            matrix[:count * size, :count * size] = np.kron(projector, np.eye(size))
        return LinOpRep(matrix, self.domain, self.domain)

    def extend(self, slice_values, shared=()):
        """
        Extends an original coefficient constantly across the experiments,
        adding the states S(q) in the all-at-once formulation

        :param slice_values:
            A vector on the support of the extended coefficient

        :param shared:
            A list of vectors of the shared coefficients

        :return:
            An ExtendedParam
        """

        slice_values = as_vector(slice_values, 'slice_values', self._slice_weights.shape[0])
        slices = [slice_values.copy() for _ in range(self.experiment_count)]
        shared = [as_vector(s, 'shared') for s in shared]
        state = None
        if self.formulation == 'all-at-once':
            state = [self._solve_state(j, slices[j], shared) for j in range(self.experiment_count)]
        return ExtendedParam(slices, shared, state, self.penalty_weights)

    def with_states(self, x):
        """
        :param x:
            An ExtendedParam of this problem

        :return:
            A copy of x whose state block, if any, is replaced by S(q)
        """

        x = x.copy()
        if self.formulation == 'all-at-once':
            x.state = [self._solve_state(j, x.slices[j], x.shared) for j in range(self.experiment_count)]
        return x

    def _coefficient_errors(self, x):
        self._check_param(x)
        if self.truth is None:
            raise ConfigurationError('the problem has no truth configured')
        diff = x.collapse() - self.truth.collapse()
        error = float(np.dot(self._slice_weights, diff ** 2))
        scale = float(np.dot(self._slice_weights, self.truth.collapse() ** 2))
        for values, truth, weights in zip(x.shared, self.truth.shared, self._shared_weights):
            error += float(np.dot(weights, (values - truth) ** 2))
            scale += float(np.dot(weights, truth ** 2))
        return np.sqrt(error), np.sqrt(scale)

    def absolute_error(self, x):
        """
        :return:
            The L2 distance of the collapsed reconstruction (and shared
            coefficients) to the truth
        """

        return self._coefficient_errors(x)[0]

    def relative_error(self, x):
        error, scale = self._coefficient_errors(x)
        return error / scale if scale > 0.0 else error

    def j_spread(self, x):
        """
        :return:
            max_j of the L2 distance of slice j to the collapsed coefficient
        """

        self._check_param(x)
        mean = x.collapse()
        return max(float(np.sqrt(np.dot(self._slice_weights, (s - mean) ** 2))) for s in x.slices)

    def r_prime(self, x):
        """
        :return:
            A LinOpRep of the central-difference Jacobian of the r-map at x
        """

        return fd_jacobian(
            lambda v: self.r_map(self.unpack(v)),
            self.pack(x),
            domain=self.domain,
            codomain=self.domain
        )

    def forward(self, x):
        raise NotImplementedError()

    def frozen_k(self):
        raise NotImplementedError()

    def frozen_apply(self, vector):
        """
        Applies K to a vector of X without requiring a dense K
        """

        return self.frozen_k().apply(vector)

    def frozen_adjoint_apply(self, vector):
        """
        Applies the weighted adjoint K* to a vector of Y without requiring a
        dense K
        """

        return adjoint(self.frozen_k()).apply(vector)

    def r_map(self, x, correction_sign=1.0):
        raise NotImplementedError()

    def _solve_state(self, j, slice_values, shared):
        raise NotImplementedError()


class PdeProblem(ProblemInstance):

    """
    Implements forward, frozen_k and r_map for problems described by the
    per-experiment pieces below. Subclasses set the weight and support
    attributes, the loads and the observation operators, then call
    _initialize().
    """

    _slice_support = None
    _loads = None
    _observations = None
    _u0 = None
    _l0 = None
    _k_cache = None

    def _apply_d(self, j, u):
        raise NotImplementedError()

    def _coefficient_apply(self, j, u, slice_values, shared):
        raise NotImplementedError()

    def _coefficient_derivative(self, j, u, du, slice_values, shared):
        raise NotImplementedError()

    def _state_jacobian(self, j, slice_values, shared, u):
        raise NotImplementedError()

    def _shared_blocks(self, j, u):
        return []

    def _denominator(self, j, u):
        return u[self._slice_support]

    def _initialize(self, q0_slice, q0_shared, truth_slice=None, truth_shared=None):
        if self.formulation not in FORMULATIONS:
            raise ConfigurationError(pretty_message(
                '''
                formulation must be "reduced" or "all-at-once", not %s
                ''',
                repr(self.formulation)
            ))

        self._build_domain()
        state_space = WeightedSpace(self._state_weights)
        observation_spaces = [c.codomain for c in self._observations]
        if self.formulation == 'reduced':
            self.data_space = WeightedSpace.concat(observation_spaces)
        else:
            residual_space = WeightedSpace(1.0 / self._state_weights)
            self.data_space = WeightedSpace.concat([residual_space] * self.experiment_count + observation_spaces)
        self._state_space = state_space

        q0_slice = as_vector(q0_slice, 'q0', self._slice_weights.shape[0])
        q0_shared = [as_vector(s, 'q0 shared') for s in q0_shared]
        self._u0 = []
        self._l0 = []
        smallest = np.inf
        for j in range(self.experiment_count):
            u0 = self._solve_state(j, q0_slice, q0_shared)
            denominator = np.abs(self._denominator(j, u0))
            smallest = min(smallest, float(denominator.min()))
            if denominator.min() < self.eps_u:
                raise DenominatorError(pretty_message(
                    '''
                    experiment %d has a state of magnitude %.3e at the
                    linearization point, below the threshold %.3e
                    ''',
                    j + 1,
                    float(denominator.min()),
                    self.eps_u
                ))
            self._u0.append(u0)
            self._l0.append(Factorization(
                self._state_jacobian(j, q0_slice, q0_shared, u0),
                'linearized state equation'
            ))

        self.x0 = ExtendedParam(
            [q0_slice.copy() for _ in range(self.experiment_count)],
            [s.copy() for s in q0_shared],
            [u.copy() for u in self._u0] if self.formulation == 'all-at-once' else None,
            self.penalty_weights
        )
        if truth_slice is not None:
            self.truth = self.extend(truth_slice, truth_shared or [])

        _log.debug(
            '%s problem: %d experiments, %s formulation, dim X %d, dim Y %d, min |u0| %.3e',
            self.kind,
            self.experiment_count,
            self.formulation,
            self.domain.dim,
            self.data_space.dim,
            smallest
        )

    @property
    def baseline_states(self):
        return [u.copy() for u in self._u0]

    def _residual(self, j, slice_values, shared, u):
        return self._apply_d(j, u) + self._coefficient_apply(j, u, slice_values, shared) - self._loads[j]

    def _states_of(self, x):
        if self.formulation == 'all-at-once':
            return x.state
        return [self._solve_state(j, x.slices[j], x.shared) for j in range(self.experiment_count)]

    def forward(self, x):
        """
        :param x:
            An ExtendedParam

        :return:
            A numpy array in Y: the observations (reduced), or the PDE
            residuals followed by the observations (all-at-once)
        """

        self._check_param(x)
        states = self._states_of(x)
        observations = [self._observations[j].apply(u) for j, u in enumerate(states)]
        if self.formulation == 'reduced':
            return np.concatenate(observations)
        residuals = [
            self._residual(j, x.slices[j], x.shared, states[j])
            for j in range(self.experiment_count)
        ]
        return np.concatenate(residuals + observations)

    def _slice_operator(self, j):
        # B0_j(u0) as a matrix from the slice support into the state dofs
        matrix = np.zeros((self._state_weights.shape[0], self._slice_weights.shape[0]))
        multiplier = self._slice_weights * self._denominator(j, self._u0[j])
        matrix[self._slice_support, np.arange(self._slice_weights.shape[0])] = multiplier
        return matrix

    def frozen_k(self):
        """
        :return:
            A LinOpRep of K = F'(x0) from X to Y
        """

        if self._k_cache is not None:
            return self._k_cache

        offsets = self._block_offsets()
        count = self.experiment_count
        shared_count = len(self._shared_weights)
        obs_sizes = [c.codomain.dim for c in self._observations]
        state_size = self._state_weights.shape[0]
        matrix = np.zeros((self.data_space.dim, self.domain.dim))

        row = 0
        if self.formulation == 'all-at-once':
            for j in range(count):
                rows = slice(row, row + state_size)
                matrix[rows, offsets[j]:offsets[j + 1]] = self._slice_operator(j)
                for i, block in enumerate(self._shared_blocks(j, self._u0[j])):
                    matrix[rows, offsets[count + i]:offsets[count + i + 1]] = block
                state_block = count + shared_count + j
                matrix[rows, offsets[state_block]:offsets[state_block + 1]] = self._l0[j].matrix
                row += state_size
            for j in range(count):
                state_block = count + shared_count + j
                rows = slice(row, row + obs_sizes[j])
                matrix[rows, offsets[state_block]:offsets[state_block + 1]] = self._observations[j].matrix
                row += obs_sizes[j]

        else:
            for j in range(count):
                rhs = [self._slice_operator(j)] + list(self._shared_blocks(j, self._u0[j]))
                solved = self._l0[j].solve(np.hstack(rhs))
                block = -self._observations[j].matrix.dot(solved)
                rows = slice(row, row + obs_sizes[j])
                width = self._slice_weights.shape[0]
                matrix[rows, offsets[j]:offsets[j + 1]] = block[:, :width]
                column = width
                for i in range(shared_count):
                    size = offsets[count + i + 1] - offsets[count + i]
                    matrix[rows, offsets[count + i]:offsets[count + i + 1]] = block[:, column:column + size]
                    column += size
                row += obs_sizes[j]

        self._k_cache = LinOpRep(matrix, self.domain, self.data_space)
        return self._k_cache

    def frozen_apply(self, vector):
        x = self.unpack(vector)
        count = self.experiment_count
        loads = []
        for j in range(count):
            load = np.zeros(self._state_weights.shape[0])
            load[self._slice_support] = self._slice_weights * self._denominator(j, self._u0[j]) * x.slices[j]
            for block, values in zip(self._shared_blocks(j, self._u0[j]), x.shared):
                load += block.dot(values)
            loads.append(load)

        if self.formulation == 'reduced':
            out = [-self._observations[j].matrix.dot(self._l0[j].solve(loads[j])) for j in range(count)]
            return np.concatenate(out)

        residuals = [loads[j] + self._l0[j].matrix.dot(x.state[j]) for j in range(count)]
        observations = [self._observations[j].matrix.dot(x.state[j]) for j in range(count)]
        return np.concatenate(residuals + observations)

    def frozen_adjoint_apply(self, vector):
        weighted = self.data_space.check(vector, 'vector') * self.data_space.weights
        count = self.experiment_count
        state_size = self._state_weights.shape[0]

        offset = 0
        residuals = []
        if self.formulation == 'all-at-once':
            residuals = [weighted[j * state_size:(j + 1) * state_size] for j in range(count)]
            offset = count * state_size
        observed = []
        for observe in self._observations:
            observed.append(weighted[offset:offset + observe.codomain.dim])
            offset += observe.codomain.dim

        slices = []
        shared = [np.zeros(w.shape[0]) for w in self._shared_weights]
        states = []
        for j in range(count):
            back = self._observations[j].matrix.T.dot(observed[j])
            if self.formulation == 'all-at-once':
                loads = residuals[j]
                states.append(self._l0[j].matrix.T.dot(loads) + back)
            else:
                loads = -self._l0[j].solve(back, transpose=True)
            multiplier = self._slice_weights * self._denominator(j, self._u0[j])
            slices.append(multiplier * loads[self._slice_support])
            for i, block in enumerate(self._shared_blocks(j, self._u0[j])):
                shared[i] += block.T.dot(loads)

        return np.concatenate(slices + shared + states) / self.domain.weights

    def r_map(self, x, correction_sign=1.0):
        """
        :param x:
            An ExtendedParam

        :param correction_sign:
            1.0 for the r-map satisfying F(x) - F(x0) = K r(x); -1.0 flips the
            sign of the state correction term

        :return:
            A numpy array in X
        """

        self._check_param(x)
        states = self._states_of(x)
        q0 = self.x0
        blocks = []
        for j in range(self.experiment_count):
            u = states[j]
            u0 = self._u0[j]
            change = self._coefficient_apply(j, u, x.slices[j], x.shared) \
                - self._coefficient_apply(j, u0, x.slices[j], x.shared) \
                - self._coefficient_derivative(j, u0, u - u0, q0.slices[j], q0.shared)
            correction = change[self._slice_support] / (self._slice_weights * self._denominator(j, u0))
            blocks.append(x.slices[j] - q0.slices[j] + correction_sign * correction)

        blocks += [values - base for values, base in zip(x.shared, q0.shared)]
        if self.formulation == 'all-at-once':
            blocks += [u - u0 for u, u0 in zip(x.state, self._u0)]
        return np.concatenate(blocks)

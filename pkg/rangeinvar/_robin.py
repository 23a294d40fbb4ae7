# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import logging

import numpy as np

from ._errors import pretty_message
from ._problem import Excitation, ObservationSetup, PdeProblem
from .errors import AdmissibilityError, ConfigurationError, SolvabilityError
from .numerics import LinOpRep, WeightedSpace
from .pde import Factorization, assemble_stiffness, boundary_load, mass_vector


__all__ = [
    'PHI_KINDS',
    'RobinProblem',
]


_log = logging.getLogger(__name__)

PHI_KINDS = ('linear', 'tanh')


def _phi(kind, s):
    if kind == 'linear':
        return s.copy()
    return s + 0.5 * np.tanh(s)


def _phi_prime(kind, s):
    if kind == 'linear':
        return np.ones_like(s)
    return 1.0 + 0.5 * (1.0 - np.tanh(s) ** 2)


class RobinProblem(PdeProblem):

    """
    Identification of the Robin coefficient q on the bottom edge from
    -Laplace(u) = 1, du/dn + q Phi(u) = 1 on the bottom edge, du/dn = 1 on the
    top edge and u = 0 on the left and right edges, observing the trace on
    the top edge. A single experiment, so nothing is extended.
    """

    kind = 'robin'
    phi_kind = None

    def __init__(self, grid, q0, phi_kind, formulation, truth, eps_u):
        if phi_kind not in PHI_KINDS:
            raise ConfigurationError(pretty_message(
                '''
                phi_kind must be one of "linear", "tanh", not %s
                ''',
                repr(phi_kind)
            ))
        q0 = np.asarray(q0, dtype=np.float64)
        if q0.size and q0.min() < 0.0:
            raise AdmissibilityError(pretty_message(
                '''
                Robin coefficient q0 must be non-negative - minimum is %r
                ''',
                float(q0.min())
            ))

        self.grid = grid
        self.formulation = formulation
        self.eps_u = eps_u
        self.phi_kind = phi_kind

        dirichlet = grid.segment('dirichlet')
        robin = grid.segment('robin')
        neumann = grid.segment('neumann')
        mask = np.ones(grid.node_count, dtype=bool)
        mask[dirichlet] = False
        free = np.nonzero(mask)[0]
        position = np.full(grid.node_count, -1)
        position[free] = np.arange(free.shape[0])

        self._free = free
        self._boundary_weights = grid.segment_weights('robin')
        self._slice_support = position[robin]
        self._slice_weights = self._boundary_weights
        self._state_weights = grid.volume_weights[free]
        self._shared_weights = []
        self.penalty_weights = np.ones(1)

        self._stiffness = assemble_stiffness(grid).matrix[np.ix_(free, free)]
        load = mass_vector(grid, np.ones(grid.node_count)) \
            + boundary_load(grid, np.ones(robin.shape[0]), 'robin') \
            + boundary_load(grid, np.ones(neumann.shape[0]), 'neumann')
        self._loads = [load[free]]

        observe = np.zeros((neumann.shape[0], free.shape[0]))
        observe[np.arange(neumann.shape[0]), position[neumann]] = 1.0
        observation = LinOpRep(observe, WeightedSpace(self._state_weights), grid.segment_space('neumann'))
        self._observations = [observation]
        self.setup = ObservationSetup(
            [Excitation(flux=np.ones(neumann.shape[0]), source=np.ones(grid.node_count))],
            'boundary',
            'neumann',
            observation.codomain
        )

        self._initialize(q0, [], truth, [])

    @property
    def free_nodes(self):
        """
        Indices of the grid nodes carrying state values, all but the
        Dirichlet nodes
        """

        return self._free

    def embed_state(self, u):
        """
        :param u:
            A state vector on the free nodes

        :return:
            A nodal numpy array, zero on the Dirichlet edges
        """

        out = np.zeros(self.grid.node_count)
        out[self._free] = u
        return out

    def _boundary_term(self, values):
        out = np.zeros(self._state_weights.shape[0])
        out[self._slice_support] = values
        return out

    def _apply_d(self, j, u):
        return self._stiffness.dot(u)

    def _coefficient_apply(self, j, u, slice_values, shared):
        phi = _phi(self.phi_kind, u[self._slice_support])
        return self._boundary_term(self._boundary_weights * phi * slice_values)

    def _coefficient_derivative(self, j, u, du, slice_values, shared):
        trace = u[self._slice_support]
        slope = _phi_prime(self.phi_kind, trace)
        return self._boundary_term(self._boundary_weights * slope * du[self._slice_support] * slice_values)

    def _state_jacobian(self, j, slice_values, shared, u):
        slope = _phi_prime(self.phi_kind, u[self._slice_support])
        matrix = self._stiffness.copy()
        support = self._slice_support
        matrix[support, support] += self._boundary_weights * slice_values * slope
        return matrix

    def _denominator(self, j, u):
        return _phi(self.phi_kind, u[self._slice_support])

    def _solve_state(self, j, slice_values, shared):
        load = self._loads[j]
        linear = self._stiffness.copy()
        support = self._slice_support
        linear[support, support] += self._boundary_weights * slice_values
        u = Factorization(linear, 'Robin problem').solve(load)
        if self.phi_kind == 'linear':
            return u

        scale = np.linalg.norm(load)
        tolerance = 1e-14 * scale

        def residual(state):
            return self._apply_d(j, state) + self._coefficient_apply(j, state, slice_values, shared) - load

        current = residual(u)
        norm = np.linalg.norm(current)
        extra = False
        for iteration in range(50):
            if norm <= tolerance:
                if extra:
                    break
                extra = True
            jacobian = Factorization(self._state_jacobian(j, slice_values, shared, u), 'Robin Newton step')
            step = jacobian.solve(-current)
            length = 1.0
            while True:
                candidate = u + length * step
                candidate_residual = residual(candidate)
                candidate_norm = np.linalg.norm(candidate_residual)
                if candidate_norm < norm or candidate_norm <= tolerance or length < 1e-8:
                    break
                length *= 0.5
            u, current, norm = candidate, candidate_residual, candidate_norm
        else:
            if norm > 1e-10 * scale:
                raise SolvabilityError(pretty_message(
                    '''
                    Newton iteration for the nonlinear Robin problem stalled at
                    a residual of %.3e
                    ''',
                    norm
                ))

        _log.debug('robin state solved after %d Newton steps, residual %.3e', iteration, norm)
        return u

# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import numpy as np
from scipy import linalg

from ._errors import pretty_message
from ._problem import Excitation, ObservationSetup, PdeProblem
from .errors import ResonanceError
from .numerics import LinOpRep, WeightedSpace
from .pde import (
    Field,
    assemble_weighted_stiffness,
    boundary_arclength,
    boundary_load,
    solve_elliptic,
    stiffness_action,
    trace_op,
)


__all__ = [
    'DiffAbsProblem',
    'positive_fluxes',
]


def positive_fluxes(grid, segment, count):
    """
    Fluxes 1 + 0.5 cos(n pi s), n = 1..count, over the normalized boundary
    arclength s; all are positive so that states stay positive for definite
    operators
    """

    s = boundary_arclength(grid, segment)
    return [1.0 + 0.5 * np.cos(n * np.pi * s) for n in range(1, count + 1)]


class DiffAbsProblem(PdeProblem):

    """
    Identification of the absorption c and the diffusion a in
    -div(a grad u) + (c - lambda) u = 0 with Neumann fluxes phi_n, for a set
    of spectral shifts lambda. Only c is extended, one copy per (lambda, n).
    """

    kind = 'diffabs'
    lambdas = None

    def __init__(self, grid, lambdas, fluxes, c0, a0, formulation, observation, segment, truth, eps_u):
        self.grid = grid
        self.formulation = formulation
        self.eps_u = eps_u
        self.lambdas = [float(lam) for lam in lambdas]

        pairs = [(lam, n) for lam in self.lambdas for n in range(1, len(fluxes) + 1)]
        self._shifts = [lam for lam, _ in pairs]
        self._flux_index = [n - 1 for _, n in pairs]

        node_count = grid.node_count
        self._slice_support = np.arange(node_count)
        self._slice_weights = grid.volume_weights
        self._state_weights = grid.volume_weights
        self._shared_weights = [grid.volume_weights]
        self.penalty_weights = np.array([(1.0 + lam) ** -2 * n ** -2.0 for lam, n in pairs])

        self._check_resonance(c0, a0)

        loads = [boundary_load(grid, flux, segment) for flux in fluxes]
        self._loads = [loads[k] for k in self._flux_index]
        experiments = [Excitation(flux=fluxes[k], shift=lam) for lam, k in zip(self._shifts, self._flux_index)]

        if observation == 'interior':
            observe = LinOpRep.identity(grid.space)
            observed_segment = None
        else:
            observe = trace_op(grid, segment)
            observed_segment = segment
        self._observations = [observe] * len(pairs)
        self.setup = ObservationSetup(
            experiments,
            observation,
            observed_segment,
            WeightedSpace.concat([observe.codomain] * len(pairs))
        )

        truth_slice = truth_shared = None
        if truth is not None:
            truth_slice, truth_shared = truth[0], [truth[1]]
        self._initialize(c0, [a0], truth_slice, truth_shared)

    def _check_resonance(self, c0, a0):
        grid = self.grid
        stiffness = assemble_weighted_stiffness(grid, a0).matrix
        operator = stiffness + np.diag(grid.volume_weights * c0)
        spectrum = linalg.eigh(operator, np.diag(grid.volume_weights), eigvals_only=True)
        for lam in self.lambdas:
            gap = float(np.min(np.abs(spectrum - lam)))
            if gap < 1e-6:
                raise ResonanceError(pretty_message(
                    '''
                    shift %r is within %.3e of an eigenvalue of the unshifted
                    operator, the shifted problem is not safely invertible
                    ''',
                    lam,
                    gap
                ))

    def experiment_labels(self):
        """
        :return:
            A list of (lambda, n) tuples in experiment order
        """

        return [(lam, k + 1) for lam, k in zip(self._shifts, self._flux_index)]

    def _stiffness(self, shared):
        return assemble_weighted_stiffness(self.grid, shared[0]).matrix

    def _apply_d(self, j, u):
        return -self._shifts[j] * self.grid.volume_weights * u

    def _coefficient_apply(self, j, u, slice_values, shared):
        return self.grid.volume_weights * u * slice_values + self._stiffness(shared).dot(u)

    def _coefficient_derivative(self, j, u, du, slice_values, shared):
        return self.grid.volume_weights * du * slice_values + self._stiffness(shared).dot(du)

    def _state_jacobian(self, j, slice_values, shared, u):
        shifted = slice_values - self._shifts[j]
        return self._stiffness(shared) + np.diag(self.grid.volume_weights * shifted)

    def _shared_blocks(self, j, u):
        return [stiffness_action(self.grid, u)]

    def _solve_state(self, j, slice_values, shared):
        stiffness = assemble_weighted_stiffness(self.grid, shared[0])
        shifted = Field(self.grid, slice_values - self._shifts[j])
        return solve_elliptic(stiffness, shifted, self._loads[j]).values

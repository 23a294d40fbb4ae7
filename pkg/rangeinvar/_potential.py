# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import numpy as np

from ._problem import Excitation, ObservationSetup, PdeProblem
from .numerics import LinOpRep, WeightedSpace
from .pde import (
    Field,
    assemble_stiffness,
    boundary_arclength,
    boundary_load,
    mass_vector,
    solve_elliptic,
    trace_op,
)


__all__ = [
    'PotentialProblem',
    'default_fluxes',
]


def default_fluxes(grid, segment, count, amplitude=0.25):
    """
    Cosine fluxes amplitude * cos((j - 1) pi s) over the normalized boundary
    arclength s. These are the unit cosine patterns cos((j - 1) pi s) scaled
    down: the default amplitude is 0.25, not 1, since unit fluxes against
    the source f = 1 push states below eps_u. A 1-D grid has only two
    boundary points, so the patterns repeat there; experiment j is further
    scaled by 1 / ceil(j / 2) to keep the fluxes pairwise distinct.

    :param amplitude:
        The factor applied to every cosine pattern

    :return:
        A list of count numpy arrays of segment values
    """

    s = boundary_arclength(grid, segment)
    fluxes = []
    for j in range(1, count + 1):
        flux = amplitude * np.cos((j - 1) * np.pi * s)
        if grid.dim == 1:
            flux = flux / ((j + 1) // 2)
        fluxes.append(flux)
    return fluxes


class PotentialProblem(PdeProblem):

    """
    Identification of q in -Laplace(u) + q u = 1 with Neumann fluxes phi_j,
    one extended copy of q per flux
    """

    kind = 'potential'

    def __init__(self, grid, q0, fluxes, formulation, observation, segment, truth, eps_u):
        self.grid = grid
        self.formulation = formulation
        self.eps_u = eps_u
        self._stiffness = assemble_stiffness(grid)

        count = len(fluxes)
        node_count = grid.node_count
        self._slice_support = np.arange(node_count)
        self._slice_weights = grid.volume_weights
        self._state_weights = grid.volume_weights
        self._shared_weights = []
        self.penalty_weights = 1.0 / np.arange(1, count + 1) ** 2

        source = np.ones(node_count)
        experiments = [Excitation(flux=flux, source=source) for flux in fluxes]
        self._loads = [
            mass_vector(grid, source) + boundary_load(grid, flux, segment)
            for flux in fluxes
        ]

        if observation == 'interior':
            observe = LinOpRep.identity(grid.space)
            observed_segment = None
        else:
            observe = trace_op(grid, segment)
            observed_segment = segment
        self._observations = [observe] * count
        self.setup = ObservationSetup(
            experiments,
            observation,
            observed_segment,
            WeightedSpace.concat([observe.codomain] * count)
        )

        self._initialize(q0, [], truth, [])

    def _apply_d(self, j, u):
        return self._stiffness.matrix.dot(u)

    def _coefficient_apply(self, j, u, slice_values, shared):
        return self.grid.volume_weights * u * slice_values

    def _coefficient_derivative(self, j, u, du, slice_values, shared):
        return self.grid.volume_weights * du * slice_values

    def _state_jacobian(self, j, slice_values, shared, u):
        return self._stiffness.matrix + np.diag(self.grid.volume_weights * slice_values)

    def _solve_state(self, j, slice_values, shared):
        q = Field(self.grid, slice_values)
        return solve_elliptic(self._stiffness, q, self._loads[j]).values

# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import numpy as np

from ._errors import pretty_message
from ._problem import ExtendedParam, ProblemInstance
from ._types import type_name, as_vector
from .errors import DimensionError
from .numerics import LinOpRep


__all__ = [
    'ModelProblem',
]


class ModelProblem(ProblemInstance):

    """
    A finite-dimensional problem F(x) = F(x0) + K r(x) with a single
    experiment. The linear toy problems use the default r(x) = x - x0.
    """

    kind = 'model'

    def __init__(self, K, x0, r=None, r_prime=None, P=None, truth=None, y0=None):
        if not isinstance(K, LinOpRep):
            raise TypeError(pretty_message(
                '''
                K must be an instance of rangeinvar.numerics.LinOpRep, not %s
                ''',
                type_name(K)
            ))
        if r is not None and not callable(r):
            raise TypeError(pretty_message(
                '''
                r must be callable, not %s
                ''',
                type_name(r)
            ))
        if r_prime is not None and not callable(r_prime):
            raise TypeError(pretty_message(
                '''
                r_prime must be callable, not %s
                ''',
                type_name(r_prime)
            ))
        if P is not None:
            if not isinstance(P, LinOpRep):
                raise TypeError(pretty_message(
                    '''
                    P must be an instance of rangeinvar.numerics.LinOpRep, not %s
                    ''',
                    type_name(P)
                ))
            if P.domain != K.domain:
                raise DimensionError('P and K must share the domain')

        dim = K.domain.dim
        x0 = as_vector(x0, 'x0', dim)
        self._k = K
        self._r = r
        self._r_prime = r_prime
        self._p = P
        self._slice_weights = K.domain.weights
        self._shared_weights = []
        self.penalty_weights = np.ones(1)
        self.domain = K.domain
        self.data_space = K.codomain
        self.x0 = ExtendedParam([x0], weights=self.penalty_weights)
        if y0 is None:
            y0 = K.apply(x0)
        self._y0 = as_vector(y0, 'y0', K.codomain.dim)
        if truth is not None:
            self.truth = ExtendedParam([as_vector(truth, 'truth', dim)], weights=self.penalty_weights)

    def _r_vector(self, vector):
        if self._r is None:
            return vector - self.x0.slices[0]
        return as_vector(self._r(vector), 'r(x)', self.domain.dim)

    def forward(self, x):
        self._check_param(x)
        return self._y0 + self._k.apply(self._r_vector(x.slices[0]))

    def frozen_k(self):
        return self._k

    def r_map(self, x, correction_sign=1.0):
        self._check_param(x)
        return self._r_vector(x.slices[0])

    def r_prime(self, x):
        """
        :return:
            The identity for the default r, the user supplied r' when given,
            otherwise a finite-difference Jacobian
        """

        self._check_param(x)
        if self._r is None:
            return LinOpRep.identity(self.domain)
        if self._r_prime is not None:
            matrix = np.asarray(self._r_prime(x.slices[0].copy()), dtype=np.float64)
            return LinOpRep(matrix.reshape(self.domain.dim, self.domain.dim), self.domain, self.domain)
        return super(ModelProblem, self).r_prime(x)

    def penalty_op(self):
        if self._p is None:
            return LinOpRep.zero(self.domain, self.domain)
        return self._p

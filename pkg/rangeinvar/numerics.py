# coding: utf-8

"""
Linear algebra in weighted inner-product spaces. Every vector space used by
the package is R^n equipped with <x, y> = sum_i w_i x_i y_i, so adjoints,
operator norms and least-squares solves all respect quadrature weights.
Exports the following items:

 - WeightedSpace
 - LinOpRep
 - adjoint()
 - fd_jacobian()
 - numerical_nullspace()
 - operator_norm()
 - solve_gram()
 - solve_regularized()
 - weighted_inner()
 - weighted_norm()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import numpy as np
from scipy import linalg

from ._errors import pretty_message
from ._types import type_name, int_types, is_real, as_vector
from .errors import DimensionError, NumericError


__all__ = [
    'LinOpRep',
    'WeightedSpace',
    'adjoint',
    'fd_jacobian',
    'numerical_nullspace',
    'operator_norm',
    'solve_gram',
    'solve_regularized',
    'weighted_inner',
    'weighted_norm',
]


class WeightedSpace(object):

    """
    The space R^dim with the inner product <x, y> = sum_i w_i x_i y_i
    """

    _weights = None
    _sqrt_weights = None

    def __init__(self, weights):
        """
        :param weights:
            A list, tuple or numpy array of positive reals, one per coordinate

        :raises:
            ValueError - when there are no weights or a weight is not positive
        """

        weights = as_vector(weights, 'weights')
        if weights.shape[0] < 1:
            raise ValueError('weights must contain at least one entry')
        if np.any(weights <= 0.0):
            raise ValueError(pretty_message(
                '''
                weights must all be positive - smallest is %r
                ''',
                float(weights.min())
            ))

        weights.flags.writeable = False
        self._weights = weights
        self._sqrt_weights = np.sqrt(weights)
        self._sqrt_weights.flags.writeable = False

    @classmethod
    def euclidean(cls, dim):
        """
        :param dim:
            A positive integer

        :return:
            A WeightedSpace with unit weights
        """

        if not isinstance(dim, int_types):
            raise TypeError(pretty_message(
                '''
                dim must be an integer, not %s
                ''',
                type_name(dim)
            ))
        if dim < 1:
            raise ValueError(pretty_message(
                '''
                dim must be at least 1 - is %s
                ''',
                repr(dim)
            ))
        return cls(np.ones(dim))

    @classmethod
    def concat(cls, spaces):
        """
        Builds the product space of several spaces, coordinates in order

        :param spaces:
            A non-empty list of WeightedSpace objects

        :return:
            A WeightedSpace
        """

        spaces = list(spaces)
        for space in spaces:
            if not isinstance(space, WeightedSpace):
                raise TypeError(pretty_message(
                    '''
                    spaces must contain WeightedSpace objects, not %s
                    ''',
                    type_name(space)
                ))
        if not spaces:
            raise ValueError('spaces must not be empty')
        return cls(np.concatenate([s.weights for s in spaces]))

    @property
    def dim(self):
        return self._weights.shape[0]

    @property
    def weights(self):
        return self._weights

    @property
    def sqrt_weights(self):
        return self._sqrt_weights

    def check(self, x, name='x'):
        """
        Validates a vector of this space

        :param x:
            A list, tuple or numpy array

        :param name:
            A unicode string used in error messages

        :raises:
            rangeinvar.errors.DimensionError - when the length is wrong
            rangeinvar.errors.NumericError - when an entry is not finite

        :return:
            A float64 numpy array
        """

        return as_vector(x, name, self.dim)

    def __eq__(self, other):
        if not isinstance(other, WeightedSpace):
            return False
        if other is self:
            return True
        return other.dim == self.dim and np.array_equal(other.weights, self.weights)

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return 'WeightedSpace(dim=%d)' % self.dim


def weighted_inner(space, x, y):
    """
    Computes the weighted inner product sum_i w_i x_i y_i

    :param space:
        A WeightedSpace

    :param x:
        A vector of length space.dim

    :param y:
        A vector of length space.dim

    :raises:
        rangeinvar.errors.DimensionError - when a length does not match

    :return:
        A float
    """

    if not isinstance(space, WeightedSpace):
        raise TypeError(pretty_message(
            '''
            space must be an instance of WeightedSpace, not %s
            ''',
            type_name(space)
        ))

    x = space.check(x, 'x')
    y = space.check(y, 'y')
    return float(np.dot(space.weights * x, y))


def weighted_norm(space, x):
    """
    :param space:
        A WeightedSpace

    :param x:
        A vector of length space.dim

    :return:
        A float of the norm induced by the weighted inner product
    """

    x = space.check(x, 'x')
    return float(np.linalg.norm(space.sqrt_weights * x))


class LinOpRep(object):

    """
    A linear operator between two weighted spaces, stored as a dense matrix
    of shape (codomain.dim, domain.dim)
    """

    _matrix = None
    _domain = None
    _codomain = None

    def __init__(self, matrix, domain, codomain):
        """
        :param matrix:
            A two-dimensional array-like of reals

        :param domain:
            A WeightedSpace the operator maps from

        :param codomain:
            A WeightedSpace the operator maps to

        :raises:
            rangeinvar.errors.DimensionError - when the shape does not match
            rangeinvar.errors.NumericError - when an entry is not finite
        """

        for name, space in (('domain', domain), ('codomain', codomain)):
            if not isinstance(space, WeightedSpace):
                raise TypeError(pretty_message(
                    '''
                    %s must be an instance of WeightedSpace, not %s
                    ''',
                    name,
                    type_name(space)
                ))

        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape != (codomain.dim, domain.dim):
            raise DimensionError(pretty_message(
                '''
                matrix must have shape (%d, %d) - has shape %s
                ''',
                codomain.dim,
                domain.dim,
                matrix.shape
            ))
        if not np.all(np.isfinite(matrix)):
            raise NumericError('matrix contains non-finite entries')

        matrix.flags.writeable = False
        self._matrix = matrix
        self._domain = domain
        self._codomain = codomain

    @classmethod
    def identity(cls, space):
        return cls(np.eye(space.dim), space, space)

    @classmethod
    def zero(cls, domain, codomain):
        return cls(np.zeros((codomain.dim, domain.dim)), domain, codomain)

    @property
    def matrix(self):
        return self._matrix

    @property
    def domain(self):
        return self._domain

    @property
    def codomain(self):
        return self._codomain

    @property
    def shape(self):
        return self._matrix.shape

    def apply(self, x):
        """
        :param x:
            A vector of the domain

        :return:
            A numpy array in the codomain
        """

        return self._matrix.dot(self._domain.check(x))

    __call__ = apply

    def compose(self, other):
        """
        :param other:
            A LinOpRep whose codomain is this operator's domain

        :return:
            A LinOpRep of self after other
        """

        if not isinstance(other, LinOpRep):
            raise TypeError(pretty_message(
                '''
                other must be an instance of LinOpRep, not %s
                ''',
                type_name(other)
            ))
        if other.codomain != self._domain:
            raise DimensionError('other.codomain must equal the domain of this operator')
        return LinOpRep(self._matrix.dot(other.matrix), other.domain, self._codomain)

    def weighted_matrix(self):
        """
        :return:
            The matrix in coordinates orthonormal for both weighted inner
            products, diag(sqrt(w_cod)) A diag(1/sqrt(w_dom))
        """

        return (self._codomain.sqrt_weights[:, None] * self._matrix) / self._domain.sqrt_weights[None, :]

    def __repr__(self):
        return 'LinOpRep(%d x %d)' % self._matrix.shape


def _check_op(op, name='op'):
    if not isinstance(op, LinOpRep):
        raise TypeError(pretty_message(
            '''
            %s must be an instance of LinOpRep, not %s
            ''',
            name,
            type_name(op)
        ))


def adjoint(op):
    """
    Computes the Hilbert space adjoint with respect to the weighted inner
    products of the domain and codomain

    :param op:
        A LinOpRep

    :return:
        A LinOpRep with matrix diag(w_dom)^-1 A^T diag(w_cod)
    """

    _check_op(op)
    matrix = (op.matrix.T * op.codomain.weights[None, :]) / op.domain.weights[:, None]
    return LinOpRep(matrix, op.codomain, op.domain)


def operator_norm(op):
    """
    :param op:
        A LinOpRep

    :return:
        A float of the operator norm induced by the weighted norms
    """

    _check_op(op)
    if 0 in op.shape:
        return 0.0
    return float(linalg.svd(op.weighted_matrix(), compute_uv=False)[0])


def solve_gram(terms, shift, rhs):
    """
    Solves (sum_i c_i A_i* A_i + shift id) z = rhs, where * is the weighted
    adjoint, by a Cholesky factorization of the weight-symmetrized matrix

    :param terms:
        A list of 2-element tuples (c_i, A_i) of a non-negative real and a
        LinOpRep; all A_i share one domain; None entries are skipped

    :param shift:
        A non-negative real multiple of the identity

    :param rhs:
        A vector of the common domain

    :raises:
        rangeinvar.errors.NumericError - when the system is not positive
        definite or produces non-finite values

    :return:
        A numpy array z
    """

    terms = [(c, op) for c, op in terms if op is not None]
    if not terms:
        raise ValueError('terms must contain at least one operator')
    domain = terms[0][1].domain
    for _, op in terms:
        _check_op(op, 'terms operator')
        if op.domain != domain:
            raise DimensionError('all operators in terms must share one domain')

    rhs = domain.check(rhs, 'rhs')
    weights = domain.weights

    gram = shift * np.diag(weights)
    for coef, op in terms:
        if coef == 0.0:
            continue
        weighted = op.codomain.weights[:, None] * op.matrix
        gram = gram + coef * op.matrix.T.dot(weighted)
    gram = 0.5 * (gram + gram.T)

    target = weights * rhs
    try:
        factor = linalg.cho_factor(gram, check_finite=False)
    except linalg.LinAlgError:
        raise NumericError('normal-equation matrix is not positive definite')

    z = linalg.cho_solve(factor, target, check_finite=False)
    # Residuals are measured in the weighted norm of the domain
    scale = np.linalg.norm(target / domain.sqrt_weights)
    for _ in range(3):
        residual = target - gram.dot(z)
        if np.linalg.norm(residual / domain.sqrt_weights) <= 1e-10 * scale:
            break
        z = z + linalg.cho_solve(factor, residual, check_finite=False)

    if not np.all(np.isfinite(z)):
        raise NumericError('normal-equation solve produced non-finite values')
    return z


def solve_regularized(K, P, alpha, rhs):
    """
    Solves (K* K + P* P + alpha id) z = rhs in the weighted sense. When rhs is
    K* a + P* b + alpha c, z minimizes |Kz - a|^2 + |Pz - b|^2 + alpha |z - c|^2

    :param K:
        A LinOpRep

    :param P:
        None or a LinOpRep with the same domain as K

    :param alpha:
        A positive real

    :param rhs:
        A vector of K.domain

    :raises:
        ValueError - when alpha is not positive
        rangeinvar.errors.DimensionError - when P or rhs do not fit K
        rangeinvar.errors.NumericError - when rhs is not finite

    :return:
        A numpy array z
    """

    _check_op(K, 'K')
    if P is not None:
        _check_op(P, 'P')
        if P.domain != K.domain:
            raise DimensionError('P.domain must equal K.domain')

    if not is_real(alpha):
        raise TypeError(pretty_message(
            '''
            alpha must be a real number, not %s
            ''',
            type_name(alpha)
        ))
    if not alpha > 0.0:
        raise ValueError(pretty_message(
            '''
            alpha must be positive - is %s
            ''',
            repr(alpha)
        ))

    return solve_gram([(1.0, K), (1.0, P)], float(alpha), rhs)


def numerical_nullspace(op, rel_tol):
    """
    Computes the singular values of an operator and an orthonormal basis of
    the right-singular subspace belonging to singular values no larger than
    rel_tol times the largest one

    :param op:
        A LinOpRep

    :param rel_tol:
        A real in (0, 1)

    :return:
        A 2-element tuple of (numpy array of singular values in descending
        order, list of numpy arrays orthonormal in op.domain)
    """

    _check_op(op)
    if not is_real(rel_tol) or not 0.0 < rel_tol < 1.0:
        raise ValueError(pretty_message(
            '''
            rel_tol must be a real in (0, 1) - is %s
            ''',
            repr(rel_tol)
        ))

    weighted = op.weighted_matrix()
    # vt is square either way; only a wide matrix needs the full basis
    full = weighted.shape[0] < weighted.shape[1]
    try:
        _, sigma, vt = linalg.svd(weighted, full_matrices=full)
    except linalg.LinAlgError:
        _, sigma, vt = linalg.svd(weighted, full_matrices=full, lapack_driver='gesvd')

    sigma_max = sigma[0] if sigma.size else 0.0
    rank = int(np.sum(sigma > rel_tol * sigma_max))
    basis = [vt[k] / op.domain.sqrt_weights for k in range(rank, vt.shape[0])]
    return sigma, basis


def fd_jacobian(func, x, step=None, domain=None, codomain=None):
    """
    Approximates the Jacobian of a map with central differences, one column
    per coordinate of x

    :param func:
        A callable accepting and returning one-dimensional numpy arrays

    :param x:
        The point to differentiate at

    :param step:
        None for 1e-5 * (1 + max|x_i|), or a positive real

    :param domain:
        None for unit weights, or the WeightedSpace x belongs to

    :param codomain:
        None for unit weights, or the WeightedSpace func maps into

    :return:
        A LinOpRep
    """

    x = as_vector(x, 'x')
    if step is None:
        step = 1e-5 * (1.0 + float(np.max(np.abs(x))))
    if not is_real(step) or not step > 0.0:
        raise ValueError(pretty_message(
            '''
            step must be a positive real - is %s
            ''',
            repr(step)
        ))

    if domain is None:
        domain = WeightedSpace.euclidean(x.shape[0])
    x = domain.check(x)

    columns = []
    for i in range(x.shape[0]):
        forward = x.copy()
        forward[i] += step
        backward = x.copy()
        backward[i] -= step
        upper = as_vector(func(forward), 'func(x + step e_i)')
        lower = as_vector(func(backward), 'func(x - step e_i)', upper.shape[0])
        columns.append((upper - lower) / (2.0 * step))

    matrix = np.column_stack(columns)
    if codomain is None:
        codomain = WeightedSpace.euclidean(matrix.shape[0])
    return LinOpRep(matrix, domain, codomain)

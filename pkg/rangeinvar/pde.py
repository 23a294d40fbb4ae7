# coding: utf-8

"""
P1 finite elements with lumped mass on uniform grids of (0,1) and (0,1)^2.
Exports the following items:

 - Factorization
 - Field
 - Grid
 - assemble_stiffness()
 - assemble_weighted_stiffness()
 - boundary_arclength()
 - boundary_load()
 - embed()
 - make_grid()
 - mass_vector()
 - solve_elliptic()
 - solve_system()
 - stiffness_action()
 - trace_op()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import warnings
from collections import OrderedDict

import numpy as np
from scipy import linalg, sparse

from ._errors import pretty_message
from ._types import type_name, int_types, str_cls, as_vector
from .errors import CoefficientError, ConfigurationError, DimensionError, SolvabilityError
from .numerics import LinOpRep, WeightedSpace


__all__ = [
    'Factorization',
    'Field',
    'Grid',
    'assemble_stiffness',
    'assemble_weighted_stiffness',
    'boundary_arclength',
    'boundary_load',
    'embed',
    'make_grid',
    'mass_vector',
    'solve_elliptic',
    'solve_system',
    'stiffness_action',
    'trace_op',
]


_SIDES = {
    1: ('left', 'right'),
    2: ('left', 'right', 'bottom', 'top'),
}


class Grid(object):

    """
    A uniform grid of (0,1)^dim with P1 elements, lumped volume weights and
    lumped boundary weights. Instances are created by make_grid() and are
    never modified afterwards.
    """

    dim = None
    n = None
    spacing = None

    _coords = None
    _segments = None
    _volume_weights = None
    _boundary_mass = None
    _boundary_nodes = None
    _elements = None
    _element_stiffness = None
    _space = None
    _dual_space = None

    def __init__(self, dim, n, coords, segments, volume_weights, boundary_mass, elements, element_stiffness):
        self.dim = dim
        self.n = n
        self.spacing = 1.0 / (n - 1)
        self._coords = _frozen(coords)
        self._segments = OrderedDict((name, _frozen(nodes)) for name, nodes in segments.items())
        self._volume_weights = _frozen(volume_weights)
        self._boundary_mass = _frozen(boundary_mass)
        self._boundary_nodes = _frozen(np.sort(np.concatenate(list(self._segments.values()))))
        self._elements = _frozen(elements)
        self._element_stiffness = _frozen(element_stiffness)
        self._space = WeightedSpace(self._volume_weights)
        # Load vectors pair with nodal values, so they carry inverse weights
        self._dual_space = WeightedSpace(1.0 / self._volume_weights)

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def node_count(self):
        return self._coords.shape[0]

    @property
    def node_coords(self):
        """
        A numpy array of shape (node_count, dim); nodes are numbered with the
        x index varying fastest
        """

        return self._coords

    @property
    def boundary_nodes(self):
        return self._boundary_nodes

    @property
    def interior_nodes(self):
        mask = np.ones(self.node_count, dtype=bool)
        mask[self._boundary_nodes] = False
        return np.nonzero(mask)[0]

    @property
    def segments(self):
        """
        An OrderedDict of segment name to numpy array of node indices
        """

        return OrderedDict(self._segments)

    @property
    def volume_weights(self):
        return self._volume_weights

    @property
    def boundary_weights(self):
        """
        Lumped boundary weights of the nodes in boundary_nodes, same order
        """

        return self._boundary_mass[self._boundary_nodes]

    @property
    def space(self):
        """
        The WeightedSpace of nodal values, the discrete L2(Omega)
        """

        return self._space

    @property
    def dual_space(self):
        """
        The WeightedSpace of load vectors, weighted with inverse volume weights
        """

        return self._dual_space

    def segment(self, name):
        """
        :param name:
            A unicode string of a segment name

        :raises:
            rangeinvar.errors.ConfigurationError - when the segment is unknown

        :return:
            A numpy array of node indices
        """

        if name not in self._segments:
            raise ConfigurationError(pretty_message(
                '''
                unknown boundary segment %s - grid has %s
                ''',
                repr(name),
                ', '.join(repr(s) for s in self._segments)
            ))
        return self._segments[name]

    def segment_weights(self, name):
        return self._boundary_mass[self.segment(name)]

    def segment_space(self, name):
        """
        :return:
            The WeightedSpace of values on a segment, the discrete L2 of it
        """

        return WeightedSpace(self.segment_weights(name))

    def coordinates(self, axis, segment=None):
        """
        :param axis:
            0 for x, 1 for y

        :param segment:
            None for all nodes, or a segment name

        :return:
            A numpy array of the coordinate values
        """

        values = self._coords[:, axis]
        if segment is not None:
            values = values[self.segment(segment)]
        return values

    def __repr__(self):
        return 'Grid(dim=%d, n=%d)' % (self.dim, self.n)


def _frozen(array):
    array = np.array(array)
    array.flags.writeable = False
    return array


class Field(object):

    """
    Real values on the nodes of a grid, or on the nodes of one boundary
    segment of it
    """

    grid = None
    segment = None
    _values = None

    def __init__(self, grid, values, segment=None):
        """
        :param grid:
            A Grid

        :param values:
            A vector with one entry per grid node, or per segment node when
            segment is given

        :param segment:
            None or a unicode string of a segment name
        """

        if not isinstance(grid, Grid):
            raise TypeError(pretty_message(
                '''
                grid must be an instance of Grid, not %s
                ''',
                type_name(grid)
            ))
        if segment is None:
            length = grid.node_count
        else:
            length = grid.segment(segment).shape[0]

        values = as_vector(values, 'values', length)
        values.flags.writeable = False
        self.grid = grid
        self.segment = segment
        self._values = values

    @classmethod
    def constant(cls, grid, value, segment=None):
        length = grid.node_count if segment is None else grid.segment(segment).shape[0]
        return cls(grid, np.full(length, float(value)), segment)

    @property
    def values(self):
        return self._values

    def __len__(self):
        return self._values.shape[0]

    def __repr__(self):
        where = 'nodes' if self.segment is None else 'segment %r' % self.segment
        return 'Field(%d values on %s)' % (len(self), where)


def _one_d_weights(n, h):
    weights = np.full(n, h)
    weights[0] = weights[-1] = h / 2.0
    return weights


def _side_nodes(dim, n, side):
    if dim == 1:
        return np.array([0]) if side == 'left' else np.array([n - 1])
    idx = np.arange(n)
    if side == 'left':
        return idx * n
    if side == 'right':
        return idx * n + n - 1
    if side == 'bottom':
        return idx
    return (n - 1) * n + idx


def _parse_segments(dim, n, spec):
    if spec is None:
        spec = [('boundary', _SIDES[dim])]
    if isinstance(spec, dict):
        spec = list(spec.items())

    claimed = {}
    segments = OrderedDict()
    for entry in spec:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigurationError(pretty_message(
                '''
                segment entries must be (name, sides) pairs, not %s
                ''',
                repr(entry)
            ))
        name, sides = entry
        if not isinstance(name, str_cls) or not name:
            raise ConfigurationError('segment names must be non-empty strings')
        if name in segments:
            raise ConfigurationError('segment %r is defined more than once' % name)
        if isinstance(sides, str_cls):
            sides = (sides,)

        nodes = []
        for side in sides:
            if side not in _SIDES[dim]:
                raise ConfigurationError(pretty_message(
                    '''
                    side %s is not valid for a %d-D grid - use one of %s
                    ''',
                    repr(side),
                    dim,
                    ', '.join(_SIDES[dim])
                ))
            for node in _side_nodes(dim, n, side):
                node = int(node)
                if node not in claimed:
                    claimed[node] = name
                    nodes.append(node)
        if not nodes:
            raise ConfigurationError('segment %r contains no unclaimed nodes' % name)
        segments[name] = np.array(sorted(nodes), dtype=np.intp)

    expected = set()
    for side in _SIDES[dim]:
        expected.update(int(k) for k in _side_nodes(dim, n, side))
    missing = expected - set(claimed)
    if missing:
        raise ConfigurationError(pretty_message(
            '''
            boundary segments must cover the whole boundary - %d boundary
            nodes are unassigned
            ''',
            len(missing)
        ))
    return segments


def make_grid(dim, n, segments=None):
    """
    Creates a uniform grid of (0,1)^dim with spacing 1/(n-1)

    :param dim:
        1 or 2

    :param n:
        An integer >= 3 of nodes per axis

    :param segments:
        None for a single segment named "boundary", or an ordered list of
        (name, sides) pairs, sides being a tuple of "left", "right" and, for
        dim 2, "bottom", "top". Nodes shared by two sides, i.e. corners,
        belong to the first segment that lists one of them.

    :raises:
        rangeinvar.errors.ConfigurationError - when the partition is invalid

    :return:
        A Grid
    """

    if dim not in (1, 2):
        raise ValueError(pretty_message(
            '''
            dim must be 1 or 2 - is %s
            ''',
            repr(dim)
        ))
    if not isinstance(n, int_types):
        raise TypeError(pretty_message(
            '''
            n must be an integer, not %s
            ''',
            type_name(n)
        ))
    if n < 3:
        raise ValueError(pretty_message(
            '''
            n must be at least 3 - is %s
            ''',
            repr(n)
        ))

    n = int(n)
    h = 1.0 / (n - 1)
    axis = np.linspace(0.0, 1.0, n)
    weights_1d = _one_d_weights(n, h)
    seg_nodes = _parse_segments(dim, n, segments)

    boundary_mass = np.zeros(n ** dim)
    if dim == 1:
        coords = axis[:, None]
        volume_weights = weights_1d
        # A boundary point carries unit mass
        boundary_mass[[0, n - 1]] = 1.0
        elements = np.column_stack([np.arange(n - 1), np.arange(1, n)])
        local = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        element_stiffness = np.repeat(local[None, :, :], n - 1, axis=0)

    else:
        xs, ys = np.meshgrid(axis, axis)
        coords = np.column_stack([xs.ravel(), ys.ravel()])
        volume_weights = np.outer(weights_1d, weights_1d).ravel()
        for side in _SIDES[2]:
            nodes = _side_nodes(2, n, side)
            # Each boundary edge gives half its length to both end nodes
            boundary_mass[nodes[:-1]] += h / 2.0
            boundary_mass[nodes[1:]] += h / 2.0

        i, j = np.meshgrid(np.arange(n - 1), np.arange(n - 1))
        n00 = (j * n + i).ravel()
        n10 = n00 + 1
        n01 = n00 + n
        n11 = n01 + 1
        elements = np.concatenate([
            np.column_stack([n00, n10, n11]),
            np.column_stack([n00, n11, n01]),
        ])
        element_stiffness = _triangle_stiffness(coords[elements])

    return Grid(dim, n, coords, seg_nodes, volume_weights, boundary_mass, elements, element_stiffness)


def _triangle_stiffness(vertices):
    edges = np.stack([vertices[:, 1] - vertices[:, 0], vertices[:, 2] - vertices[:, 0]], axis=2)
    area = 0.5 * np.abs(np.linalg.det(edges))
    # Rows of inv(edges) are the gradients of the barycentric coordinates 1, 2
    grads = np.linalg.inv(edges)
    grads = np.concatenate([-grads.sum(axis=1, keepdims=True), grads], axis=1)
    return area[:, None, None] * np.einsum('eik,ejk->eij', grads, grads)


def _assemble(grid, element_data):
    elements = grid._elements
    local = elements.shape[1]
    rows = np.repeat(elements[:, :, None], local, axis=2)
    cols = np.repeat(elements[:, None, :], local, axis=1)
    matrix = sparse.coo_matrix(
        (element_data.ravel(), (rows.ravel(), cols.ravel())),
        shape=(grid.node_count, grid.node_count)
    )
    return matrix.toarray()


def _check_grid(grid):
    if not isinstance(grid, Grid):
        raise TypeError(pretty_message(
            '''
            grid must be an instance of Grid, not %s
            ''',
            type_name(grid)
        ))


def _nodal_values(grid, value, name):
    if isinstance(value, Field):
        if value.grid is not grid or value.segment is not None:
            raise DimensionError('%s must be a nodal Field of the same grid' % name)
        return value.values
    return as_vector(value, name, grid.node_count)


def assemble_stiffness(grid):
    """
    Assembles the Neumann Laplacian, <Au, v> = integral of grad u . grad v

    :param grid:
        A Grid

    :return:
        A LinOpRep from grid.space to grid.dual_space
    """

    _check_grid(grid)
    return LinOpRep(_assemble(grid, grid._element_stiffness), grid.space, grid.dual_space)


def assemble_weighted_stiffness(grid, a):
    """
    Assembles <A_a u, v> = integral of a grad u . grad v, using the average of
    the nodal values of a on each element

    :param grid:
        A Grid

    :param a:
        A nodal Field or vector of positive values

    :raises:
        rangeinvar.errors.CoefficientError - when min(a) <= 0

    :return:
        A LinOpRep from grid.space to grid.dual_space
    """

    _check_grid(grid)
    values = _nodal_values(grid, a, 'a')
    if values.min() <= 0.0:
        raise CoefficientError(pretty_message(
            '''
            diffusion coefficient must be positive - minimum is %r
            ''',
            float(values.min())
        ))
    return LinOpRep(_weighted_stiffness_matrix(grid, values), grid.space, grid.dual_space)


def _weighted_stiffness_matrix(grid, values):
    element_values = values[grid._elements].mean(axis=1)
    return _assemble(grid, element_values[:, None, None] * grid._element_stiffness)


def stiffness_action(grid, u):
    """
    Builds the matrix G(u) of the coefficient-to-load map a -> A_a u, so that
    assemble_weighted_stiffness(grid, a).matrix.dot(u) == G(u).dot(a)

    :param grid:
        A Grid

    :param u:
        A nodal Field or vector

    :return:
        A numpy array of shape (node_count, node_count)
    """

    _check_grid(grid)
    values = _nodal_values(grid, u, 'u')
    elements = grid._elements
    local = elements.shape[1]
    action = np.einsum('eij,ej->ei', grid._element_stiffness, values[elements]) / local
    data = np.repeat(action[:, :, None], local, axis=2)
    return _assemble(grid, data)


def mass_vector(grid, values):
    """
    :return:
        The lumped mass matrix applied to nodal values, i.e. the load vector
        of a source term
    """

    _check_grid(grid)
    return grid.volume_weights * _nodal_values(grid, values, 'values')


def embed(grid, segment, values):
    """
    :param grid:
        A Grid

    :param segment:
        A unicode string of a segment name

    :param values:
        A vector with one entry per segment node

    :return:
        A nodal numpy array equal to values on the segment and 0 elsewhere
    """

    _check_grid(grid)
    nodes = grid.segment(segment)
    out = np.zeros(grid.node_count)
    out[nodes] = as_vector(values, 'values', nodes.shape[0])
    return out


def boundary_arclength(grid, segment):
    """
    Normalized arclength of segment nodes. In 2-D the boundary is traversed
    counterclockwise from the origin and s lies in [0, 1); in 1-D the left
    end has s = 0 and the right end s = 1.

    :param grid:
        A Grid

    :param segment:
        A unicode string of a segment name

    :return:
        A numpy array with one entry per segment node
    """

    _check_grid(grid)
    nodes = grid.segment(segment)
    coords = grid.node_coords[nodes]
    if grid.dim == 1:
        return coords[:, 0].copy()

    x = coords[:, 0]
    y = coords[:, 1]
    s = np.empty(nodes.shape[0])
    bottom = np.isclose(y, 0.0)
    right = ~bottom & np.isclose(x, 1.0)
    top = ~bottom & ~right & np.isclose(y, 1.0)
    left = ~bottom & ~right & ~top
    s[bottom] = x[bottom]
    s[right] = 1.0 + y[right]
    s[top] = 3.0 - x[top]
    s[left] = 4.0 - y[left]
    return s / 4.0


def boundary_load(grid, h, segment):
    """
    Assembles the load vector of a boundary flux, the integral of h v over
    the segment with lumped boundary mass. Equals the volume weights times
    the weighted adjoint of trace_op(grid, segment) applied to h.

    :param grid:
        A Grid

    :param h:
        A Field on the segment, or a vector with one value per segment node

    :param segment:
        A unicode string of a segment name

    :raises:
        rangeinvar.errors.ConfigurationError - when the segment is unknown

    :return:
        A nodal numpy array
    """

    _check_grid(grid)
    nodes = grid.segment(segment)
    if isinstance(h, Field):
        if h.grid is not grid or h.segment != segment:
            raise DimensionError('h must be a Field on segment %r of the same grid' % segment)
        h = h.values
    values = as_vector(h, 'h', nodes.shape[0])
    out = np.zeros(grid.node_count)
    out[nodes] = grid.segment_weights(segment) * values
    return out


def trace_op(grid, segment):
    """
    :param grid:
        A Grid

    :param segment:
        A unicode string of a segment name

    :raises:
        rangeinvar.errors.ConfigurationError - when the segment is unknown

    :return:
        A LinOpRep selecting the segment values of a nodal vector, from
        grid.space to the boundary-weighted space of the segment
    """

    _check_grid(grid)
    nodes = grid.segment(segment)
    matrix = np.zeros((nodes.shape[0], grid.node_count))
    matrix[np.arange(nodes.shape[0]), nodes] = 1.0
    return LinOpRep(matrix, grid.space, grid.segment_space(segment))


class Factorization(object):

    """
    An LU factorization of a dense square matrix that refuses matrices whose
    pivots are not bounded away from zero and checks the residual of every
    solve
    """

    what = None
    _matrix = None
    _factor = None

    def __init__(self, matrix, what='forward problem'):
        """
        :param matrix:
            A square numpy array

        :param what:
            A unicode string describing the system for error messages

        :raises:
            rangeinvar.errors.SolvabilityError - when the smallest pivot is
            below 1e-12 times the largest
        """

        self.what = what
        self._matrix = np.asarray(matrix, dtype=np.float64)

        with warnings.catch_warnings():
            warnings.simplefilter('error', linalg.LinAlgWarning)
            try:
                factor = linalg.lu_factor(self._matrix, check_finite=False)
            except (linalg.LinAlgWarning, linalg.LinAlgError, ValueError):
                factor = None

        if factor is not None:
            pivots = np.abs(np.diag(factor[0]))
            if not np.all(np.isfinite(pivots)) or not pivots.max() > 0.0 \
                    or pivots.min() < 1e-12 * pivots.max():
                factor = None

        if factor is None:
            raise SolvabilityError(pretty_message(
                '''
                %s is singular, the parameter lies outside the domain D(F) of
                the forward operator
                ''',
                what
            ))
        self._factor = factor

    @property
    def matrix(self):
        return self._matrix

    def solve(self, rhs, transpose=False):
        """
        :param rhs:
            A numpy array with one or two dimensions

        :param transpose:
            If the system with the transposed matrix should be solved

        :raises:
            rangeinvar.errors.SolvabilityError - when the residual exceeds
            1e-10 relative to rhs

        :return:
            A numpy array shaped like rhs
        """

        matrix = self._matrix.T if transpose else self._matrix
        solution = linalg.lu_solve(self._factor, rhs, trans=1 if transpose else 0, check_finite=False)
        residual = np.linalg.norm(matrix.dot(solution) - rhs)
        if not np.isfinite(residual) or residual > 1e-10 * np.linalg.norm(rhs):
            raise SolvabilityError(pretty_message(
                '''
                %s could not be solved to a residual of 1e-10, the parameter
                lies outside the domain D(F) of the forward operator
                ''',
                self.what
            ))
        return solution


def solve_system(matrix, rhs, what='forward problem'):
    """
    Solves a dense square system with a checked LU factorization

    :param matrix:
        A square numpy array

    :param rhs:
        A numpy array

    :param what:
        A unicode string describing the system for error messages

    :raises:
        rangeinvar.errors.SolvabilityError - when the pivot ratio is below
        1e-12 or the residual exceeds 1e-10 relative to rhs

    :return:
        A numpy array
    """

    return Factorization(matrix, what).solve(rhs)


def solve_elliptic(A, q, rhs):
    """
    Solves (A + M diag(q)) u = rhs, M being the lumped mass

    :param A:
        A LinOpRep from assemble_stiffness() or assemble_weighted_stiffness()

    :param q:
        A nodal Field of the potential

    :param rhs:
        A nodal load vector

    :raises:
        rangeinvar.errors.SolvabilityError - when the system is singular

    :return:
        A nodal Field u
    """

    if not isinstance(q, Field):
        raise TypeError(pretty_message(
            '''
            q must be an instance of Field, not %s
            ''',
            type_name(q)
        ))
    grid = q.grid
    if not isinstance(A, LinOpRep) or A.shape != (grid.node_count, grid.node_count):
        raise DimensionError('A must be a square LinOpRep matching the grid of q')
    rhs = as_vector(rhs, 'rhs', grid.node_count)

    matrix = A.matrix + np.diag(grid.volume_weights * _nodal_values(grid, q, 'q'))
    return Field(grid, solve_system(matrix, rhs, 'elliptic problem'))

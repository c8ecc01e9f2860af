"""Real Hilbert spaces: Euclidean coordinate spaces and quadrature-discretized
L2 spaces on an interval.

An L2 space is represented by a composite midpoint grid with interior nodes
t_i = a + (i - 1/2) h, h = (b - a)/N and uniform weights w_i = h.  Interior
nodes keep endpoint-singular catalog functions (log, sqrt at 0) finite, the
rule is exact on affine functions, and the error is O(N^-2) on smooth ones.

Elements are immutable; every operation returns a new element.  All
operations are pure and safe to use from concurrent threads.
"""

import math

import numpy as np

from ._backend import kernels
from .errors import DomainError, SpaceMismatchError, UnknownFunctionError

__all__ = [
    "QuadratureGrid",
    "EuclideanSpace",
    "L2Space",
    "HilbertElement",
    "inner",
    "norm",
    "combine",
    "integrate",
    "sample_catalog_function",
    "catalog_names",
]


class QuadratureGrid:
    """Composite midpoint rule on [a, b] with ``n`` interior nodes.

    Attributes
    ----------
    a, b : float
        Interval endpoints, a < b.
    n : int
        Node count, at least 2.
    nodes : ndarray
        Strictly increasing nodes in the open interval (a, b).
    weights : ndarray
        Strictly positive weights summing to b - a.
    """

    __slots__ = ("a", "b", "n", "nodes", "weights")

    def __init__(self, a, b, n):
        a = float(a)
        b = float(b)
        n = int(n)
        if not a < b:
            raise ValueError(f"need a < b, got [{a}, {b}]")
        if n < 2:
            raise ValueError(f"need at least 2 nodes, got {n}")
        h = (b - a) / n
        nodes = a + (np.arange(n, dtype=np.float64) + 0.5) * h
        weights = np.full(n, h, dtype=np.float64)
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("QuadratureGrid is immutable")

    def __eq__(self, other):
        return (isinstance(other, QuadratureGrid)
                and self.a == other.a and self.b == other.b and self.n == other.n)

    def __hash__(self):
        return hash((self.a, self.b, self.n))

    def __repr__(self):
        return f"QuadratureGrid({self.a!r}, {self.b!r}, n={self.n})"


class _Space:
    """Common behavior of space handles."""

    def element(self, values):
        """Wrap ``values`` as an element of this space (validating them)."""
        return HilbertElement(self, values)

    def zero(self):
        return _wrap(self, np.zeros(self.dim))

    def from_samples(self, values):
        return self.element(values)


class EuclideanSpace(_Space):
    """R^d with the standard inner product."""

    __slots__ = ("dim", "weights")

    def __init__(self, dim):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        w = np.ones(dim, dtype=np.float64)
        w.flags.writeable = False
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("EuclideanSpace is immutable")

    def __eq__(self, other):
        return isinstance(other, EuclideanSpace) and self.dim == other.dim

    def __hash__(self):
        return hash(("euclidean", self.dim))

    def __repr__(self):
        return f"EuclideanSpace({self.dim})"


class L2Space(_Space):
    """L2(a, b) discretized on a quadrature grid."""

    __slots__ = ("grid", "dim", "weights")

    def __init__(self, grid):
        if not isinstance(grid, QuadratureGrid):
            raise TypeError("L2Space expects a QuadratureGrid")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "dim", grid.n)
        object.__setattr__(self, "weights", grid.weights)

    def __setattr__(self, name, value):
        raise AttributeError("L2Space is immutable")

    def __eq__(self, other):
        return isinstance(other, L2Space) and self.grid == other.grid

    def __hash__(self):
        return hash(("l2", self.grid))

    def __repr__(self):
        return f"L2Space({self.grid!r})"

    def sample(self, fn):
        """Element with values fn(t_i) at the grid nodes."""
        return self.element(fn(self.grid.nodes))


def _wrap(space, values):
    """Element constructor for internal use; skips validation."""
    elem = object.__new__(HilbertElement)
    values = np.asarray(values, dtype=np.float64)
    if values.flags.writeable:
        values = np.ascontiguousarray(values)
        values.flags.writeable = False
    object.__setattr__(elem, "space", space)
    object.__setattr__(elem, "values", values)
    return elem


class HilbertElement:
    """A point of a space together with its space handle.

    ``values`` holds coordinates (Euclidean) or node samples (L2).  Elements
    are immutable; arithmetic returns new elements and requires identical
    space handles.
    """

    __slots__ = ("space", "values")

    def __init__(self, space, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != space.dim:
            raise ValueError(
                f"expected {space.dim} values for {space!r}, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("element values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("HilbertElement is immutable")

    def _check_same_space(self, other):
        if self.space != other.space:
            raise SpaceMismatchError(
                f"elements live in different spaces: {self.space!r} vs {other.space!r}")

    def __add__(self, other):
        self._check_same_space(other)
        return _wrap(self.space, kernels.axpby(1.0, self.values, 1.0, other.values))

    def __sub__(self, other):
        self._check_same_space(other)
        return _wrap(self.space, kernels.axpby(1.0, self.values, -1.0, other.values))

    def __mul__(self, a):
        return _wrap(self.space, kernels.scale(float(a), self.values))

    __rmul__ = __mul__

    def __neg__(self):
        return _wrap(self.space, kernels.scale(-1.0, self.values))

    def __repr__(self):
        return f"HilbertElement({self.space!r}, n={self.values.shape[0]})"


def inner(x, y):
    """Inner product; for L2 the quadrature form sum(w_i x_i y_i)."""
    x._check_same_space(y)
    return kernels.dot_w(x.space.weights, x.values, y.values)


def norm(x):
    """Induced norm sqrt(inner(x, x))."""
    return kernels.norm_w(x.space.weights, x.values)


def combine(a, x, b, y):
    """Pointwise linear combination a*x + b*y."""
    x._check_same_space(y)
    return _wrap(x.space, kernels.axpby(float(a), x.values, float(b), y.values))


def integrate(x):
    """Quadrature integral sum(w_i x_i) of an L2 element."""
    if not isinstance(x.space, L2Space):
        raise DomainError("integrate is defined for L2 elements only")
    return kernels.weighted_sum(x.space.weights, x.values)


# --- function catalog -------------------------------------------------------

_CATALOG = {
    "t": lambda t: t.copy(),
    "t^2": lambda t: t ** 2,
    "t^3": lambda t: t ** 3,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "t^2/10": lambda t: t ** 2 / 10.0,
    "2^t/16": lambda t: 2.0 ** t / 16.0,
    "zero": np.zeros_like,
}

_ALIASES = {
    "x": "t", "id": "t",
    "x^2": "t^2", "x^3": "t^3",
    "x^2/10": "t^2/10", "2^x/16": "2^t/16",
    "0": "zero",
}


def _canonical_name(name):
    key = str(name).strip().lower().replace(" ", "")
    key = key.replace("²", "^2").replace("³", "^3")
    key = key.replace("**", "^")
    for arg in ("(t)", "(x)", "(s)"):
        key = key.replace(arg, "")
    key = _ALIASES.get(key, key)
    if key not in _CATALOG:
        raise UnknownFunctionError(
            f"unknown catalog function {name!r}; known: {sorted(_CATALOG)}")
    return key


def catalog_names():
    """Canonical names of the sampled-function catalog."""
    return sorted(_CATALOG)


def sample_catalog_function(name, grid):
    """Sample a catalog function on a grid as an L2 element.

    Accepts common alias spellings ('x^2/10', 'sin(t)', unicode powers).
    """
    key = _canonical_name(name)
    space = L2Space(grid)
    return space.element(_CATALOG[key](grid.nodes))


def l2_space(a, b, n):
    """Convenience: the L2 space over [a, b] on an n-node midpoint grid."""
    return L2Space(QuadratureGrid(a, b, n))


TWO_PI = 2.0 * math.pi

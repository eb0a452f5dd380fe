"""Discretized function calculus on the positive orthant.

Tensor-product quadrature grids over a truncated box, semigroup application
by kernel quadrature, the heat maximal function, L^p (quasi-)norms, the
oscillatory eigenfunctions, and a finite-difference version of the
first-order operator delta used as a cross-check oracle.

Grids are log-spaced by default (dense near the boundary where the critical
radius and the kernel weights vary fastest) with trapezoid weights for
nonuniform nodes, so the weights sum exactly to the box measure.  Functions
are sampled on the tensor grid and treated as immutable after construction.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, GridError
from .heat import NuVector, as_nu_vector, _p1d, eval_delta_heat_1d
from .special import gamma

__all__ = [
    "Axis",
    "Grid",
    "GridFunction",
    "EigenfunctionSpec",
    "log_axis",
    "uniform_axis",
    "default_grid",
    "T_GRID_DEFAULT",
    "DEFAULT_BOX",
    "apply_semigroup",
    "maximal_function",
    "lp_norm",
    "besselj",
    "eigenfunction",
    "eigenfunction_gridfn",
    "apply_delta_fd",
    "gridfunction_to_csv",
    "gridfunction_from_csv",
    "grid_to_json",
    "grid_from_json",
]

DEFAULT_BOX = (1e-2, 20.0)
T_GRID_DEFAULT = tuple(2.0**m for m in range(-10, 7))


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.empty_like(nodes)
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    return w


@dataclass(eq=False)
class Axis:
    """One grid axis: strictly increasing positive nodes plus weights."""

    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    lo: float
    hi: float

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.size < 3:
            raise GridError("axis needs at least 3 nodes")
        if np.any(self.nodes <= 0.0) or np.any(np.diff(self.nodes) <= 0.0):
            raise GridError("axis nodes must be positive and strictly increasing")
        if np.any(self.weights <= 0.0):
            raise GridError("axis weights must be positive")
        measure = self.hi - self.lo
        if abs(float(np.sum(self.weights)) - measure) > 1e-12 * max(1.0, measure):
            raise GridError("axis weights must sum to the interval length")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self._digest = hash(self.nodes.tobytes())

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def spacing_max(self) -> float:
        return float(np.max(np.diff(self.nodes)))

    def cache_key(self):
        return (
            self.scheme,
            float(self.lo),
            float(self.hi),
            int(self.nodes.size),
            self._digest,
        )


def log_axis(lo: float, hi: float, n: int) -> Axis:
    if not 0.0 < lo < hi:
        raise GridError("need 0 < lo < hi")
    nodes = np.geomspace(lo, hi, int(n))
    nodes[0], nodes[-1] = lo, hi
    return Axis(nodes, _trapezoid_weights(nodes), "logarithmic", float(lo), float(hi))


def uniform_axis(lo: float, hi: float, n: int) -> Axis:
    if not 0.0 < lo < hi:
        raise GridError("need 0 < lo < hi")
    nodes = np.linspace(lo, hi, int(n))
    return Axis(nodes, _trapezoid_weights(nodes), "uniform", float(lo), float(hi))


@dataclass(eq=False)
class Grid:
    """Tensor product of axes over a box strictly inside the open orthant."""

    axes: tuple[Axis, ...]

    def __post_init__(self):
        self.axes = tuple(self.axes)
        if not self.axes:
            raise GridError("grid needs at least one axis")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.size for ax in self.axes)

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        return tuple((ax.lo, ax.hi) for ax in self.axes)

    def cache_key(self):
        return tuple(ax.cache_key() for ax in self.axes)

    @cached_property
    def weight_array(self) -> np.ndarray:
        w = self.axes[0].weights
        for ax in self.axes[1:]:
            w = np.multiply.outer(w, ax.weights)
        w.setflags(write=False)
        return w

    @cached_property
    def node_mesh(self) -> tuple[np.ndarray, ...]:
        mesh = np.meshgrid(*(ax.nodes for ax in self.axes), indexing="ij")
        for m in mesh:
            m.setflags(write=False)
        return tuple(mesh)

    def points(self) -> np.ndarray:
        """All nodes as an (npoints, ndim) array in C order."""
        return np.stack([m.ravel() for m in self.node_mesh], axis=-1)


def default_grid(n: int = 1, nodes_per_axis: int = 512, box=DEFAULT_BOX) -> Grid:
    lo, hi = box
    return Grid(tuple(log_axis(lo, hi, nodes_per_axis) for _ in range(n)))


@dataclass(eq=False)
class GridFunction:
    """Sampled function on a grid; values are frozen after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"value shape {self.values.shape} != grid shape {self.grid.shape}"
            )
        self.values.setflags(write=False)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(*grid.node_mesh), dtype=float))

    def integral(self) -> float:
        return float(np.sum(self.grid.weight_array * self.values))


# ---------------------------------------------------------------------------
# Semigroup application and the maximal function

_KERNEL_MATRIX_CACHE: dict = {}


def _kernel_matrix(nu_j: float, t: float, axis: Axis) -> np.ndarray:
    """K[i, i'] = p_t^{nu_j}(x_i, x_{i'}) * w_{i'}; cached per axis."""
    key = (axis.cache_key(), float(nu_j), float(t))
    hit = _KERNEL_MATRIX_CACHE.get(key)
    if hit is not None:
        return hit
    x = axis.nodes
    mat = _p1d(nu_j, t, x[:, None], x[None, :]) * axis.weights[None, :]
    mat.setflags(write=False)
    if len(_KERNEL_MATRIX_CACHE) > 4096:
        _KERNEL_MATRIX_CACHE.clear()
    _KERNEL_MATRIX_CACHE[key] = mat
    return mat


def apply_semigroup(nu, t: float, f: GridFunction) -> GridFunction:
    """Quadrature discretization of the heat semigroup at time t.

    g(x_i) = sum_j w_j p_t(x_i, y_j) f(y_j), one kernel contraction per axis;
    linear in f and positivity preserving.
    """
    nu = as_nu_vector(nu)
    if nu.n != f.grid.ndim:
        raise GridError("order vector dimension does not match grid")
    if not t > 0.0:
        raise DomainError("time must be positive")
    out = f.values
    for j in range(f.grid.ndim):
        mat = _kernel_matrix(nu.nu[j], t, f.grid.axes[j])
        out = np.moveaxis(np.tensordot(mat, out, axes=(1, j)), 0, j)
    return GridFunction(f.grid, out)


def maximal_function(nu, f: GridFunction, t_grid=T_GRID_DEFAULT) -> GridFunction:
    """Pointwise max over the time grid of |semigroup applied to f|.

    A finite time grid undershoots the supremum over all t > 0; callers that
    need a sensitivity estimate should compare against a denser grid.
    """
    t_grid = tuple(float(t) for t in t_grid)
    if not t_grid:
        raise DomainError("t_grid must be nonempty")
    best = None
    for t in t_grid:
        g = np.abs(apply_semigroup(nu, t, f).values)
        best = g if best is None else np.maximum(best, g)
    return GridFunction(f.grid, best)


def lp_norm(f: GridFunction, p: float) -> float:
    """Quadrature L^p norm; quasi-norm for p < 1; sup norm for p = inf."""
    if p == math.inf:
        return float(np.max(np.abs(f.values)))
    if not p > 0.0:
        raise DomainError("p must be positive or inf")
    w = f.grid.weight_array
    return float(np.sum(w * np.abs(f.values) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# Eigenfunctions


@dataclass(frozen=True)
class EigenfunctionSpec:
    """Frequency vector of the oscillatory generalized eigenfunction."""

    lam: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(float(v) for v in np.atleast_1d(self.lam)))
        if any(v <= 0.0 for v in self.lam):
            raise DomainError("frequency components must be positive")

    @property
    def norm2(self) -> float:
        return float(sum(v * v for v in self.lam))


def besselj(alpha: float, z):
    """First-kind Bessel J_alpha via its alternating power series.

    Adequate for the moderate arguments that arise on truncated boxes
    (z up to a few tens); heavy cancellation beyond that is not handled.
    """
    alpha = float(alpha)
    if alpha <= -1.0:
        raise DomainError("order must exceed -1")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    zero = z == 0.0
    if np.any(zero):
        out[zero] = 1.0 if alpha == 0.0 else (0.0 if alpha > 0.0 else np.inf)
    pos = ~zero
    if np.any(pos):
        zz = z[pos]
        term = np.exp(alpha * np.log(0.5 * zz)) / gamma(alpha + 1.0)
        total = term.copy()
        q = 0.25 * zz * zz
        for k in range(400):
            term = term * (-q) / ((k + 1.0) * (alpha + k + 1.0))
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
                break
        out[pos] = total
    return float(out[0]) if scalar else out


def eigenfunction(nu, spec: EigenfunctionSpec, x) -> float:
    """phi_lam(x) = prod_j (lam_j x_j)^{1/2} J_{nu_j}(lam_j x_j)."""
    nu = as_nu_vector(nu)
    xs = tuple(float(v) for v in np.atleast_1d(x))
    if len(xs) != nu.n or len(spec.lam) != nu.n:
        raise DomainError("dimension mismatch")
    if any(v <= 0.0 for v in xs):
        raise DomainError("coordinates must be positive")
    out = 1.0
    for j in range(nu.n):
        z = spec.lam[j] * xs[j]
        out *= math.sqrt(z) * float(besselj(nu.nu[j], z))
    return out


def eigenfunction_gridfn(nu, spec: EigenfunctionSpec, grid: Grid) -> GridFunction:
    """phi_lam sampled on the tensor grid (separable, built per axis)."""
    nu = as_nu_vector(nu)
    vals = None
    for j in range(grid.ndim):
        z = spec.lam[j] * grid.axes[j].nodes
        fj = np.sqrt(z) * besselj(nu.nu[j], z)
        vals = fj if vals is None else np.multiply.outer(vals, fj)
    return GridFunction(grid, vals)


# ---------------------------------------------------------------------------
# Finite-difference delta (cross-check oracle only)


def apply_delta_fd(nu, axis_index: int, f: GridFunction) -> GridFunction:
    """Central-difference d/dx_j minus (nu_j+1/2)/x_j, on nonuniform nodes.

    Interior nodes use the 3-point nonuniform stencil; the two boundary
    nodes fall back to one-sided differences.
    """
    nu = as_nu_vector(nu)
    j = int(axis_index)
    if not 0 <= j < f.grid.ndim:
        raise GridError("axis index out of range")
    ax = f.grid.axes[j]
    if ax.size < 3:
        raise GridError("grid too coarse for differencing")
    vals = np.moveaxis(f.values, j, 0)
    x = ax.nodes.reshape((-1,) + (1,) * (vals.ndim - 1))
    d = np.empty_like(vals)
    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    d[1:-1] = (
        vals[2:] * hm**2 - vals[:-2] * hp**2 + vals[1:-1] * (hp**2 - hm**2)
    ) / (hm * hp * (hm + hp))
    d[0] = (vals[1] - vals[0]) / (x[1] - x[0])
    d[-1] = (vals[-1] - vals[-2]) / (x[-1] - x[-2])
    out = d - (nu.nu[j] + 0.5) / x * vals
    return GridFunction(f.grid, np.moveaxis(out, 0, j))


# ---------------------------------------------------------------------------
# Serialization


def gridfunction_to_csv(f: GridFunction, path=None) -> str:
    """CSV with header x1,...,xn,value; rows enumerate nodes in C order."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f"x{i+1}" for i in range(f.grid.ndim)] + ["value"])
    pts = f.grid.points()
    for row, v in zip(pts, f.values.ravel()):
        writer.writerow([repr(float(c)) for c in row] + [repr(float(v))])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def gridfunction_from_csv(source, grid: Grid | None = None) -> GridFunction:
    """Rebuild a grid function written by gridfunction_to_csv.

    If ``grid`` is omitted the axes are inferred from the node coordinates
    (trapezoid weights, scheme tag "custom"); the file must cover the full
    tensor grid in C order.
    """
    if isinstance(source, str) and "\n" in source:
        fh = io.StringIO(source)
    else:
        fh = open(source, newline="")
    with fh:
        reader = csv.reader(fh)
        header = next(reader)
        ndim = len(header) - 1
        rows = [[float(c) for c in row] for row in reader if row]
    data = np.asarray(rows)
    if grid is None:
        axes = []
        for j in range(ndim):
            nodes = np.unique(data[:, j])
            axes.append(
                Axis(nodes, _trapezoid_weights(nodes), "custom", nodes[0], nodes[-1])
            )
        grid = Grid(tuple(axes))
    shape = grid.shape
    if data.shape[0] != int(np.prod(shape)):
        raise GridError("csv does not cover the full tensor grid")
    expected = grid.points()
    if not np.allclose(expected, data[:, :ndim], rtol=0, atol=1e-12):
        raise GridError("csv node ordering does not match the grid")
    return GridFunction(grid, data[:, -1].reshape(shape))


def grid_to_json(grid: Grid, path=None) -> str:
    payload = {
        "axes": [
            {
                "nodes": [repr(v) for v in ax.nodes.tolist()],
                "weights": [repr(v) for v in ax.weights.tolist()],
                "scheme": ax.scheme,
                "lo": ax.lo,
                "hi": ax.hi,
            }
            for ax in grid.axes
        ]
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def grid_from_json(source) -> Grid:
    if isinstance(source, str) and source.lstrip().startswith("{"):
        payload = json.loads(source)
    else:
        with open(source) as fh:
            payload = json.load(fh)
    axes = []
    for ax in payload["axes"]:
        nodes = np.asarray([float(v) for v in ax["nodes"]])
        weights = np.asarray([float(v) for v in ax["weights"]])
        axes.append(Axis(nodes, weights, ax["scheme"], float(ax["lo"]), float(ax["hi"])))
    return Grid(tuple(axes))

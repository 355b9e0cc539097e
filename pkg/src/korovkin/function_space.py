"""Finite sampled-function spaces.

Functions are represented by their values on a fixed finite point set
(a grid in the nonnegative orthant).  Everything downstream -- operator
families, axiom searches, error bounds -- works on these samples, so the
sup norm and the modulus of continuity defined here are exact statements
about the sampled space, not approximations of a continuum quantity.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Domain",
    "SampledFunction",
    "TestFunctionSet",
    "uniform_grid",
    "product_grid",
    "sup_norm",
    "modulus_of_continuity",
    "test_functions",
    "corpus_function",
    "corpus_names",
    "lipschitz_estimate",
    "grid_tolerance",
    "write_sampled_function",
    "read_sampled_function",
]

# Pairs at distance d count as within reach of delta when d <= delta*(1+_REL_SLACK).
# The slack absorbs roundoff in grid coordinates so that "exactly delta apart"
# pairs are never dropped; it is far below every tolerance used on top.
_REL_SLACK = 1e-12


@dataclass(frozen=True)
class Domain:
    """A finite point set in the nonnegative orthant of R^dim.

    ``points`` has shape (size, dim).  ``mesh`` is the covering radius of
    the sample set inside the region it discretizes: every point of the
    underlying region lies within ``mesh`` of some sample.  Intrinsically
    finite domains may use mesh 0.
    """

    points: np.ndarray
    mesh: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("domain needs a (size, dim) point array with size, dim >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("domain points must be finite")
        if pts.min() < 0.0:
            raise ValueError("domain points must lie in the nonnegative orthant")
        if float(self.mesh) < 0.0:
            raise ValueError("mesh must be nonnegative")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mesh", float(self.mesh))
        if self.size > 1:
            order = np.lexsort(pts.T[::-1])
            if not np.any(np.diff(pts[order], axis=0), axis=1).all():
                raise ValueError("domain points must be pairwise distinct")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def coords(self) -> np.ndarray:
        """1-D coordinate vector; only defined when dim == 1."""
        if self.dim != 1:
            raise ValueError("coords is only defined for 1-D domains")
        return self.points[:, 0]

    @cached_property
    def _sorted_index(self) -> np.ndarray:
        return np.argsort(self.coords, kind="stable")

    @cached_property
    def _uniform_spacing(self) -> float | None:
        """Common spacing of the sorted 1-D coordinates, or None."""
        if self.dim != 1 or self.size < 2:
            return None
        x = self.coords[self._sorted_index]
        h = (x[-1] - x[0]) / (self.size - 1)
        if h <= 0.0:
            return None
        dev = np.abs(np.diff(x) - h).max()
        return float(h) if dev <= 1e-12 * max(1.0, x[-1] - x[0]) else None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Domain):
            return NotImplemented
        return self.mesh == other.mesh and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.points.shape, self.mesh))

    def __repr__(self):
        return f"Domain(size={self.size}, dim={self.dim}, mesh={self.mesh!r})"


def uniform_grid(a: float, b: float, m: int) -> Domain:
    """Equally spaced grid of m points on [a, b], 0 <= a < b, m >= 2.

    The mesh is half the spacing: no point of [a, b] is farther than
    (b - a) / (2 (m - 1)) from the grid.
    """
    if not (0.0 <= a < b):
        raise ValueError(f"need 0 <= a < b, got a={a!r}, b={b!r}")
    if m < 2:
        raise ValueError(f"need m >= 2 grid points, got m={m}")
    pts = np.linspace(a, b, m)
    return Domain(pts[:, None], mesh=(b - a) / (2.0 * (m - 1)))


def product_grid(factors: Sequence[Domain]) -> Domain:
    """Cartesian product of 1-D domains, in lexicographic point order.

    The covering radius of a product of grids is the Euclidean norm of
    the factor covering radii (worst case: a point missing each factor
    sample by that factor's mesh simultaneously).
    """
    if not factors:
        raise ValueError("need at least one factor")
    for f in factors:
        if f.dim != 1:
            raise ValueError("product_grid factors must be 1-D domains")
    axes = [f.coords for f in factors]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    mesh = float(np.sqrt(sum(f.mesh**2 for f in factors)))
    return Domain(pts, mesh=mesh)


@dataclass(frozen=True)
class SampledFunction:
    """Real values attached to the points of a Domain."""

    domain: Domain
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.domain.size,):
            raise ValueError(
                f"values shape {vals.shape} does not match domain size {self.domain.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values must be finite")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, domain: Domain, fn: Callable, name: str = "") -> "SampledFunction":
        """Sample fn on the domain; fn maps a (size, dim) array to (size,) values.

        For 1-D domains fn may also act on the bare coordinate vector.
        """
        try:
            vals = np.asarray(fn(domain.points), dtype=float)
        except (TypeError, ValueError, IndexError):
            vals = None
        if vals is None or vals.shape != (domain.size,):
            if domain.dim == 1:
                vals = np.asarray(fn(domain.coords), dtype=float)
            else:
                raise ValueError("callable did not produce one value per domain point")
        return cls(domain, vals, name=name)

    def with_values(self, values: np.ndarray, name: str = "") -> "SampledFunction":
        return SampledFunction(self.domain, values, name=name or self.name)

    # Small pointwise algebra; operators and axiom searches lean on these.
    def __add__(self, other):
        return SampledFunction(self.domain, self.values + self._vals(other))

    def __sub__(self, other):
        return SampledFunction(self.domain, self.values - self._vals(other))

    def __mul__(self, other):
        return SampledFunction(self.domain, self.values * self._vals(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(self.domain, -self.values)

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.domain, np.abs(self.values))

    def _vals(self, other):
        if isinstance(other, SampledFunction):
            if other.domain != self.domain:
                raise ValueError("operands live on different domains")
            return other.values
        return float(other)


@dataclass(frozen=True)
class TestFunctionSet:
    """The Korovkin test set on a domain: 1, -pr_1 ... -pr_N, sum of pr_k^2."""

    one: SampledFunction
    neg_projections: tuple
    sum_squares: SampledFunction


def test_functions(domain: Domain) -> TestFunctionSet:
    """Build the Korovkin test set for a domain of any dimension."""
    one = SampledFunction(domain, np.ones(domain.size), name="one")
    negs = tuple(
        SampledFunction(domain, -domain.points[:, k], name=f"neg_pr_{k + 1}")
        for k in range(domain.dim)
    )
    ssq = SampledFunction(domain, (domain.points**2).sum(axis=1), name="sum_squares")
    return TestFunctionSet(one=one, neg_projections=negs, sum_squares=ssq)


def sup_norm(f: SampledFunction) -> float:
    """Max of |f| over the domain."""
    return float(np.abs(f.values).max())


def modulus_of_continuity(f: SampledFunction, delta: float) -> float:
    """Largest |f(x) - f(y)| over point pairs with Euclidean distance <= delta.

    By convention the value at delta = 0 is 0 (pairs of distinct points in a
    finite set are at positive distance).  Uniform 1-D grids use an O(size)
    block-max scan, other sorted 1-D grids a two-pointer sweep, and general
    point sets a chunked all-pairs scan.
    """
    if not np.isfinite(delta) or delta < 0.0:
        raise ValueError(f"delta must be finite and nonnegative, got {delta!r}")
    dom = f.domain
    if delta == 0.0 or dom.size < 2:
        return 0.0
    d_eff = delta * (1.0 + _REL_SLACK)
    if dom.dim == 1:
        order = dom._sorted_index
        vals = f.values[order]
        h = dom._uniform_spacing
        if h is not None:
            return _window_range_uniform(vals, int(d_eff / h))
        return _window_range_sorted(dom.coords[order], vals, d_eff)
    return _window_range_pairs(dom.points, f.values, d_eff)


def _window_range_uniform(vals: np.ndarray, w: int) -> float:
    """Max over all index windows [i, i+w] of (max - min) of vals."""
    m = vals.size
    if w <= 0:
        return 0.0
    if w >= m - 1:
        return float(vals.max() - vals.min())
    length = w + 1
    nwin = m - w
    pad = (-m) % length
    hi = np.concatenate([vals, np.full(pad, -np.inf)]).reshape(-1, length)
    lo = np.concatenate([vals, np.full(pad, np.inf)]).reshape(-1, length)
    # van Herk block scan: window [i, i+w] = suffix of i's block + prefix of (i+w)'s block
    hi_pre = np.maximum.accumulate(hi, axis=1).ravel()
    hi_suf = np.maximum.accumulate(hi[:, ::-1], axis=1)[:, ::-1].ravel()
    lo_pre = np.minimum.accumulate(lo, axis=1).ravel()
    lo_suf = np.minimum.accumulate(lo[:, ::-1], axis=1)[:, ::-1].ravel()
    wmax = np.maximum(hi_suf[:nwin], hi_pre[w : w + nwin])
    wmin = np.minimum(lo_suf[:nwin], lo_pre[w : w + nwin])
    return float((wmax - wmin).max())


def _window_range_sorted(x: np.ndarray, vals: np.ndarray, d_eff: float) -> float:
    """Two-pointer sweep over a sorted, possibly nonuniform 1-D grid."""
    m = x.size
    maxq: deque = deque()  # indices, values decreasing
    minq: deque = deque()  # indices, values increasing
    best = 0.0
    j = 0
    for i in range(m):
        reach = x[i] + d_eff
        while j < m and x[j] <= reach:
            v = vals[j]
            while maxq and vals[maxq[-1]] <= v:
                maxq.pop()
            maxq.append(j)
            while minq and vals[minq[-1]] >= v:
                minq.pop()
            minq.append(j)
            j += 1
        while maxq[0] < i:
            maxq.popleft()
        while minq[0] < i:
            minq.popleft()
        best = max(best, vals[maxq[0]] - vals[minq[0]])
    return float(best)


def _window_range_pairs(pts: np.ndarray, vals: np.ndarray, d_eff: float) -> float:
    """Chunked all-pairs scan for general point sets."""
    m = pts.shape[0]
    chunk = max(1, 4_000_000 // m)
    best = 0.0
    d2 = d_eff * d_eff
    for s in range(0, m, chunk):
        block = pts[s : s + chunk]
        dist2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        diff = np.abs(vals[s : s + chunk, None] - vals[None, :])
        hits = diff[dist2 <= d2]
        if hits.size:
            best = max(best, float(hits.max()))
    return best


def lipschitz_estimate(f: SampledFunction) -> float:
    """Largest difference quotient |f(x) - f(y)| / |x - y| over sample pairs.

    On sorted 1-D grids consecutive pairs suffice (telescoping); general
    point sets fall back to an all-pairs scan.
    """
    dom = f.domain
    if dom.size < 2:
        return 0.0
    if dom.dim == 1:
        order = dom._sorted_index
        x = dom.coords[order]
        v = f.values[order]
        return float(np.max(np.abs(np.diff(v)) / np.diff(x)))
    pts = dom.points
    m = pts.shape[0]
    chunk = max(1, 4_000_000 // m)
    best = 0.0
    for s in range(0, m, chunk):
        block = pts[s : s + chunk]
        dist = np.sqrt(((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
        diff = np.abs(f.values[s : s + chunk, None] - f.values[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(dist > 0.0, diff / dist, 0.0)
        best = max(best, float(q.max()))
    return best


def grid_tolerance(f: SampledFunction) -> float:
    """Slack for comparing grid quantities against continuum closed forms.

    Scales with how fast f moves across one covering radius.
    """
    return 1e-9 + 2.0 * lipschitz_estimate(f) * f.domain.mesh


# ---------------------------------------------------------------------------
# named corpus of 1-D functions on [0, 1]

def _sawtooth(x):
    # distance from x to the nearest multiple of 0.25
    t = x / 0.25
    return 0.25 * np.abs(t - np.round(t))


_CORPUS: dict[str, Callable] = {
    "const_one": lambda x: np.ones_like(x),
    "identity": lambda x: np.asarray(x, dtype=float),
    "square": lambda x: x**2,
    "abs_center": lambda x: np.abs(x - 0.5),
    "sin_scaled": lambda x: np.sin(np.pi * x),
    "lipschitz_sawtooth": _sawtooth,
    "step_smooth": lambda x: 1.0 / (1.0 + np.exp(-20.0 * (x - 0.5))),
}


def corpus_names() -> tuple:
    return tuple(_CORPUS)


def corpus_function(name: str, domain: Domain) -> SampledFunction:
    """Sample a named corpus function on a 1-D domain."""
    if name not in _CORPUS:
        known = ", ".join(_CORPUS)
        raise KeyError(f"unknown corpus function {name!r}; known: {known}")
    if domain.dim != 1:
        raise ValueError("corpus functions are defined on 1-D domains")
    return SampledFunction.from_callable(domain, _CORPUS[name], name=name)


# ---------------------------------------------------------------------------
# CSV round-trip

def write_sampled_function(f: SampledFunction, path) -> None:
    """Write samples as CSV with columns x_1..x_N, value (round-trip floats)."""
    dom = f.domain
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x_{k + 1}" for k in range(dom.dim)] + ["value"])
        for row, v in zip(dom.points, f.values):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(v))])


def read_sampled_function(path, mesh: float = 0.0) -> SampledFunction:
    """Read a CSV written by write_sampled_function.

    The covering radius is not stored in the file; pass it explicitly when
    the samples discretize a region (default 0 treats the point set as the
    whole domain).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "value" or len(header) < 2:
            raise ValueError(f"expected columns x_1..x_N, value; got {header!r}")
        rows = [[float(c) for c in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("malformed sampled-function CSV")
    dom = Domain(data[:, :-1], mesh=mesh)
    return SampledFunction(dom, data[:, -1])

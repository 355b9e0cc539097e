"""Operator families on sampled function spaces.

All operators here map samples on a source grid K to samples on a target
grid X.  The interesting ones are only *weakly* nonlinear: subadditive,
positively homogeneous, translatable, and monotone, but not additive.
Each handle carries the structural properties it claims, so downstream
code (axiom searches, error bounds) can decide what it may assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .function_space import Domain, SampledFunction, uniform_grid

__all__ = [
    "SL",
    "TR",
    "TR_STAR",
    "CA",
    "M",
    "UNITAL",
    "LINEAR",
    "ALL_FLAGS",
    "OperatorHandle",
    "WarpFunction",
    "identity_warp",
    "quadratic_warp",
    "table_warp",
    "snap_warp",
    "bernstein_weights",
    "make_bernstein",
    "make_max_bernstein",
    "make_sup_bernstein",
    "make_composition",
    "composition_from_indices",
    "make_yosida_kakutani",
    "make_square_negative_control",
    "scale_operator",
    "FAMILIES",
    "grid_divisor",
    "registry_grid",
    "build_warp",
    "build_operator",
    "operator_from_config",
]

# Structural property flags an operator may claim.
SL = "SL"            # subadditive and positively homogeneous
TR = "TR"            # T(f + a*1) = T(f) + a*T(1) for a >= 0
TR_STAR = "TR_STAR"  # same for every real a
CA = "CA"            # additive on comonotone pairs
M = "M"              # order preserving
UNITAL = "UNITAL"    # T(1) = 1
LINEAR = "LINEAR"    # additive and homogeneous for every real scalar

ALL_FLAGS = (SL, TR, TR_STAR, CA, M, UNITAL, LINEAR)

_NODE_TOL = 1e-12


@dataclass(frozen=True)
class OperatorHandle:
    """A named operator between two sampled-function spaces.

    ``claims`` lists the structural flags the construction guarantees;
    they are promises to be spot-checked, not assumptions silently used.
    """

    name: str
    source: Domain
    target: Domain
    claims: frozenset
    _apply: Callable = field(repr=False)

    def __call__(self, f: SampledFunction) -> SampledFunction:
        if f.domain != self.source:
            raise ValueError(f"{self.name}: input lives on a different domain than the source grid")
        out = np.asarray(self._apply(f.values), dtype=float)
        if not np.all(np.isfinite(out)):
            raise RuntimeError(f"{self.name}: produced non-finite values on finite input")
        return SampledFunction(self.target, out)

    apply = __call__


@dataclass(frozen=True)
class WarpFunction:
    """Samples of a reparametrization phi with values in [0, 1].

    ``domain`` is the grid on which phi is sampled (the evaluation grid of
    the operator that uses it).
    """

    domain: Domain
    values: np.ndarray
    name: str = "warp"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.domain.size,):
            raise ValueError("warp values must match the domain size")
        if not np.all(np.isfinite(vals)):
            raise ValueError("warp values must be finite")
        if vals.min() < 0.0 or vals.max() > 1.0:
            raise ValueError(
                f"warp values must lie in [0, 1]; got range [{vals.min()}, {vals.max()}]"
            )
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def identity_warp(domain: Domain) -> WarpFunction:
    return WarpFunction(domain, domain.coords, name="identity")


def quadratic_warp(domain: Domain) -> WarpFunction:
    return WarpFunction(domain, domain.coords**2, name="quadratic")


def table_warp(domain: Domain, values, name: str = "table") -> WarpFunction:
    return WarpFunction(domain, np.asarray(values, dtype=float), name=name)


def _nearest_on_grid(grid: Domain, values: np.ndarray):
    """Indices of the grid points nearest to each value (1-D grids)."""
    order = grid._sorted_index
    coords = grid.coords[order]
    pos = np.searchsorted(coords, values)
    pos = np.clip(pos, 1, grid.size - 1)
    left = coords[pos - 1]
    right = coords[pos]
    take_right = (values - left) > (right - values)
    sorted_idx = pos - 1 + take_right
    dist = np.abs(coords[sorted_idx] - values)
    return order[sorted_idx], dist


def snap_warp(phi: WarpFunction, grid: Domain) -> WarpFunction:
    """Replace each warp value by the nearest coordinate of a 1-D grid.

    Snapping distance is bounded by the grid's covering radius; beyond
    that the warp is judged incompatible with the grid.
    """
    if grid.dim != 1:
        raise ValueError("snap_warp needs a 1-D grid")
    idx, dist = _nearest_on_grid(grid, phi.values)
    worst = float(dist.max())
    if worst > grid.mesh + _NODE_TOL:
        raise ValueError(
            f"warp value {phi.values[int(dist.argmax())]!r} is {worst:.3e} from the nearest "
            f"grid point, beyond the covering radius {grid.mesh:.3e}"
        )
    return WarpFunction(phi.domain, grid.coords[idx], name=phi.name)


# ---------------------------------------------------------------------------
# Bernstein basis weights

def _bernstein_matrix_low(n: int, x: np.ndarray) -> np.ndarray:
    # x <= 1/2 so the odds ratio x/(1-x) stays <= 1 and (1-x)^n cannot underflow
    # for any practical n; the running product multiplies nonnegative factors only.
    r = x / (1.0 - x)
    k = np.arange(1, n + 1)
    step = r[:, None] * ((n - k + 1.0) / k)[None, :]
    w = np.empty((x.size, n + 1))
    w[:, 0] = 1.0
    np.cumprod(step, axis=1, out=w[:, 1:])
    w *= ((1.0 - x) ** n)[:, None]
    return w


def bernstein_weight_matrix(n: int, x: np.ndarray) -> np.ndarray:
    """Row i holds the n+1 Bernstein basis values at x[i].

    Rows are nonnegative and sum to 1 up to a few ulps: the recurrence
    multiplies positive factors only, with the symmetric half evaluated
    at 1 - x to keep every intermediate well scaled.
    """
    if n < 1 or n != int(n):
        raise ValueError(f"degree n must be a positive integer, got {n!r}")
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be a 1-D array")
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("evaluation points must lie in [0, 1]")
    n = int(n)
    w = np.empty((x.size, n + 1))
    lo = x <= 0.5
    if lo.any():
        w[lo] = _bernstein_matrix_low(n, x[lo])
    if (~lo).any():
        w[~lo] = _bernstein_matrix_low(n, 1.0 - x[~lo])[:, ::-1]
    return w


def bernstein_weights(n: int, x: float) -> np.ndarray:
    """Bernstein basis vector (p_{n,0}(x), ..., p_{n,n}(x))."""
    return bernstein_weight_matrix(n, np.asarray([float(x)]))[0]


def _node_indices(K: Domain, nodes: np.ndarray, what: str) -> np.ndarray:
    """Indices of the grid points equal (to within roundoff) to the nodes."""
    if K.dim != 1:
        raise ValueError(f"{what}: source grid must be 1-D")
    idx, dist = _nearest_on_grid(K, nodes)
    bad = dist > _NODE_TOL
    if bad.any():
        j = int(np.argmax(bad))
        raise ValueError(
            f"{what}: source grid does not contain the node {nodes[j]!r} "
            f"(nearest grid point is {dist[j]:.3e} away)"
        )
    return idx


def _bernstein_core(phi_vals: np.ndarray, n: int, node_idx: np.ndarray) -> Callable:
    """values -> weighted node sums, with the weight matrix cached when small."""
    msize = phi_vals.size
    if msize * (n + 1) <= 40_000_000:
        w = bernstein_weight_matrix(n, phi_vals)

        def apply(vals, _w=w, _idx=node_idx):
            return _w @ vals[_idx]

    else:
        chunk = max(1, 40_000_000 // (n + 1))

        def apply(vals, _idx=node_idx, _chunk=chunk):
            fv = vals[_idx]
            out = np.empty(msize)
            for s in range(0, msize, _chunk):
                out[s : s + _chunk] = bernstein_weight_matrix(n, phi_vals[s : s + _chunk]) @ fv
            return out

    return apply


def make_bernstein(phi: WarpFunction, n: int, K: Domain, X: Domain) -> OperatorHandle:
    """Warped Bernstein operator: (B_n f)(x) = sum_k p_{n,k}(phi(x)) f(k/n).

    K must contain every node k/n exactly; node values are read off the
    samples, never interpolated.  phi must be sampled on X.
    """
    if phi.domain != X:
        raise ValueError("phi must be sampled on the target grid X")
    if n < 1 or n != int(n):
        raise ValueError(f"degree n must be a positive integer, got {n!r}")
    n = int(n)
    nodes = np.arange(n + 1) / n
    idx = _node_indices(K, nodes, f"bernstein(n={n})")
    core = _bernstein_core(phi.values, n, idx)
    return OperatorHandle(
        name=f"bernstein(n={n}, phi={phi.name})",
        source=K,
        target=X,
        claims=frozenset({SL, TR_STAR, M, UNITAL, LINEAR}),
        _apply=core,
    )


def make_max_bernstein(phi: WarpFunction, n: int, K: Domain, X: Domain) -> OperatorHandle:
    """Pointwise max of the warped Bernstein images of orders n and n+1.

    Max of two linear positive unital operators: still subadditive,
    positively homogeneous, translatable, and monotone, but not additive.
    """
    if phi.domain != X:
        raise ValueError("phi must be sampled on the target grid X")
    if n < 1 or n != int(n):
        raise ValueError(f"degree n must be a positive integer, got {n!r}")
    n = int(n)
    what = f"max_bernstein(n={n})"
    idx_a = _node_indices(K, np.arange(n + 1) / n, what)
    idx_b = _node_indices(K, np.arange(n + 2) / (n + 1), what)
    core_a = _bernstein_core(phi.values, n, idx_a)
    core_b = _bernstein_core(phi.values, n + 1, idx_b)

    def apply(vals):
        return np.maximum(core_a(vals), core_b(vals))

    return OperatorHandle(
        name=f"max_bernstein(n={n}, phi={phi.name})",
        source=K,
        target=X,
        claims=frozenset({SL, TR_STAR, M, UNITAL}),
        _apply=apply,
    )


def make_sup_bernstein(phi: WarpFunction, n: int, K: Domain, X: Domain) -> OperatorHandle:
    """Bernstein weights applied to window suprema:
    (T_n f)(x) = sum_k p_{n,k}(phi(x)) * sup{f(t): t in [k/(n+1), (k+1)/(n+1)]}.

    Every window must contain at least one grid point of K.
    """
    if phi.domain != X:
        raise ValueError("phi must be sampled on the target grid X")
    if K.dim != 1:
        raise ValueError("sup_bernstein: source grid must be 1-D")
    if n < 1 or n != int(n):
        raise ValueError(f"degree n must be a positive integer, got {n!r}")
    n = int(n)
    order = K._sorted_index
    coords = K.coords[order]
    lo = np.searchsorted(coords, np.arange(n + 1) / (n + 1) - _NODE_TOL, side="left")
    hi = np.searchsorted(coords, np.arange(1, n + 2) / (n + 1) + _NODE_TOL, side="right")
    empty = lo >= hi
    if empty.any():
        k = int(np.argmax(empty))
        raise ValueError(
            f"sup_bernstein(n={n}): window [{k}/{n + 1}, {k + 1}/{n + 1}] contains no grid point"
        )
    core = _bernstein_core(phi.values, n, np.arange(n + 1))

    def apply(vals, _order=order, _lo=lo, _hi=hi):
        sorted_vals = vals[_order]
        sups = np.array([sorted_vals[a:b].max() for a, b in zip(_lo, _hi)])
        return core(sups)

    return OperatorHandle(
        name=f"sup_bernstein(n={n}, phi={phi.name})",
        source=K,
        target=X,
        claims=frozenset({SL, TR_STAR, M, UNITAL}),
        _apply=apply,
    )


def composition_from_indices(idx: np.ndarray, K: Domain, X: Domain, name: str) -> OperatorHandle:
    """Composition with a point map X -> K given by source-grid indices."""
    idx = np.asarray(idx, dtype=int)
    if idx.shape != (X.size,):
        raise ValueError("index map must assign one source index per target point")
    if idx.min() < 0 or idx.max() >= K.size:
        raise ValueError("index map points outside the source grid")

    def apply(vals, _idx=idx):
        return vals[_idx]

    return OperatorHandle(
        name=name,
        source=K,
        target=X,
        claims=frozenset({SL, TR_STAR, M, UNITAL, LINEAR}),
        _apply=apply,
    )


def make_composition(phi: WarpFunction, K: Domain, X: Domain) -> OperatorHandle:
    """Composition operator (A f)(x) = f(phi(x)).

    phi values are snapped to the nearest K grid point; values farther
    than K's covering radius are rejected.
    """
    if phi.domain != X:
        raise ValueError("phi must be sampled on the target grid X")
    if K.dim != 1:
        raise ValueError("composition: source grid must be 1-D")
    snapped = snap_warp(phi, K)
    idx, _ = _nearest_on_grid(K, snapped.values)
    return composition_from_indices(idx, K, X, name=f"composition(phi={phi.name})")


def make_yosida_kakutani(U: OperatorHandle, n: int) -> OperatorHandle:
    """Running max of the first n ergodic averages of the orbit under U:
    sup{f, (f + Uf)/2, ..., (1/n) sum_{k<n} U^k f}.

    U must be an endomorphism claiming SL, TR_STAR, M, UNITAL; the sup of
    averages then verifies the same four properties.
    """
    if U.source != U.target:
        raise ValueError("yosida_kakutani: U must map a grid to itself")
    required = {SL, TR_STAR, M, UNITAL}
    missing = required - set(U.claims)
    if missing:
        raise ValueError(f"yosida_kakutani: U must claim {sorted(missing)}")
    if n < 1 or n != int(n):
        raise ValueError(f"need n >= 1 averages, got {n!r}")
    n = int(n)

    def apply(vals):
        orbit = vals
        partial = vals.copy()
        best = vals.copy()
        for j in range(2, n + 1):
            orbit = np.asarray(U._apply(orbit), dtype=float)
            partial += orbit
            np.maximum(best, partial / j, out=best)
        return best

    return OperatorHandle(
        name=f"yosida_kakutani(n={n}, U={U.name})",
        source=U.source,
        target=U.target,
        claims=frozenset({SL, TR_STAR, M, UNITAL}),
        _apply=apply,
    )


def make_square_negative_control(K: Domain) -> OperatorHandle:
    """Pointwise square f -> f^2: deliberately NOT sublinear or monotone.

    Exists so axiom searches have a target that must fail; it claims only
    what it satisfies (unitality).
    """

    def apply(vals):
        return vals * vals

    return OperatorHandle(
        name="square_negative_control",
        source=K,
        target=K,
        claims=frozenset({UNITAL}),
        _apply=apply,
    )


def scale_operator(T: OperatorHandle, c: float) -> OperatorHandle:
    """Post-multiply an operator by a nonzero constant.

    Positive scaling preserves sublinearity, monotonicity, translatability
    and linearity; negative scaling keeps only translatability/linearity.
    Unitality survives only at c == 1.
    """
    c = float(c)
    if c == 0.0 or not np.isfinite(c):
        raise ValueError(f"scale must be finite and nonzero, got {c!r}")
    if c > 0:
        keep = set(T.claims) - {UNITAL}
    else:
        keep = set(T.claims) & {TR, TR_STAR, LINEAR}
    if c == 1.0:
        keep = set(T.claims)

    def apply(vals, _inner=T._apply, _c=c):
        return _c * np.asarray(_inner(vals), dtype=float)

    return OperatorHandle(
        name=f"{c!r}*{T.name}",
        source=T.source,
        target=T.target,
        claims=frozenset(keep),
        _apply=apply,
    )


# ---------------------------------------------------------------------------
# declarative registry

FAMILIES: dict[str, dict] = {
    "bernstein": {
        "needs_n": True,
        "description": "weighted node sums with Bernstein basis weights at phi(x); linear, positive, unital",
    },
    "max_bernstein": {
        "needs_n": True,
        "description": "pointwise max of consecutive Bernstein images; sublinear and monotone, not additive",
    },
    "sup_bernstein": {
        "needs_n": True,
        "description": "Bernstein weights applied to window suprema of f; sublinear and monotone, not additive",
    },
    "composition": {
        "needs_n": False,
        "description": "f -> f(phi(x)) for a grid-valued warp phi; linear, positive, unital",
    },
    "yosida_kakutani": {
        "needs_n": True,
        "description": "running max of the first n ergodic averages under composition with phi; sublinear and monotone",
    },
    "square_negative_control": {
        "needs_n": False,
        "description": "pointwise square; negative control that fails sublinearity and monotonicity on purpose",
    },
}


def grid_divisor(family: str, n: int | None) -> int:
    """Smallest d such that grids with d | (m - 1) carry the family's nodes.

    The factor 2 keeps the midpoint 0.5 on every grid, where several
    closed-form extrema are attained.
    """
    if family not in FAMILIES:
        raise KeyError(f"unknown operator family {family!r}; known: {', '.join(FAMILIES)}")
    if FAMILIES[family]["needs_n"]:
        if n is None or n < 1:
            raise ValueError(f"family {family!r} needs n >= 1")
        n = int(n)
        if family == "bernstein":
            return math.lcm(2, n)
        if family == "max_bernstein":
            return math.lcm(2, n, n + 1)
        if family == "sup_bernstein":
            return math.lcm(2, n + 1)
    return 2


def registry_grid(divisor: int, grid_points: int) -> Domain:
    """Uniform grid on [0, 1] with at least grid_points points and
    m - 1 a multiple of divisor."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    segments = max(1, -(-(grid_points - 1) // divisor)) * divisor
    return uniform_grid(0.0, 1.0, segments + 1)


def build_warp(phi, X: Domain, snap_to: Domain | None = None) -> WarpFunction:
    """Build a warp from a name or mapping: 'identity', 'quadratic', or
    {'kind': ..., 'values': [...]} with kind 'table'."""
    if isinstance(phi, str):
        phi = {"kind": phi}
    extra = set(phi) - {"kind", "values"}
    if extra:
        raise ValueError(f"unknown warp keys {sorted(extra)}")
    kind = phi.get("kind")
    if kind != "table" and "values" in phi:
        raise ValueError(f"warp kind {kind!r} does not take explicit values")
    if kind == "identity":
        warp = identity_warp(X)
    elif kind == "quadratic":
        warp = quadratic_warp(X)
    elif kind == "table":
        if "values" not in phi:
            raise ValueError("table warp needs explicit 'values'")
        warp = table_warp(X, phi["values"])
    else:
        raise ValueError(f"unknown warp kind {kind!r}; known: identity, quadratic, table")
    if snap_to is not None and kind != "identity":
        warp = snap_warp(warp, snap_to)
    return warp


def build_operator(
    family: str,
    n: int | None,
    phi: WarpFunction,
    K: Domain,
    X: Domain,
    scale: float = 1.0,
) -> OperatorHandle:
    """Construct a registry family member on explicit grids."""
    if family not in FAMILIES:
        raise KeyError(f"unknown operator family {family!r}; known: {', '.join(FAMILIES)}")
    if FAMILIES[family]["needs_n"] and (n is None or n < 1):
        raise ValueError(f"family {family!r} needs n >= 1")
    if family == "bernstein":
        handle = make_bernstein(phi, n, K, X)
    elif family == "max_bernstein":
        handle = make_max_bernstein(phi, n, K, X)
    elif family == "sup_bernstein":
        handle = make_sup_bernstein(phi, n, K, X)
    elif family == "composition":
        handle = make_composition(phi, K, X)
    elif family == "yosida_kakutani":
        handle = make_yosida_kakutani(make_composition(phi, K, X), n)
    else:
        handle = make_square_negative_control(K)
    if scale != 1.0:
        handle = scale_operator(handle, scale)
    return handle


def operator_from_config(record: Mapping) -> OperatorHandle:
    """Build an operator from {family, n, phi, grid_points, scale}.

    The grid is a uniform [0, 1] grid with at least grid_points points,
    enlarged minimally so all family nodes land on grid points; warps
    other than the identity are snapped to it.
    """
    known = {"family", "n", "phi", "grid_points", "scale"}
    extra = set(record) - known
    if extra:
        raise ValueError(f"unknown config keys {sorted(extra)}")
    family = record.get("family")
    if family not in FAMILIES:
        raise KeyError(f"unknown operator family {family!r}; known: {', '.join(FAMILIES)}")
    n = record.get("n")
    grid_points = int(record.get("grid_points", 257))
    K = registry_grid(grid_divisor(family, n if FAMILIES[family]["needs_n"] else None), grid_points)
    phi = build_warp(record.get("phi", "identity"), K, snap_to=K)
    return build_operator(family, n, phi, K, K, scale=float(record.get("scale", 1.0)))

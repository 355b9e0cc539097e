"""Randomized verification of the structural properties an operator claims.

Each check draws random piecewise-linear functions on the operator's
source grid and measures how badly a property fails.  Per-trial random
streams are derived from (seed, trial counter), so reports are
reproducible regardless of how trials would be scheduled, and every
failure carries a witness that re-evaluates to the same violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .function_space import Domain, SampledFunction, sup_norm
from .operators import CA, LINEAR, M, OperatorHandle, SL, TR, TR_STAR, UNITAL

__all__ = [
    "Witness",
    "AxiomReport",
    "check_axiom",
    "verify_lipschitz_bound",
    "random_piecewise_linear",
    "DEFAULT_AXIOM_TOL",
]

DEFAULT_AXIOM_TOL = 1e-8

_CHECKABLE = (SL, TR, TR_STAR, CA, M, UNITAL, LINEAR)


@dataclass(frozen=True)
class Witness:
    """Inputs that reproduce a property violation."""

    description: str
    inputs: tuple
    alpha: Optional[float]
    point: int
    lhs: float
    rhs: float
    violation: float


@dataclass(frozen=True)
class AxiomReport:
    operator: str
    axiom: str
    verdict: str  # "pass", "fail", or "inconclusive"
    trials: int
    worst_violation: float
    tol: float
    seed: int
    witness: Optional[Witness] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def random_piecewise_linear(
    domain: Domain, rng: np.random.Generator, knot_stride: int = 10
) -> SampledFunction:
    """Piecewise-linear function with i.i.d. uniform [-1, 1] values at
    every knot_stride-th grid node (endpoints always included)."""
    if domain.dim != 1:
        raise ValueError("random search functions are generated on 1-D grids")
    order = domain._sorted_index
    x = domain.coords[order]
    knots = np.arange(0, domain.size, max(1, knot_stride))
    if knots[-1] != domain.size - 1:
        knots = np.append(knots, domain.size - 1)
    heights = rng.uniform(-1.0, 1.0, size=knots.size)
    vals_sorted = np.interp(x, x[knots], heights)
    vals = np.empty(domain.size)
    vals[order] = vals_sorted
    return SampledFunction(domain, vals)


def _monotone_transform(rng: np.random.Generator):
    a = rng.uniform(0.0, 2.0)
    b = rng.uniform(0.0, 2.0)
    c = rng.uniform(-1.0, 1.0)
    return lambda t: a * t + b * np.tanh(t) + c


def _gap_worst(diff: np.ndarray):
    """Largest entry and its index: positive entries are violations of
    an inequality lhs <= rhs evaluated as diff = lhs - rhs."""
    i = int(np.argmax(diff))
    return float(diff[i]), i


def _trial(T: OperatorHandle, axiom: str, rng: np.random.Generator, knot_stride: int):
    """One randomized draw; returns (violation, witness_fields)."""
    dom = T.source

    if axiom == SL:
        f = random_piecewise_linear(dom, rng, knot_stride)
        g = random_piecewise_linear(dom, rng, knot_stride)
        alpha = float(rng.uniform(0.0, 3.0))
        sub = T(f + g).values - (T(f).values + T(g).values)
        sub_v, sub_i = _gap_worst(sub)
        hom = np.abs(T(alpha * f).values - alpha * T(f).values)
        hom_v, hom_i = _gap_worst(hom)
        if sub_v >= hom_v:
            return sub_v, ("subadditivity: T(f+g) <= T(f) + T(g)", (f, g), None, sub_i,
                           float(T(f + g).values[sub_i]),
                           float((T(f).values + T(g).values)[sub_i]))
        return hom_v, ("positive homogeneity: T(a f) = a T(f)", (f,), alpha, hom_i,
                       float(T(alpha * f).values[hom_i]),
                       float(alpha * T(f).values[hom_i]))

    if axiom in (TR, TR_STAR):
        f = random_piecewise_linear(dom, rng, knot_stride)
        alpha = float(rng.uniform(0.0, 3.0) if axiom == TR else rng.uniform(-3.0, 3.0))
        one = SampledFunction(dom, np.ones(dom.size))
        lhs = T(f + alpha * one).values
        rhs = T(f).values + alpha * T(one).values
        v, i = _gap_worst(np.abs(lhs - rhs))
        return v, ("translatability: T(f + a) = T(f) + a T(1)", (f,), alpha, i,
                   float(lhs[i]), float(rhs[i]))

    if axiom == M:
        f = random_piecewise_linear(dom, rng, knot_stride)
        bump = random_piecewise_linear(dom, rng, knot_stride)
        g = f + bump.abs()
        diff = T(f).values - T(g).values
        v, i = _gap_worst(diff)
        return v, ("monotonicity: f <= g implies T(f) <= T(g)", (f, g), None, i,
                   float(T(f).values[i]), float(T(g).values[i]))

    if axiom == CA:
        h = random_piecewise_linear(dom, rng, knot_stride)
        u = _monotone_transform(rng)
        w = _monotone_transform(rng)
        f = SampledFunction(dom, u(h.values))
        g = SampledFunction(dom, w(h.values))
        lhs = T(f + g).values
        rhs = T(f).values + T(g).values
        v, i = _gap_worst(np.abs(lhs - rhs))
        return v, ("comonotonic additivity: T(f+g) = T(f) + T(g)", (f, g), None, i,
                   float(lhs[i]), float(rhs[i]))

    if axiom == LINEAR:
        f = random_piecewise_linear(dom, rng, knot_stride)
        g = random_piecewise_linear(dom, rng, knot_stride)
        alpha = float(rng.uniform(-3.0, 3.0))
        beta = float(rng.uniform(-3.0, 3.0))
        lhs = T(alpha * f + beta * g).values
        rhs = alpha * T(f).values + beta * T(g).values
        v, i = _gap_worst(np.abs(lhs - rhs))
        return v, ("linearity: T(a f + b g) = a T(f) + b T(g)", (f, g), alpha, i,
                   float(lhs[i]), float(rhs[i]))

    raise ValueError(f"unknown axiom flag {axiom!r}; known: {', '.join(_CHECKABLE)}")


def check_axiom(
    T: OperatorHandle,
    axiom: str,
    trials: int = 500,
    seed: int = 0,
    tol: float = DEFAULT_AXIOM_TOL,
    min_trials: int = 100,
    knot_stride: int = 10,
) -> AxiomReport:
    """Randomized search for violations of one structural property.

    A violation larger than tol yields verdict "fail" with a witness
    (re-evaluated once to confirm it reproduces).  With no violation the
    verdict is "pass" when at least min_trials draws ran, otherwise
    "inconclusive".  Unitality is a single deterministic evaluation.
    """
    if axiom not in _CHECKABLE:
        raise ValueError(f"unknown axiom flag {axiom!r}; known: {', '.join(_CHECKABLE)}")
    if trials < 1:
        raise ValueError("need at least one trial")

    if axiom == UNITAL:
        one = SampledFunction(T.source, np.ones(T.source.size))
        diff = np.abs(T(one).values - 1.0)
        v, i = _gap_worst(diff)
        if v > tol:
            wit = Witness("unitality: T(1) = 1", (one,), None, i,
                          float(T(one).values[i]), 1.0, v)
            return AxiomReport(T.name, axiom, "fail", 1, v, tol, seed, wit)
        return AxiomReport(T.name, axiom, "pass", 1, v, tol, seed)

    worst = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        v, fields = _trial(T, axiom, rng, knot_stride)
        worst = max(worst, v)
        if v > tol:
            desc, inputs, alpha, i, lhs, rhs = fields
            v2, fields2 = _trial(T, axiom, np.random.default_rng([seed, t]), knot_stride)
            if abs(v2 - v) > 1e-13:
                raise RuntimeError(f"witness for {axiom} did not reproduce: {v!r} vs {v2!r}")
            wit = Witness(desc, inputs, alpha, i, lhs, rhs, v)
            return AxiomReport(T.name, axiom, "fail", t + 1, v, tol, seed, wit)
    verdict = "pass" if trials >= min_trials else "inconclusive"
    return AxiomReport(T.name, axiom, verdict, trials, worst, tol, seed)


def verify_lipschitz_bound(
    T: OperatorHandle,
    trials: int = 500,
    seed: int = 0,
    tol: float = DEFAULT_AXIOM_TOL,
    min_trials: int = 100,
    knot_stride: int = 10,
) -> AxiomReport:
    """Check the Lipschitz estimate enjoyed by sublinear monotone operators:
    pointwise |T(f) - T(g)| <= T(|f - g|), and in norm
    ||T(f) - T(g)|| <= ||T(1)|| * ||f - g||  (||T(1)|| standing in for ||T||).

    T must claim both SL and M; for other operators the estimate has no
    backing and the check would be meaningless.
    """
    missing = {SL, M} - set(T.claims)
    if missing:
        raise ValueError(f"{T.name}: Lipschitz estimate needs claims {sorted(missing)}")
    if trials < 1:
        raise ValueError("need at least one trial")
    one = SampledFunction(T.source, np.ones(T.source.size))
    t_norm = sup_norm(T(one))
    worst = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        f = random_piecewise_linear(T.source, rng, knot_stride)
        g = random_piecewise_linear(T.source, rng, knot_stride)
        pointwise = np.abs(T(f).values - T(g).values) - T((f - g).abs()).values
        v1, i1 = _gap_worst(pointwise)
        v2 = sup_norm(T(f) - T(g)) - t_norm * sup_norm(f - g)
        v = max(v1, v2)
        worst = max(worst, v)
        if v > tol:
            wit = Witness("Lipschitz estimate |T(f)-T(g)| <= T(|f-g|)", (f, g), None,
                          i1, float(np.abs(T(f).values - T(g).values)[i1]),
                          float(T((f - g).abs()).values[i1]), v)
            return AxiomReport(T.name, "LIPSCHITZ", "fail", t + 1, v, tol, seed, wit)
    verdict = "pass" if trials >= min_trials else "inconclusive"
    return AxiomReport(T.name, "LIPSCHITZ", verdict, trials, worst, tol, seed)

"""Quantitative error bounds for weakly nonlinear monotone operator pairs.

For a pair (T, A) of sublinear, translatable, monotone operators with
inf A(1) > 0, the deviation of T from A on any sampled function f is
controlled by how T and A disagree on the quadratic test set
{1, -pr_1, ..., -pr_N, sum pr_k^2}:

    ||T(f) - A(f)|| <= M * ( ||T(1) - A(1)|| * ||A(f)||
                             + (||T(1) A(1)|| + 1) * omega(f, mu) )

with M = 1 / inf A(1) and

    mu^2 = || T(ssq) A(1) - 2 sum_k A(-pr_k) T(-pr_k) + A(ssq) T(1) ||.

Because the sampled spaces are genuine finite function spaces and the
operator constructions satisfy the hypotheses exactly, the inequality is
exact here up to roundoff; tolerances only absorb floating point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .function_space import (
    Domain,
    SampledFunction,
    corpus_function,
    lipschitz_estimate,
    modulus_of_continuity,
    sup_norm,
    test_functions,
)
from .operators import (
    FAMILIES,
    OperatorHandle,
    build_operator,
    build_warp,
    grid_divisor,
    registry_grid,
)

__all__ = [
    "PositivityError",
    "BoundViolationError",
    "BoundReport",
    "ConvergenceTable",
    "compute_M",
    "compute_mu",
    "compute_delta",
    "bound_tolerance",
    "error_bound_report",
    "error_bound_report_1d",
    "decomposition_identity_check",
    "convergence_sweep",
    "DEFAULT_GRID_POINTS",
]

DEFAULT_GRID_POINTS = 20_001

_UNITAL_TOL = 1e-12


class PositivityError(ValueError):
    """inf A(1) <= 0: the pair falls outside the bound's hypotheses."""


class BoundViolationError(RuntimeError):
    """A computed bound failed; carries the offending report."""

    def __init__(self, message: str, report: "BoundReport"):
        super().__init__(message)
        self.report = report


def _check_pair(T: OperatorHandle, A: OperatorHandle) -> None:
    if T.source != A.source or T.target != A.target:
        raise ValueError(f"{T.name} and {A.name} must share source and target grids")


def compute_M(A: OperatorHandle) -> float:
    """1 / inf A(1); raises PositivityError when the infimum is not positive."""
    one = SampledFunction(A.source, np.ones(A.source.size))
    a1 = A(one).values
    low = float(a1.min())
    if low <= 0.0:
        where = int(a1.argmin())
        raise PositivityError(
            f"{A.name}: inf A(1) = {low!r} at target point {where}; "
            "the error bound requires inf A(1) > 0"
        )
    return 1.0 / low


def _mu_squared_values(T: OperatorHandle, A: OperatorHandle) -> np.ndarray:
    tf = test_functions(T.source)
    t_one, a_one = T(tf.one).values, A(tf.one).values
    t_ssq, a_ssq = T(tf.sum_squares).values, A(tf.sum_squares).values
    acc = t_ssq * a_one + a_ssq * t_one
    for proj in tf.neg_projections:
        acc = acc - 2.0 * (A(proj).values * T(proj).values)
    return acc


def compute_mu(T: OperatorHandle, A: OperatorHandle) -> float:
    """The quadratic-test-set discrepancy mu(T, A) >= 0."""
    _check_pair(T, A)
    return float(np.sqrt(np.abs(_mu_squared_values(T, A)).max()))


def compute_delta(A: OperatorHandle) -> float:
    """|| A(1) A(ssq) - sum_k A(-pr_k)^2 ||: the self-consistency defect of A.

    Vanishes for composition-type operators; enters the decomposition of
    mu^2 into pure test-set errors plus 2 * delta.
    """
    tf = test_functions(A.source)
    a_one = A(tf.one).values
    a_ssq = A(tf.sum_squares).values
    acc = a_one * a_ssq
    for proj in tf.neg_projections:
        a_p = A(proj).values
        acc = acc - a_p * a_p
    return float(np.abs(acc).max())


def bound_tolerance(f: SampledFunction) -> float:
    """Floating-point slack for bound comparisons, scaled to f's variation."""
    return 1e-9 + 4.0 * lipschitz_estimate(f) * f.domain.mesh


@dataclass(frozen=True)
class BoundReport:
    """One evaluation of the error bound for a pair (T, A) and a function f.

    ``rhs`` is the general bound; ``rhs_unital`` the reduced form 2*omega
    when both operators are unital; ``rhs_matched`` the reduced form
    M*(||A(1)^2|| + 1)*omega when T(1) = A(1).
    """

    t_name: str
    a_name: str
    f_name: str
    n: Optional[int]
    M: float
    mu: float
    omega_f_mu: float
    lhs: float
    rhs: float
    delta: float
    unital_fast_path: bool
    rhs_unital: Optional[float]
    rhs_matched: Optional[float]
    margin: float
    passed: bool
    tol: float


def _assemble_report(
    T: OperatorHandle,
    A: OperatorHandle,
    f: SampledFunction,
    mu: float,
    n: Optional[int],
    tol: Optional[float],
) -> BoundReport:
    dom = T.source
    one = SampledFunction(dom, np.ones(dom.size))
    t_one, a_one = T(one), A(one)
    a_f = A(f)
    omega = modulus_of_continuity(f, mu)
    ones_gap = sup_norm(t_one - a_one)
    m_const = compute_M(A)
    rhs = m_const * (ones_gap * sup_norm(a_f) + (sup_norm(t_one * a_one) + 1.0) * omega)
    lhs = sup_norm(T(f) - a_f)
    unital = sup_norm(t_one - 1.0) <= _UNITAL_TOL and sup_norm(a_one - 1.0) <= _UNITAL_TOL
    matched = ones_gap <= _UNITAL_TOL
    if tol is None:
        tol = bound_tolerance(f)
    return BoundReport(
        t_name=T.name,
        a_name=A.name,
        f_name=f.name or "f",
        n=n,
        M=m_const,
        mu=mu,
        omega_f_mu=omega,
        lhs=lhs,
        rhs=rhs,
        delta=compute_delta(A),
        unital_fast_path=unital,
        rhs_unital=2.0 * omega if unital else None,
        rhs_matched=m_const * (sup_norm(a_one * a_one) + 1.0) * omega if matched else None,
        margin=rhs - lhs,
        passed=bool(lhs <= rhs + tol),
        tol=tol,
    )


def error_bound_report(
    T: OperatorHandle,
    A: OperatorHandle,
    f: SampledFunction,
    n: Optional[int] = None,
    tol: Optional[float] = None,
) -> BoundReport:
    """Evaluate the error bound for (T, A) on f, in any dimension.

    When mu = 0 the modulus term vanishes by the omega(f, 0) = 0
    convention and the bound reduces to M * ||T(1) - A(1)|| * ||A(f)||.
    """
    _check_pair(T, A)
    if f.domain != T.source:
        raise ValueError("f must be sampled on the operators' source grid")
    return _assemble_report(T, A, f, compute_mu(T, A), n, tol)


def error_bound_report_1d(
    T: OperatorHandle,
    A: OperatorHandle,
    f: SampledFunction,
    n: Optional[int] = None,
    tol: Optional[float] = None,
) -> BoundReport:
    """One-dimensional form of the bound, phrased through e_0, e_1, e_2.

    mu^2 = || T(e_2) A(e_0) - 2 A(-e_1) T(-e_1) + A(e_2) T(e_0) ||.
    Must agree with error_bound_report to roundoff; kept as an independent
    assembly for consistency checking, not as a separate formula.
    """
    _check_pair(T, A)
    if T.source.dim != 1 or T.target.dim != 1:
        raise ValueError("the one-dimensional form needs 1-D source and target grids")
    if f.domain != T.source:
        raise ValueError("f must be sampled on the operators' source grid")
    x = T.source.coords
    e0 = SampledFunction(T.source, np.ones(x.size))
    neg_e1 = SampledFunction(T.source, -x)
    e2 = SampledFunction(T.source, x * x)
    vals = (
        T(e2).values * A(e0).values
        - 2.0 * (A(neg_e1).values * T(neg_e1).values)
        + A(e2).values * T(e0).values
    )
    mu = float(np.sqrt(np.abs(vals).max()))
    return _assemble_report(T, A, f, mu, n, tol)


def decomposition_identity_check(T: OperatorHandle, A: OperatorHandle) -> float:
    """Largest pointwise defect of the algebraic decomposition of mu^2:

    mu^2-expression = (T(ssq) - A(ssq)) A(1)
                      - 2 sum_k A(-pr_k) (T(-pr_k) - A(-pr_k))
                      + (T(1) - A(1)) A(ssq) + 2 delta-expression,

    with delta-expression = A(1) A(ssq) - sum_k A(-pr_k)^2.  An identity,
    so the return value is pure roundoff; anything above ~1e-10 means the
    two sides were assembled inconsistently.
    """
    _check_pair(T, A)
    tf = test_functions(T.source)
    t_one, a_one = T(tf.one).values, A(tf.one).values
    t_ssq, a_ssq = T(tf.sum_squares).values, A(tf.sum_squares).values
    lhs = t_ssq * a_one + a_ssq * t_one
    delta_vals = a_one * a_ssq
    cross = np.zeros_like(lhs)
    for proj in tf.neg_projections:
        t_p, a_p = T(proj).values, A(proj).values
        lhs = lhs - 2.0 * (a_p * t_p)
        delta_vals = delta_vals - a_p * a_p
        cross = cross + a_p * (t_p - a_p)
    rhs = (t_ssq - a_ssq) * a_one - 2.0 * cross + (t_one - a_one) * a_ssq + 2.0 * delta_vals
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# convergence sweeps

@dataclass(frozen=True)
class ConvergenceTable:
    """Bound evaluations across a degree sweep, one report per n."""

    t_family: str
    a_family: str
    f_name: str
    reports: tuple

    def rate_slopes(self) -> tuple:
        """Least-squares slopes of log(lhs) and log(rhs) against log(n),
        fitted over the upper half of the sweep; None when the series
        contains nonpositive values (log-log fit undefined)."""
        upper = self.reports[len(self.reports) // 2 :]
        if len(upper) < 2:
            return (None, None)
        ns = np.array([r.n for r in upper], dtype=float)
        slopes = []
        for series in (
            np.array([r.lhs for r in upper]),
            np.array([r.rhs for r in upper]),
        ):
            if np.any(series <= 0.0) or np.any(ns <= 0.0):
                slopes.append(None)
            else:
                slopes.append(float(np.polyfit(np.log(ns), np.log(series), 1)[0]))
        return tuple(slopes)

    def to_csv(self, path) -> None:
        """Columns n, M, mu, omega_f_mu, lhs, rhs, delta, margin, pass,
        then the rate fit as a trailing comment row."""
        lhs_slope, rhs_slope = self.rate_slopes()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "M", "mu", "omega_f_mu", "lhs", "rhs", "delta", "margin", "pass"])
            for r in self.reports:
                writer.writerow(
                    [r.n]
                    + [repr(float(v)) for v in (r.M, r.mu, r.omega_f_mu, r.lhs, r.rhs, r.delta, r.margin)]
                    + [str(bool(r.passed))]
                )
            fh.write(
                f"# rate_fit lhs_slope={_fmt_slope(lhs_slope)} rhs_slope={_fmt_slope(rhs_slope)}\n"
            )


def _fmt_slope(s) -> str:
    return "none" if s is None else repr(float(s))


def _normalize_record(record: Mapping, role: str) -> dict:
    known = {"family", "n", "phi", "grid_points", "scale"}
    extra = set(record) - known
    if extra:
        raise ValueError(f"{role} config: unknown keys {sorted(extra)}")
    family = record.get("family")
    if family not in FAMILIES:
        raise ValueError(
            f"{role} config: unknown operator family {family!r}; known: {', '.join(FAMILIES)}"
        )
    return {
        "family": family,
        "n": record.get("n"),
        "phi": record.get("phi", "identity"),
        "grid_points": record.get("grid_points"),
        "scale": float(record.get("scale", 1.0)),
    }


def convergence_sweep(
    t_config: Mapping,
    a_config: Mapping,
    f_name: str,
    n_range: Iterable[int],
    grid_points: Optional[int] = None,
    strict: bool = True,
    tol: Optional[float] = None,
) -> ConvergenceTable:
    """Evaluate the bound for the configured pair across degrees n.

    Each degree gets its own uniform grid: at least grid_points points,
    with m - 1 a multiple of whatever keeps both operators' nodes exactly
    on the grid.  With strict=True the first failing bound aborts the
    sweep (that never happens for pairs satisfying the hypotheses; it
    exists so broken operators cannot produce quietly wrong tables).
    """
    t_rec = _normalize_record(t_config, "operator")
    a_rec = _normalize_record(a_config, "reference")
    ns = [int(n) for n in n_range]
    if not ns or any(n < 1 for n in ns) or sorted(set(ns)) != ns:
        raise ValueError("n_range must be strictly increasing positive integers")
    if grid_points is None:
        grid_points = t_rec["grid_points"] or DEFAULT_GRID_POINTS

    reports = []
    for n in ns:
        t_n = n if FAMILIES[t_rec["family"]]["needs_n"] else None
        a_n = a_rec["n"] if FAMILIES[a_rec["family"]]["needs_n"] else None
        if FAMILIES[a_rec["family"]]["needs_n"] and a_n is None:
            raise ValueError(f"reference family {a_rec['family']!r} needs a fixed n")
        divisor = math.lcm(
            grid_divisor(t_rec["family"], t_n), grid_divisor(a_rec["family"], a_n)
        )
        grid = registry_grid(divisor, grid_points)
        phi_t = build_warp(t_rec["phi"], grid, snap_to=grid)
        phi_a = build_warp(a_rec["phi"], grid, snap_to=grid)
        T = build_operator(t_rec["family"], t_n, phi_t, grid, grid, scale=t_rec["scale"])
        A = build_operator(a_rec["family"], a_n, phi_a, grid, grid, scale=a_rec["scale"])
        f = corpus_function(f_name, grid)
        report = error_bound_report(T, A, f, n=n, tol=tol)
        if strict and not report.passed:
            raise BoundViolationError(
                f"bound violated at n={n}: lhs={report.lhs!r} > rhs={report.rhs!r} "
                f"(tol={report.tol!r}) for {T.name} vs {A.name} on {f_name}",
                report,
            )
        reports.append(report)
    return ConvergenceTable(
        t_family=t_rec["family"],
        a_family=a_rec["family"],
        f_name=f_name,
        reports=tuple(reports),
    )

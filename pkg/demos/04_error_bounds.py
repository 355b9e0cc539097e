"""The quantitative error bound: discrepancy in, sup-norm control out.

For a pair (T, A) of positive operators with inf A(1) > 0, the distance
||T(f) - A(f)|| is controlled by how the pair disagrees on the quadratic
test set {1, -x, x^2} alone:

    ||T f - A f|| <= M ( ||T1 - A1|| ||A f|| + (||T1 * A1|| + 1) omega(f, mu) )

with M = 1 / inf A(1) and mu^2 the sup of the test-set discrepancy.  T
never needs to be linear: sublinear + translatable + monotone suffices.

Run:  python demos/04_error_bounds.py
"""

import math

import korovkin as kv


def pair(family, n, grid_points=2001):
    """A swept operator and its composition reference on a shared grid."""
    div = math.lcm(kv.grid_divisor(family, n), 2)
    X = kv.registry_grid(div, grid_points)
    phi = kv.identity_warp(X)
    T = kv.build_operator(family, n, phi, X, X)
    A = kv.make_composition(phi, X, X)
    return T, A, X


def main():
    # Headline case: the max of two consecutive Bernstein operators.
    # The discrepancy has the closed form mu^2 = 1/(4n).
    n = 16
    T, A, X = pair("max_bernstein", n)
    mu = kv.compute_mu(T, A)
    print(f"{T.name} vs {A.name}")
    print(f"  mu = {mu:.6f}   (closed form 1/(2 sqrt n) = {0.5 / math.sqrt(n):.6f})")

    f = kv.corpus_function("abs_center", X)
    report = kv.error_bound_report(T, A, f, n=n)
    print(f"  f = abs_center: lhs = {report.lhs:.6f} <= rhs = {report.rhs:.6f}")
    print(f"  unital pair, so rhs is just 2 omega(f, mu) = {report.rhs_unital:.6f}")
    assert report.passed

    # The defect delta measures how far the reference is from behaving
    # like a point evaluation on the test set; compositions sit at zero,
    # and the mu^2 decomposition closes to roundoff for any pair.
    print(f"  delta(A) = {kv.compute_delta(A):.2e}, "
          f"decomposition gap = {kv.decomposition_identity_check(T, A):.2e}")

    # Second pairing: Bernstein weights over window suprema, where
    # mu^2 = 2/(n+1) exactly, safely under the 4/n cap.
    T2, A2, _ = pair("sup_bernstein", n)
    mu2 = kv.compute_mu(T2, A2)
    print(f"\n{T2.name}: mu^2 = {mu2**2:.6f} = 2/(n+1) = {2.0 / (n + 1):.6f}")

    # A non-unital reference scales M: with A -> 2A, inf A(1) = 2 and the
    # general form of the bound takes over from the unital shortcut.
    A_double = kv.scale_operator(A, 2.0)
    report = kv.error_bound_report(T, A_double, f, n=n)
    print(f"\nnon-unital reference: M = {report.M}, lhs = {report.lhs:.4f} <= rhs = {report.rhs:.4f}")
    assert report.M == 0.5 and report.passed

    # Degenerate pair: T against itself has mu = 0, and the convention
    # omega(f, 0) = 0 collapses the bound to 0 <= 0.
    degenerate = kv.error_bound_report(A, A, f)
    print(f"degenerate pair: mu = {degenerate.mu}, lhs = {degenerate.lhs}, "
          f"rhs = {degenerate.rhs}")

    # Sweep the degree and fit the decay rate: the bound is O(n^{-1/2}).
    print("\nconvergence sweep, f = abs_center:")
    table = kv.convergence_sweep(
        {"family": "max_bernstein"},
        {"family": "composition"},
        "abs_center",
        [4, 8, 16, 32, 64],
        grid_points=2001,
    )
    print(f"  {'n':>4s} {'mu':>10s} {'lhs':>10s} {'rhs':>10s}")
    for r in table.reports:
        print(f"  {r.n:4d} {r.mu:10.5f} {r.lhs:10.5f} {r.rhs:10.5f}")
    lhs_slope, rhs_slope = table.rate_slopes()
    print(f"  log-log slopes (upper half): lhs {lhs_slope:.3f}, rhs {rhs_slope:.3f}")


if __name__ == "__main__":
    main()

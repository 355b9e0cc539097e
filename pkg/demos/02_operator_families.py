"""The operator registry: positive families that are not linear.

Each family maps sampled functions to sampled functions and carries a
set of claimed structural flags (sublinear, translatable, monotone,
unital, linear). The interesting members are sublinear and monotone
WITHOUT being linear: the max of two Bernstein operators, Bernstein
weights over window suprema, and a running max of ergodic averages.

Run:  python demos/02_operator_families.py
"""

import numpy as np

import korovkin as kv


def main():
    # The declarative path: ask for a family by name, get grids and warp
    # handling for free. m - 1 is padded to a multiple of the family's
    # node divisor so every node k/n is a grid point, never interpolated.
    T = kv.operator_from_config({"family": "max_bernstein", "n": 4, "grid_points": 101})
    print(f"built {T.name} on {T.source.size} grid points")
    print(f"claims: {sorted(T.claims)}")

    # Closed forms to sanity-check against. For the identity warp:
    #   T(1) = 1,  T(-e1) = -x,  T(e2) = x^2 + x(1 - x)/4.
    X = T.source
    x = X.coords
    e2 = kv.SampledFunction(X, x * x)
    image = T(e2)
    expected = x * x + x * (1.0 - x) / 4.0
    print(f"square image matches closed form: {np.abs(image.values - expected).max():.2e}")

    # Nonlinearity is easy to exhibit: scaling by -1 does not commute.
    f = kv.SampledFunction(X, np.sin(6.0 * x))
    neg_f = kv.SampledFunction(X, -f.values)
    flip_gap = np.abs(T(neg_f).values + T(f).values).max()
    print(f"max over ||T(-f) + T(f)||: {flip_gap:.4f}  (zero only for linear T)")

    # Sublinearity still gives one-sided control: -T(-f) <= T(f).
    assert np.all(-T(neg_f).values <= T(f).values + 1e-12)

    # Composition with a warp is the canonical reference operator. Warps
    # are snapped onto the grid so f(phi(x)) reads values, never blends.
    A = kv.operator_from_config({"family": "composition", "phi": "quadratic", "grid_points": 101})
    g = kv.SampledFunction(A.source, A.source.coords)
    print(f"\n{A.name}: identity composed with x^2 at x = 0.5 -> {A(g).values[A.source.size // 2]}")

    # The running max of ergodic averages under a warp keeps the same
    # four structural flags as its base operator and grows with n.
    K = kv.uniform_grid(0.0, 1.0, 101)
    warp = kv.snap_warp(kv.quadratic_warp(K), K)
    U = kv.make_composition(warp, K, K)
    h = kv.SampledFunction(K, np.cos(4.0 * K.coords))
    previous = None
    print("\nergodic running max, pointwise mean of image:")
    for n in (1, 2, 4, 8):
        Yn = kv.make_yosida_kakutani(U, n)(h)
        print(f"  n={n}: mean {Yn.values.mean():+.4f}")
        if previous is not None:
            assert np.all(previous <= Yn.values + 1e-15)
        previous = Yn.values

    # Scaling demonstrates how claims propagate: positive scaling keeps
    # sublinearity and monotonicity but loses unitality.
    doubled = kv.scale_operator(T, 2.0)
    print(f"\n{doubled.name} claims: {sorted(doubled.claims)}")

    # And the registry documents everything the config path accepts.
    print("\nfamilies:")
    for name, info in kv.FAMILIES.items():
        print(f"  {name:24s} {info['description']}")


if __name__ == "__main__":
    main()

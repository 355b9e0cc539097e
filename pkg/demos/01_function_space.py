"""Sampled function spaces: grids, norms, and the modulus of continuity.

Everything downstream works on finite grids. A Domain is a point set
with a covering radius (mesh); a SampledFunction is a vector of values
over one. The modulus of continuity is the only analytic quantity the
error bounds need, and it is computed exactly on the sample.

Run:  python demos/01_function_space.py
"""

import numpy as np

import korovkin as kv


def main():
    # A uniform grid on [0, 1]. The mesh is the covering radius: every
    # point of the interval lies within half a spacing of a grid point.
    X = kv.uniform_grid(0.0, 1.0, 101)
    print(f"grid: {X.size} points on [0, 1], mesh = {X.mesh}")

    # The built-in corpus covers the usual convergence suspects.
    print("\ncorpus functions:")
    for name in kv.corpus_names():
        f = kv.corpus_function(name, X)
        print(f"  {name:18s} sup norm {kv.sup_norm(f):.4f}")

    # The modulus of continuity omega(f, delta) is the largest |f(x)-f(y)|
    # over grid pairs with |x - y| <= delta. For the distance-to-center
    # function it equals delta itself (up to grid resolution).
    f = kv.corpus_function("abs_center", X)
    print("\nmodulus of continuity of abs_center:")
    for delta in (0.0, 0.05, 0.1, 0.2, 0.4):
        print(f"  omega(f, {delta:4.2f}) = {kv.modulus_of_continuity(f, delta):.4f}")

    # Two properties the bounds rely on. First, omega(f, 0) = 0 by
    # convention, which is what makes the degenerate mu = 0 case work.
    assert kv.modulus_of_continuity(f, 0.0) == 0.0

    # Second, the overshoot rule omega(f, t*delta) <= (1 + t) omega(f, delta),
    # here checked for the rough sawtooth where it is least comfortable.
    g = kv.corpus_function("lipschitz_sawtooth", X)
    delta = 0.1
    for t in (1.0, 2.0, 3.0):
        lhs = kv.modulus_of_continuity(g, t * delta)
        rhs = (1.0 + t) * kv.modulus_of_continuity(g, delta)
        print(f"  overshoot t={t:.0f}: {lhs:.4f} <= {rhs:.4f}")
        assert lhs <= rhs + kv.grid_tolerance(g)

    # Functions support arithmetic, and grids can be products; the same
    # modulus definition runs in any dimension using euclidean distances.
    axis = kv.uniform_grid(0.0, 1.0, 21)
    G = kv.product_grid([axis, axis])
    h = kv.SampledFunction.from_callable(G, lambda p: np.abs(p[:, 0] - p[:, 1]))
    print(f"\n2-D grid: {G.size} points, mesh = {G.mesh:.4f}")
    print(f"omega(|x - y|, 0.25) = {kv.modulus_of_continuity(h, 0.25):.4f}")


if __name__ == "__main__":
    main()

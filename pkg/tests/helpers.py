"""Shared builders for the test suite.

Grids are chosen so every node an operator needs to read is exactly a
grid point; the lcm of the per-family divisors keeps that true for
pairs of operators sharing one grid.
"""

import math

import numpy as np

import korovkin as kv


def grid_for(*family_n_pairs, grid_points=101):
    """Uniform [0, 1] grid carrying the nodes of every named family."""
    div = 1
    for family, n in family_n_pairs:
        div = math.lcm(div, kv.grid_divisor(family, n))
    return kv.registry_grid(div, grid_points)


def example1_pair(n, grid_points=101, warp="identity"):
    """Max-of-two-Bernstein operator against composition with one warp."""
    X = grid_for(("max_bernstein", n), ("composition", None), grid_points=grid_points)
    phi = kv.build_warp(warp, X, snap_to=X)
    T = kv.make_max_bernstein(phi, n, X, X)
    A = kv.make_composition(phi, X, X)
    return T, A, X


def example2_pair(n, grid_points=101, warp="identity"):
    """Window-sup Bernstein operator against composition with one warp."""
    X = grid_for(("sup_bernstein", n), ("composition", None), grid_points=grid_points)
    phi = kv.build_warp(warp, X, snap_to=X)
    T = kv.make_sup_bernstein(phi, n, X, X)
    A = kv.make_composition(phi, X, X)
    return T, A, X


def brute_modulus(values, points, delta):
    """All-pairs reference for the modulus of continuity.

    Mirrors the library's pair rule (distance <= delta with a hair of
    relative slack) but with none of its windowing shortcuts.
    """
    if delta < 0:
        raise ValueError("negative delta")
    if delta == 0:
        return 0.0
    pts = np.asarray(points, dtype=float)
    vals = np.asarray(values, dtype=float)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
    mask = dist <= delta * (1.0 + 1e-12)
    diff = np.abs(vals[:, None] - vals[None, :])
    return float(diff[mask].max()) if mask.any() else 0.0

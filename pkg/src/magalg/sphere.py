"""Deterministic unit-sphere sampling and derivative-free local search.

The Fibonacci lattice gives near-uniform deterministic coverage; a seeded
rotation decorrelates it from the coordinate axes while keeping runs
reproducible.  Local refinement is projected gradient ascent with central
finite differences and a step-halving line search, which tolerates the
kinks of piecewise-smooth objectives like eigenvalue magnitudes.
"""

from __future__ import annotations

import numpy as np

from .linalg3 import unit

_GOLDEN = np.pi * (3.0 - np.sqrt(5.0))
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def fibonacci_sphere(n) -> np.ndarray:
    """n near-uniform unit vectors, deterministic."""
    n = int(n)
    if n < 1:
        raise ValueError("need at least one sample")
    i = np.arange(n)
    y = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(1.0 - y * y, 0.0))
    phi = i * _GOLDEN
    return np.stack([np.cos(phi) * r, y, np.sin(phi) * r], axis=1)


def seeded_rotation(seed) -> np.ndarray:
    """Reproducible proper rotation matrix from a seed."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


def tangent_basis(n):
    """Two unit vectors spanning the plane orthogonal to unit n."""
    n = np.asarray(n, dtype=float)
    a = np.eye(3)[int(np.argmin(np.abs(n)))]
    t1 = unit(np.cross(n, a))
    t2 = np.cross(n, t1)
    return t1, t2


def golden_min(f, a, b, iters=80):
    """Golden-section minimum of f on [a, b]; returns (x, f(x))."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def golden_max(f, a, b, iters=80):
    x, fx = golden_min(lambda t: -f(t), a, b, iters=iters)
    return x, -fx


def sphere_ascent(f, x0, steps=100, fd_step=1e-6, step0=0.1):
    """Maximize f over the unit sphere starting from x0.

    Projected gradient ascent: central finite differences, gradient
    projected to the tangent plane, step-halving line search.  Monotone,
    deterministic, and never returns a worse point than x0.
    """
    x = unit(np.asarray(x0, dtype=float))
    fx = f(x)
    step = float(step0)
    for _ in range(int(steps)):
        g = np.empty(3)
        for k in range(3):
            e = np.zeros(3)
            e[k] = fd_step
            g[k] = (f(unit(x + e)) - f(unit(x - e))) / (2.0 * fd_step)
        g -= (g @ x) * x
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        d = g / gn
        s = step
        improved = False
        for _ in range(30):
            xn = unit(x + s * d)
            fn = f(xn)
            if fn > fx:
                x, fx = xn, fn
                step = min(2.0 * s, step0)
                improved = True
                break
            s *= 0.5
        if not improved:
            if s < 1e-15:
                break
            step = s
    return x, fx


def sphere_descent(f, x0, steps=100, fd_step=1e-6, step0=0.1):
    x, fx = sphere_ascent(lambda v: -f(v), x0, steps=steps, fd_step=fd_step, step0=step0)
    return x, -fx

"""Independent reference computations used by the tests.

None of these call into the package's solvers.
"""

import math

import numpy as np
from scipy.optimize import minimize_scalar


def golden_regularized(eps, c=(1.0, 1.0), rho=1.0):
    """Regularized minimum over the boundary ``(sqrt(rho^2 + t^2), t)`` by golden section.

    Interior points are never optimal when ``c_1 > 0``, so a scan of the
    boundary parameter suffices. Returns ``(x, f)`` with ``f = <c, x>``.
    """
    c1, c2 = c

    def f(t):
        r = math.hypot(rho, t)
        return lin(t, r) + 0.5 * eps * (r * r + t * t)

    def lin(t, r):
        # c1 r + c2 t; for c1 = c2 use c1 (r + t) = c1 rho^2 / (r - t) to avoid cancellation
        if c1 == -c2 and t > 0 or c1 == c2 and t < 0:
            return c1 * rho * rho / (r + abs(t))
        return c1 * r + c2 * t

    span = max(10.0, 4.0 * (1.0 / eps) ** (1.0 / 3.0), abs(c2) / eps)
    # coarse scan picks a bracket, golden section refines it
    ts = np.linspace(-span, span, 20001)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, ts.size - 1)]
    res = minimize_scalar(f, bracket=(lo, ts[i], hi), method="golden", tol=1e-12)
    t = float(res.x)
    r = math.hypot(rho, t)
    return np.array([r, t]), lin(t, r)


def vertex_enumeration_2d(c, rows):
    """Minimum of ``<c, x>`` over ``{x : <a, x> >= b}`` in the plane by brute force.

    Returns ``("optimal", value)``, ``("unbounded", None)`` or ``("infeasible", None)``.
    `rows` may use senses '>=', '<=' or '='.
    """
    c = np.asarray(c, dtype=float)
    G, h = [], []
    for a, b, sense in rows:
        a = np.asarray(a, dtype=float)
        if sense in (">=", "="):
            G.append(a), h.append(b)
        if sense in ("<=", "="):
            G.append(-a), h.append(-b)
    G, h = np.array(G).reshape(-1, 2), np.array(h)

    def feasible(x, tol=1e-9):
        return bool(np.all(G @ x >= h - tol * (1 + np.abs(h))))

    verts = []
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            M = np.array([G[i], G[j]])
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            x = np.linalg.solve(M, [h[i], h[j]])
            if feasible(x):
                verts.append(x)
    # unbounded iff some recession direction d (G d >= 0) has <c, d> < 0;
    # the recession cone is generated by the edge directions of its boundary
    dirs = [np.array([1.0, 0.0]), np.array([-1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, -1.0])]
    for g in G:
        dirs += [np.array([-g[1], g[0]]), np.array([g[1], -g[0]])]
    rec = [d for d in dirs if np.linalg.norm(d) > 0 and np.all(G @ d >= -1e-12 * np.linalg.norm(d))]
    has_point = bool(verts) or (len(G) == 0)
    if not has_point:
        # a non-empty polyhedron without vertices contains a line; probe points on each row boundary
        probes = [g * b / float(g @ g) for g, b in zip(G, h) if g @ g > 0] + [np.zeros(2)]
        has_point = any(feasible(p) for p in probes)
        if not has_point:
            return "infeasible", None
    if any(float(c @ d) < -1e-12 * np.linalg.norm(d) for d in rec):
        return "unbounded", None
    if not verts:
        probes = [g * b / float(g @ g) for g, b in zip(G, h) if g @ g > 0] + [np.zeros(2)]
        return "optimal", min(float(c @ p) for p in probes if feasible(p))
    return "optimal", min(float(c @ v) for v in verts)


def sphere_points(k, m):
    """Near-uniform unit vectors in R^k (k <= 3): endpoints, circle lattice or Fibonacci sphere."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        t = 2 * math.pi * (np.arange(m) + 0.5) / m
        return np.column_stack([np.cos(t), np.sin(t)])
    if k == 3:
        i = np.arange(m) + 0.5
        z = 1 - 2 * i / m
        phi = math.pi * (3 - math.sqrt(5)) * i
        r = np.sqrt(1 - z * z)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    raise ValueError("lattice only for k <= 3")


def sampled_supremum(U, x, m=200_000):
    """max <a, x> over a lattice of boundary members a = a0 + rho P u of U."""
    a = U.a0 + U.rho * sphere_points(U.k, m) @ U.P.T
    return float((a @ x).max())

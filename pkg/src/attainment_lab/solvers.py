"""Minimizing sequence, Tikhonov-regularized solves and polyhedral approximations.

All routines here are specialised to the hyperboloid feasible sets produced
by :func:`attainment_lab.robust.build_canonical`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .conic import as_vec, hyperboloid_contains, hyperboloid_project
from .errors import ConsistencyError, NumericalError, UnsupportedProblemError
from .lp import LinearProgram, LpOutcome, LpRow, lp_solve
from .robust import CanonicalInstance, is_canonical

LIMIT_DIRECTION = np.array([1.0, -1.0]) / math.sqrt(2.0)


# -- minimizing sequence of (P) ---------------------------------------------


def minimizing_sequence(k: int) -> tuple[np.ndarray, float]:
    """``x = (sqrt(1 + k^2), -k)`` and its objective ``x_1 + x_2``.

    The objective is returned in the cancellation-free form
    ``1 / (sqrt(1 + k^2) + k)``; see :func:`sequence_values` for both forms.
    """
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k}")
    k = int(k)
    r = math.sqrt(1.0 + float(k) * float(k))
    return np.array([r, -float(k)]), 1.0 / (r + k)


def sequence_values(ks) -> dict[str, np.ndarray]:
    """Vectorised sequence: ``x1, x2, f`` (stable) and ``f_naive = x1 + x2``."""
    k = np.asarray(ks, dtype=float)
    r = np.sqrt(1.0 + k * k)
    return {"x1": r, "x2": -k, "f": 1.0 / (r + k), "f_naive": r - k}


def direction_error(x) -> float:
    """Distance between ``x / ||x||`` and the limiting direction ``(1, -1)/sqrt(2)``."""
    x = as_vec(x, "x")
    return float(np.linalg.norm(x / np.linalg.norm(x) - LIMIT_DIRECTION))


# -- regularization ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RegularizedSolve:
    epsilon: float
    x_star: np.ndarray
    objective_value: float
    regularized_value: float
    kkt_residual: float
    iterations: int
    fallback_gap: float = 0.0

    @property
    def x_norm(self) -> float:
        return float(np.linalg.norm(self.x_star))


def _require_canonical(instance: CanonicalInstance) -> None:
    if not is_canonical(instance):
        raise UnsupportedProblemError("instance is not a canonical hyperboloid problem")


def regularized_kkt_residual(instance: CanonicalInstance, epsilon: float, x) -> float:
    """KKT residual of ``min <c,x> + eps/2 ||x||^2`` over the hyperboloid at `x`."""
    c = instance.problem.c
    hs = instance.feasible_set
    x = as_vec(x, "x")
    r = hs.height(x[1:])
    lam = float(c[0] + epsilon * x[0])
    feas = max(0.0, r - float(x[0]))
    if r < 1e-150:
        # apex of the cone (rho^2 underflows): needs ||c_tail|| <= c_1
        return max(feas, float(np.linalg.norm(c[1:])) - float(c[0]), 0.0)
    stat = float(np.linalg.norm(c[1:] + epsilon * x[1:] + lam * x[1:] / r))
    comp = abs(lam) * abs(r - float(x[0]))
    return max(stat, feas, comp, -lam)


def projected_descent(instance: CanonicalInstance, epsilon: float, x0=None, max_iter: int = 200) -> tuple[np.ndarray, int]:
    """Projected gradient on ``<c,x> + eps/2 ||x||^2`` with step ``1/eps``.

    The gradient is ``eps``-Lipschitz, so the step is the reciprocal Lipschitz
    constant and the iteration reaches its fixed point immediately; the loop
    stays general so the check does not depend on that.
    """
    c = instance.problem.c
    hs = instance.feasible_set
    x = np.zeros(hs.n) if x0 is None else as_vec(x0, "x0")
    step = 1.0 / epsilon
    for it in range(1, max_iter + 1):
        x_new = hyperboloid_project(x - step * (c + epsilon * x), hs)
        # the step amplifies rounding by 1/eps: allow that noise floor on top of a relative 1e-9
        noise = 8.0 * np.finfo(float).eps * (np.linalg.norm(c) * step + np.linalg.norm(x))
        if np.linalg.norm(x_new - x) <= 1e-9 * (1.0 + np.linalg.norm(x_new)) + noise:
            return x_new, it
        x = x_new
    raise NumericalError(f"projected descent did not converge in {max_iter} iterations (eps={epsilon})")


def _radial_root(c1: float, s: float, rho: float, epsilon: float, tol: float) -> tuple[float, int]:
    """Root of ``g'(t) = c1 t / r - s + 2 eps t``, ``r = sqrt(rho^2 + t^2)``, on ``t >= 0``."""
    if s == 0.0:
        return 0.0, 0
    if rho < 1e-150:
        # rho^2 underflows: the set is the cone to double precision
        return max(0.0, (s - c1) / (2.0 * epsilon)), 0

    def d1(t):
        r = math.hypot(rho, t)
        if t <= rho:
            return c1 * t / r - s + 2.0 * epsilon * t
        # for large t, c1 t / r rewritten without the cancellation against s
        return (c1 - s) - c1 * (rho / r) * (rho / (r + t)) + 2.0 * epsilon * t

    def d2(t):
        r = math.hypot(rho, t)
        return c1 * (rho / r) ** 2 / r + 2.0 * epsilon

    lo, hi = 0.0, s / (2.0 * epsilon)
    if d1(hi) < 0.0:
        raise NumericalError("regularized root not bracketed")
    # cube-root law as a starting guess, clamped into the bracket
    t = min(max((c1 * rho * rho / (4.0 * epsilon)) ** (1.0 / 3.0), lo), hi)
    for it in range(1, 2001):
        g = d1(t)
        if abs(g) <= tol:
            return t, it
        if g < 0.0:
            lo = t
        else:
            hi = t
        t_new = t - g / d2(t)
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if t_new == t or hi - lo <= 4.0 * np.spacing(hi):
            # bracket down to a few ulps: the root is resolved as far as doubles allow
            return min((t, t_new), key=lambda v: abs(d1(v))), it
        t = t_new
    raise NumericalError(f"regularized Newton iteration did not converge (|g'|={abs(d1(t)):.3e}, tol={tol:.1e})")


def solve_regularized(instance: CanonicalInstance, epsilon: float, tol: float = 1e-12, check: bool = True) -> RegularizedSolve:
    """Minimize ``<c,x> + (eps/2)||x||^2`` over the instance's hyperboloid.

    With ``c_1 > 0`` the minimizer sits on the boundary with tail pointing
    along ``-c_tail``, so ``x = (sqrt(rho^2 + t^2), -t c_tail/||c_tail||)``
    and only the scalar ``t >= 0`` is unknown. Projected descent computes the
    same point independently when `check` is set.
    """
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _require_canonical(instance)
    c = instance.problem.c
    if not c[0] > 0:
        raise UnsupportedProblemError("regularized solve needs a positive first objective coefficient")
    hs = instance.feasible_set
    c_tail = c[1:]
    s = float(np.linalg.norm(c_tail))
    t, iters = _radial_root(float(c[0]), s, hs.rho, epsilon, tol)

    x = np.zeros(hs.n)
    if s > 0.0:
        x[1:] = -t * c_tail / s
    x[0] = hs.height(x[1:])
    # <c, x> = c1 r - s t, rewritten because c1 r and s t nearly cancel
    f = float(c[0]) * hs.rho * hs.rho / (x[0] + t) + (float(c[0]) - s) * t if x[0] + t > 0 else float(c @ x)
    gap = 0.0
    if check:
        x_pg, _ = projected_descent(instance, epsilon)
        gap = float(np.linalg.norm(x_pg - x)) / max(1.0, float(np.linalg.norm(x)))
        if gap > 1e-4:
            raise ConsistencyError(f"regularized solvers disagree by {gap:.3e} at eps={epsilon}")
    return RegularizedSolve(
        epsilon=float(epsilon),
        x_star=x,
        objective_value=f,
        regularized_value=f + 0.5 * epsilon * float(x @ x),
        kkt_residual=regularized_kkt_residual(instance, epsilon, x),
        iterations=iters,
        fallback_gap=gap,
    )


@dataclass(frozen=True, eq=False)
class RegularizationPath:
    ks: tuple[int, ...]
    entries: tuple[RegularizedSolve, ...]

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([e.epsilon for e in self.entries])

    @property
    def values(self) -> np.ndarray:
        return np.array([e.objective_value for e in self.entries])

    @property
    def norms(self) -> np.ndarray:
        return np.array([e.x_norm for e in self.entries])

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        """``(k, epsilon, f, ||x||, kkt)`` per entry."""
        return [(k, e.epsilon, e.objective_value, e.x_norm, e.kkt_residual) for k, e in zip(self.ks, self.entries)]


def default_schedule(k_max: int = 2**20) -> list[int]:
    """Powers of two ``1, 2, 4, ...`` up to `k_max`."""
    out, k = [], 1
    while k <= k_max:
        out.append(k)
        k *= 2
    return out


def regularization_path(instance: CanonicalInstance, k_schedule: Sequence[int], tol: float = 1e-12) -> RegularizationPath:
    ks = [int(k) for k in k_schedule]
    if not ks or any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k schedule must be a non-empty, strictly increasing list of positive integers")
    entries = tuple(solve_regularized(instance, 1.0 / k, tol) for k in ks)
    return RegularizationPath(tuple(ks), entries)


# -- polyhedral approximations ----------------------------------------------


@dataclass(frozen=True, eq=False)
class PolyhedralApprox:
    """``{x : <row, x> >= rhs for every (row, rhs)}``; inner ones keep their generators."""

    kind: Literal["outer", "inner"]
    inequalities: tuple[tuple[np.ndarray, float], ...]
    vertices: np.ndarray | None = None
    rays: np.ndarray | None = None

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vec(x, "x")
        return all(float(a @ x) >= b - tol * (1.0 + abs(b)) for a, b in self.inequalities)

    def to_lp(self, c) -> LinearProgram:
        return LinearProgram(c, tuple(LpRow(a, b, ">=") for a, b in self.inequalities))

    def solve(self, c) -> LpOutcome:
        return lp_solve(self.to_lp(c))


def theta_grid(count: int, include_endpoints: bool = True, half_angle: float = math.pi / 4) -> np.ndarray:
    """Uniform angles on ``[-half_angle, half_angle]``.

    Without endpoints the grid is the set of cell midpoints. A single angle is 0.
    """
    if count < 1:
        raise ValueError("theta count must be >= 1")
    if count == 1:
        return np.zeros(1)
    if include_endpoints:
        return np.linspace(-half_angle, half_angle, count)
    width = 2.0 * half_angle / count
    return -half_angle + width * (np.arange(count) + 0.5)


def full_circle_grid(k: int) -> np.ndarray:
    """``theta_i = 2 pi i / k`` for ``i = 1..k``."""
    return 2.0 * math.pi * np.arange(1, k + 1) / k


def poly_outer(instance: CanonicalInstance, directions) -> PolyhedralApprox:
    """Supporting half-spaces ``x_1 >= rho u_0 + <u_tail, x_tail>`` for unit ``u``.

    `directions` is either a 1-D array of angles (``n = 2``; each angle
    yields the pair ``x_1 >= |rho cos(th) + x_2 sin(th)|``) or a 2-D array whose
    rows are unit vectors in ``R^n``.
    """
    _require_canonical(instance)
    hs = instance.feasible_set
    d = np.asarray(directions, dtype=float)
    rows: list[tuple[np.ndarray, float]] = []
    if d.ndim == 1:
        if hs.n != 2:
            raise ValueError("angle grids are only defined for n = 2")
        for th in d:
            co, si = math.cos(th), math.sin(th)
            rows.append((np.array([1.0, -si]), hs.rho * co))
            rows.append((np.array([1.0, si]), -hs.rho * co))
    else:
        if d.shape[1] != hs.n:
            raise ValueError(f"direction vectors must have length {hs.n}")
        for u in d:
            if abs(np.linalg.norm(u) - 1.0) > 1e-12:
                raise ValueError(f"direction {u.tolist()} is not a unit vector")
            rows.append((np.concatenate([[1.0], -u[1:]]), hs.rho * float(u[0])))
    return PolyhedralApprox("outer", tuple(rows))


def generators_to_inequalities(vertices: np.ndarray, rays: np.ndarray, tol: float = 1e-12) -> list[tuple[np.ndarray, float]]:
    """Facets of ``conv(vertices) + cone(rays)`` in the plane, by brute force.

    Every line through two generators that leaves all of them on one side is
    a facet; rows are normalised and de-duplicated.
    """
    V = np.asarray(vertices, dtype=float)
    R = np.asarray(rays, dtype=float).reshape(-1, 2)
    candidates = [(V[i], V[j] - V[i]) for i in range(len(V)) for j in range(i + 1, len(V))]
    candidates += [(v, r) for v in V for r in R]
    out: list[tuple[np.ndarray, float]] = []
    for p, d in candidates:
        nrm = np.hypot(d[0], d[1])
        if nrm == 0.0:
            continue
        a = np.array([-d[1], d[0]]) / nrm
        for sgn in (1.0, -1.0):
            aa = sgn * a
            rhs = float(aa @ p)
            if np.all(V @ aa >= rhs - tol * (1 + abs(rhs))) and np.all(R @ aa >= -tol):
                if not any(np.allclose(aa, q, atol=1e-12) and abs(rhs - b) <= 1e-12 for q, b in out):
                    out.append((aa, rhs))
                break
    return out


def poly_inner(instance: CanonicalInstance, K: int) -> PolyhedralApprox:
    """Hull of the boundary points ``(sqrt(rho^2 + j^2), j)``, ``|j| <= K``, plus rays ``(1, +-1)``."""
    _require_canonical(instance)
    if int(K) != K or K < 0:
        raise ValueError(f"K must be a non-negative integer, got {K}")
    hs = instance.feasible_set
    if hs.n != 2:
        raise UnsupportedProblemError("inner approximation is implemented for n = 2")
    js = np.arange(-int(K), int(K) + 1, dtype=float)
    V = np.column_stack([np.sqrt(hs.rho * hs.rho + js * js), js])
    R = np.array([[1.0, 1.0], [1.0, -1.0]])
    rows = generators_to_inequalities(V, R)
    for v in V:
        if not hyperboloid_contains(v, hs, 1e-9):
            raise NumericalError(f"inner vertex {v.tolist()} is infeasible")
    return PolyhedralApprox("inner", tuple(rows), V, R)

"""Dense two-phase simplex with certificates for every outcome.

Free variables are split as ``x = x_plus - x_minus``; each inequality row
gets a slack. Dantzig pricing switches to Bland's rule once the iteration
count passes ``50 * rows``, which rules out cycling.

Besides the primal point, every outcome carries a certificate that
:func:`lp_verify` re-checks independently:

* Optimal: row multipliers ``y`` with ``sum_i y_i a_i = c`` and
  ``sum_i y_i rhs_i = value``, ``y_i >= 0`` on ``>=`` rows and
  ``y_i <= 0`` on ``<=`` rows.
* Unbounded: a feasible point and a unit ray ``d`` with ``<c, d> < 0``
  that satisfies the homogeneous rows.
* Infeasible: Farkas multipliers ``y`` (same sign rules) with
  ``sum_i y_i a_i = 0`` and ``sum_i y_i rhs_i > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal, Sequence

import numpy as np

from .conic import as_vec
from .errors import DimensionError, NumericalError

Sense = Literal[">=", "<=", "="]

PIVOT_TOL = 1e-11
ZERO_TOL = 1e-12
PRICE_TOL = 1e-10
FEAS_TOL = 1e-9
BLAND_FACTOR = 50


@dataclass(frozen=True, eq=False)
class LpRow:
    a: np.ndarray
    rhs: float
    sense: Sense = ">="

    def __post_init__(self):
        if self.sense not in (">=", "<=", "="):
            raise ValueError(f"unknown sense {self.sense!r}")
        object.__setattr__(self, "a", as_vec(self.a, "row"))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Minimize ``<c, x>`` over free ``x`` subject to `rows`."""

    c: np.ndarray
    rows: tuple[LpRow, ...]

    def __post_init__(self):
        c = as_vec(self.c, "c")
        rows = tuple(r if isinstance(r, LpRow) else LpRow(*r) for r in self.rows)
        for r in rows:
            if r.a.size != c.size:
                raise DimensionError(f"row of dim {r.a.size} in an LP with {c.size} variables")
            if not np.isfinite(r.rhs):
                raise ValueError("non-finite right-hand side")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.c.size

    def matrix(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        if not self.rows:
            return np.zeros((0, self.n)), np.zeros(0), []
        return (
            np.array([r.a for r in self.rows]),
            np.array([r.rhs for r in self.rows]),
            [r.sense for r in self.rows],
        )


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class LpOutcome:
    status: LpStatus
    x_star: np.ndarray | None = None
    value: float | None = None
    ray: np.ndarray | None = None
    duals: np.ndarray | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        p = T[r, j]
        if abs(p) < PIVOT_TOL:
            raise NumericalError(
                f"pivot breakdown: |T[{r},{j}]| = {abs(p):.3e} < {PIVOT_TOL:.0e}; "
                f"basis={self.basis}; tableau=\n{np.array2string(T, precision=4)}"
            )
        T[r] /= p
        for i in range(T.shape[0]):
            if i != r and T[i, j] != 0.0:
                T[i] -= T[i, j] * T[r]
        T[np.abs(T) < 1e-14] = 0.0
        self.basis[r] = j

    def run(self, allowed: np.ndarray) -> int | None:
        """Iterate to optimality; return the entering column if unbounded."""
        T = self.T
        m = self.m
        limit = BLAND_FACTOR * max(m, 1)
        local = 0
        while True:
            rc = T[-1, :-1]
            cand = np.flatnonzero(allowed & (rc < -PRICE_TOL))
            if cand.size == 0:
                return None
            if local >= limit:
                j = int(cand[0])
            else:
                j = int(cand[np.argmin(rc[cand])])
            col = T[:m, j]
            rows = np.flatnonzero(col > ZERO_TOL)
            if rows.size == 0:
                return j
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            local += 1
            self.iterations += 1
            if self.iterations > 100000:
                raise NumericalError("simplex iteration limit exceeded")


def lp_solve(lp: LinearProgram) -> LpOutcome:
    A, rhs, senses = lp.matrix()
    m, n = A.shape
    if m == 0:
        if np.any(lp.c != 0.0):
            ray = -lp.c / np.linalg.norm(lp.c)
            return LpOutcome(LpStatus.UNBOUNDED, np.zeros(n), None, ray)
        return LpOutcome(LpStatus.OPTIMAL, np.zeros(n), 0.0, duals=np.zeros(0))

    # standard form: [x+ | x- | slacks], rows scaled by sigma so the rhs is >= 0
    slack_rows = [i for i, s in enumerate(senses) if s != "="]
    n_std = 2 * n + len(slack_rows)
    A_std = np.zeros((m, n_std))
    A_std[:, :n] = A
    A_std[:, n : 2 * n] = -A
    for k, i in enumerate(slack_rows):
        A_std[i, 2 * n + k] = -1.0 if senses[i] == ">=" else 1.0
    sigma = np.where(rhs < 0, -1.0, 1.0)
    A_std *= sigma[:, None]
    b_std = rhs * sigma
    c_std = np.concatenate([lp.c, -lp.c, np.zeros(len(slack_rows))])

    # phase 1 with one artificial per row
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A_std
    T[:m, n_std : n_std + m] = np.eye(m)
    T[:m, -1] = b_std
    T[-1, :n_std] = -A_std.sum(axis=0)
    T[-1, -1] = -b_std.sum()
    tab = _Tableau(T, list(range(n_std, n_std + m)))
    allowed = np.zeros(n_std + m, dtype=bool)
    allowed[:n_std] = True
    tab.run(allowed)

    phase1 = -tab.T[-1, -1]
    scale = 1.0 + float(np.abs(b_std).max())
    if phase1 > FEAS_TOL * scale:
        w = 1.0 - tab.T[-1, n_std : n_std + m]
        y = sigma * w
        y /= np.abs(y).max()
        return LpOutcome(LpStatus.INFEASIBLE, duals=y, iterations=tab.iterations)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = list(range(m))
    for r in range(m):
        j0 = tab.basis[r]
        if j0 < n_std:
            continue
        row = tab.T[r, :n_std]
        nz = np.flatnonzero(np.abs(row) > 1e-9)
        if nz.size:
            tab.T[r, -1] = 0.0
            tab.pivot(r, int(nz[0]))
        else:
            keep.remove(r)
    T2 = np.vstack([tab.T[keep][:, list(range(n_std)) + [-1]], np.zeros(n_std + 1)])
    basis = [tab.basis[r] for r in keep]
    T2[-1, :n_std] = c_std
    for i, j in enumerate(basis):
        if c_std[j] != 0.0:
            T2[-1] -= c_std[j] * T2[i]
    tab2 = _Tableau(T2, basis)
    tab2.iterations = tab.iterations
    entering = tab2.run(np.ones(n_std, dtype=bool))

    z = np.zeros(n_std)
    for i, j in enumerate(tab2.basis):
        z[j] = tab2.T[i, -1]
    x = z[:n] - z[n : 2 * n]

    if entering is not None:
        d = np.zeros(n_std)
        d[entering] = 1.0
        for i, j in enumerate(tab2.basis):
            d[j] = -tab2.T[i, entering]
        ray = d[:n] - d[n : 2 * n]
        ray /= np.linalg.norm(ray)
        return LpOutcome(LpStatus.UNBOUNDED, x, None, ray, iterations=tab2.iterations)

    B = A_std[keep][:, tab2.basis]
    y_std = np.linalg.solve(B.T, c_std[tab2.basis])
    y = np.zeros(m)
    y[keep] = sigma[keep] * y_std
    return LpOutcome(LpStatus.OPTIMAL, x, float(lp.c @ x), duals=y, iterations=tab2.iterations)


def _rows_ok(A: np.ndarray, v: np.ndarray, rhs: np.ndarray, senses: Sequence[str], tol: float) -> bool:
    lhs = A @ v
    for val, r, s in zip(lhs, rhs, senses):
        slack = tol * (1.0 + abs(r))
        if s == ">=" and val < r - slack:
            return False
        if s == "<=" and val > r + slack:
            return False
        if s == "=" and abs(val - r) > slack:
            return False
    return True


def _signs_ok(y: np.ndarray, senses: Sequence[str], tol: float) -> bool:
    for yi, s in zip(y, senses):
        if s == ">=" and yi < -tol:
            return False
        if s == "<=" and yi > tol:
            return False
    return True


def lp_verify(lp: LinearProgram, outcome: LpOutcome, tol: float = 1e-9) -> bool:
    """Re-check the claims of `outcome` against `lp` from scratch."""
    A, rhs, senses = lp.matrix()
    m = len(senses)
    if outcome.status == LpStatus.OPTIMAL:
        x = outcome.x_star
        if x is None or outcome.value is None or not _rows_ok(A, x, rhs, senses, tol):
            return False
        value = float(lp.c @ x)
        if abs(value - outcome.value) > tol * (1.0 + abs(value)):
            return False
        if outcome.duals is None:
            return True
        y = outcome.duals
        scale = 1.0 + float(np.abs(y).max(initial=0.0))
        return (
            _signs_ok(y, senses, tol)
            and float(np.abs(A.T @ y - lp.c).max(initial=0.0)) <= tol * scale
            and abs(float(rhs @ y) - outcome.value) <= tol * scale * (1.0 + float(np.abs(rhs).max(initial=0.0)))
        )
    if outcome.status == LpStatus.UNBOUNDED:
        d = outcome.ray
        if d is None or outcome.x_star is None:
            return False
        if not _rows_ok(A, outcome.x_star, rhs, senses, tol):
            return False
        d = d / np.linalg.norm(d)
        return _rows_ok(A, d, np.zeros(m), senses, tol) and float(lp.c @ d) < -tol
    y = outcome.duals
    if y is None or m == 0:
        return False
    y = y / np.abs(y).max()
    return (
        _signs_ok(y, senses, tol)
        and float(np.abs(A.T @ y).max()) <= tol
        and float(rhs @ y) > tol
    )

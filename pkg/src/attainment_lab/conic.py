"""Second-order cones, affine-conic constraints and hyperboloid feasible sets.

Vectors are plain 1-D ``float64`` numpy arrays. Every cone carries its
dominant-coordinate convention explicitly: ``"first"`` means
``y[0] >= ||y[1:]||`` and ``"last"`` means ``y[-1] >= ||y[:-1]||``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .errors import DimensionError, NumericalError

Dominant = Literal["first", "last"]

DIAGNOSIS_TOL = 1e-9


def as_vec(x, name: str = "vector") -> np.ndarray:
    """Return `x` as a finite 1-D float array (a fresh copy)."""
    v = np.atleast_1d(np.array(x, dtype=float))
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _norm(v: np.ndarray) -> float:
    # Plain sum of squares, so membership tests reproduce sqrt(1 + x2*x2) bit for bit.
    return math.sqrt(float(np.sum(v * v)))


@dataclass(frozen=True)
class SecondOrderCone:
    dim: int
    dominant: Dominant = "first"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"cone dimension must be an integer >= 2, got {self.dim}")
        if self.dominant not in ("first", "last"):
            raise ValueError(f"dominant must be 'first' or 'last', got {self.dominant!r}")

    def split(self, y) -> tuple[float, np.ndarray]:
        """Return ``(dominant coordinate, remaining coordinates)`` of `y`."""
        y = as_vec(y, "y")
        if y.size != self.dim:
            raise DimensionError(f"vector of dim {y.size} does not match cone of dim {self.dim}")
        if self.dominant == "first":
            return float(y[0]), y[1:]
        return float(y[-1]), y[:-1]

    def join(self, head: float, rest) -> np.ndarray:
        rest = np.asarray(rest, dtype=float)
        if self.dominant == "first":
            return np.concatenate(([head], rest))
        return np.concatenate((rest, [head]))


@dataclass(frozen=True, eq=False)
class AffineConicConstraint:
    """The constraint ``A x - b`` in `cone`."""

    A: np.ndarray
    b: np.ndarray
    cone: SecondOrderCone

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2:
            raise DimensionError(f"A must be a matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A has non-finite entries")
        b = as_vec(self.b, "b")
        if b.size != A.shape[0]:
            raise DimensionError(f"b has dim {b.size} but A has {A.shape[0]} rows")
        if self.cone.dim != A.shape[0]:
            raise DimensionError(f"cone dim {self.cone.dim} != row count {A.shape[0]}")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))

    @property
    def n_vars(self) -> int:
        return self.A.shape[1]

    def slack(self, x) -> np.ndarray:
        x = as_vec(x, "x")
        if x.size != self.n_vars:
            raise DimensionError(f"x has dim {x.size}, constraint expects {self.n_vars}")
        return self.A @ x - self.b

    def contains(self, x, tol: float = 0.0) -> bool:
        return soc_contains(self.slack(x), self.cone, tol)

    def same_as(self, other: "AffineConicConstraint") -> bool:
        return (
            self.cone == other.cone
            and self.A.shape == other.A.shape
            and bool(np.array_equal(self.A, other.A))
            and bool(np.array_equal(self.b, other.b))
        )


@dataclass(frozen=True, eq=False)
class ConicProblem:
    """Minimize ``<c, x>`` subject to an affine-conic constraint."""

    c: np.ndarray
    constraint: AffineConicConstraint

    def __post_init__(self):
        c = as_vec(self.c, "c")
        if c.size != self.constraint.n_vars:
            raise DimensionError(f"c has dim {c.size}, A has {self.constraint.n_vars} columns")
        object.__setattr__(self, "c", _frozen(c))

    @property
    def n(self) -> int:
        return self.c.size

    def objective(self, x) -> float:
        return float(self.c @ as_vec(x, "x"))


@dataclass(frozen=True)
class HyperboloidSet:
    """``{x in R^n : x[0] >= sqrt(rho^2 + ||x[1:]||^2)}``."""

    n: int
    rho: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"ambient dimension must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.rho) or self.rho < 0:
            raise ValueError(f"rho must be finite and >= 0, got {self.rho}")
        object.__setattr__(self, "rho", float(self.rho))

    def height(self, tail) -> float:
        """Boundary value ``sqrt(rho^2 + ||tail||^2)``."""
        tail = np.asarray(tail, dtype=float)
        return math.sqrt(self.rho * self.rho + float(np.sum(tail * tail)))


def soc_contains(y, cone: SecondOrderCone, tol: float = 0.0) -> bool:
    head, rest = cone.split(y)
    return head >= _norm(rest) - tol


def soc_interior_contains(y, cone: SecondOrderCone, margin: float = 0.0) -> bool:
    head, rest = cone.split(y)
    return head > _norm(rest) + margin


def soc_margin(y, cone: SecondOrderCone) -> float:
    """Dominant coordinate minus the norm of the rest."""
    head, rest = cone.split(y)
    return head - _norm(rest)


def soc_project(y, cone: SecondOrderCone) -> np.ndarray:
    """Euclidean projection onto the cone (closed form)."""
    head, rest = cone.split(y)
    s = _norm(rest)
    if s <= head:
        return cone.join(head, rest)
    if s <= -head:
        return np.zeros(cone.dim)
    alpha = 0.5 * (head + s)
    return cone.join(alpha, rest * (alpha / s))


def hyperboloid_contains(x, hset: HyperboloidSet, tol: float = 0.0) -> bool:
    x = as_vec(x, "x")
    if x.size != hset.n:
        raise DimensionError(f"x has dim {x.size}, set has dim {hset.n}")
    return float(x[0]) >= hset.height(x[1:]) - tol


def hyperboloid_kkt_residual(x, z, hset: HyperboloidSet) -> float:
    """Scaled KKT residual of `z` as the projection of `x` onto `hset`.

    The multiplier of ``sqrt(rho^2 + ||z_tail||^2) - z_0 <= 0`` is read off
    the first stationarity row, ``lam = z_0 - x_0``.
    """
    x = as_vec(x, "x")
    z = as_vec(z, "z")
    r = hset.height(z[1:])
    lam = float(z[0] - x[0])
    tail_grad = z[1:] / r if r > 0 else np.zeros_like(z[1:])
    stat = float(np.linalg.norm(z[1:] - x[1:] + max(lam, 0.0) * tail_grad))
    infeas = max(0.0, r - float(z[0]))
    # the constraint gap is measured relative to |z| so it does not double the scaling
    comp = max(lam, 0.0) * abs(r - float(z[0])) / (1.0 + float(np.linalg.norm(z)))
    return max(stat, infeas, comp, -lam) / (1.0 + float(np.linalg.norm(x)))


def hyperboloid_project(x, hset: HyperboloidSet, tol: float = 1e-9) -> np.ndarray:
    """Nearest point of `hset` to `x`.

    Outside points land on the boundary at ``z_0 = w`` with
    ``z_tail = x_tail * w / (2 w - x_0)``, where ``w - x_0`` is the KKT
    multiplier. `w` is the unique root of
    ``psi(w) = w - sqrt(rho^2 + (s w / (2 w - x_0))^2)`` on
    ``(max(x_0, 0), inf)``, bracketed then polished by Newton.
    """
    x = as_vec(x, "x")
    if x.size != hset.n:
        raise DimensionError(f"x has dim {x.size}, set has dim {hset.n}")
    if hyperboloid_contains(x, hset):
        return x.copy()
    if hset.rho < 1e-150:
        # rho^2 underflows, so the set is the cone in double precision; lift onto the set
        z = soc_project(x, SecondOrderCone(hset.n, "first"))
        z[0] = max(z[0], hset.height(z[1:]))
        return z

    rho = hset.rho
    x0 = float(x[0])
    tail = x[1:]
    s = _norm(tail)
    if s == 0.0:
        z = np.zeros(hset.n)
        z[0] = rho
        return z

    def ratio(w):
        return 0.5 if x0 == 0.0 else w / (2.0 * w - x0)

    def psi(w):
        return w - math.hypot(rho, s * ratio(w))

    def dpsi(w):
        h = s * ratio(w)
        dh = 0.0 if x0 == 0.0 else -s * x0 / (2.0 * w - x0) ** 2
        return 1.0 - h * dh / math.hypot(rho, h)

    lo = max(x0, 0.0)
    hi = max(lo, math.hypot(rho, s))
    for _ in range(60):
        if psi(hi) > 0.0:
            break
        hi = 2.0 * hi + 1.0
    else:
        raise NumericalError(f"could not bracket projection root for x={x.tolist()}, rho={rho}")
    f_lo = psi(lo) if not (x0 == 0.0 and lo == 0.0) else -math.hypot(rho, 0.5 * s)
    if f_lo >= 0.0:
        # psi(x0) < 0 for every outside point; a non-negative value is rounding
        # on a point within an ulp of the boundary, so the root is x0 itself
        w = lo
    else:
        if lo == 0.0 and x0 == 0.0:
            # psi is continuous from the right at 0; nudge into the open domain
            lo = 1e-300
        w = brentq(psi, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3 if f_lo < 0.0 else 0):
        d = dpsi(w)
        if d == 0.0:
            break
        step = psi(w) / d
        w_new = w - step
        if not (lo < w_new < hi) or abs(psi(w_new)) >= abs(psi(w)):
            break
        w = w_new

    z = np.empty(hset.n)
    z[1:] = tail * ratio(w)
    z[0] = max(w, hset.height(z[1:]))
    res = hyperboloid_kkt_residual(x, z, hset)
    if res > tol:
        raise NumericalError(f"projection KKT residual {res:.3e} exceeds tol {tol:.1e} for x={x.tolist()}")
    return z


def constraint_slack(x, problem: ConicProblem) -> np.ndarray:
    """``A x - b`` for the problem's constraint."""
    return problem.constraint.slack(x)

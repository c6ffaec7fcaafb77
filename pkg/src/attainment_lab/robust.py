"""Ellipsoidal uncertainty, robust counterparts and the built-in instances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .conic import (
    AffineConicConstraint,
    ConicProblem,
    HyperboloidSet,
    SecondOrderCone,
    as_vec,
    hyperboloid_contains,
)
from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class EllipsoidalUncertainty:
    """``U = {a0 + P u : ||u|| <= rho}``."""

    a0: np.ndarray
    P: np.ndarray
    rho: float

    def __post_init__(self):
        a0 = as_vec(self.a0, "a0")
        P = np.array(self.P, dtype=float)
        if P.ndim == 1:
            P = P.reshape(-1, 1)
        if P.ndim != 2 or P.shape[0] != a0.size:
            raise DimensionError(f"P must have {a0.size} rows, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("P has non-finite entries")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValueError(f"rho must be positive, got {self.rho}")
        a0.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def dim(self) -> int:
        return self.a0.size

    @property
    def k(self) -> int:
        return self.P.shape[1]

    def sample(self, rng: np.random.Generator, size: int, boundary: bool = False) -> np.ndarray:
        """Draw `size` members of U (rows). ``boundary=True`` puts u on the sphere."""
        u = rng.standard_normal((size, self.k))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        if not boundary:
            u *= rng.random((size, 1)) ** (1.0 / self.k)
        return self.a0 + (self.rho * u) @ self.P.T


@dataclass(frozen=True)
class RobustConstraint:
    """``<a, x> <= rhs`` for every ``a`` in the uncertainty set."""

    uncertainty: EllipsoidalUncertainty
    rhs: float


def worst_case_value(rc: RobustConstraint, x) -> float:
    """``sup_{a in U} <a, x> = <a0, x> + rho ||P^T x||``."""
    x = as_vec(x, "x")
    U = rc.uncertainty
    if x.size != U.dim:
        raise DimensionError(f"x has dim {x.size}, uncertainty has dim {U.dim}")
    return float(U.a0 @ x) + U.rho * float(np.linalg.norm(U.P.T @ x))


def robust_to_soc(rc: RobustConstraint) -> AffineConicConstraint:
    """The SOC constraint ``(rhs - <a0, x>, rho P^T x)`` in ``Q^{k+1}`` (first-dominant)."""
    U = rc.uncertainty
    A = np.vstack([-U.a0[None, :], U.rho * U.P.T])
    b = np.zeros(U.k + 1)
    b[0] = -float(rc.rhs)
    return AffineConicConstraint(A, b, SecondOrderCone(U.k + 1, "first"))


def fix_last_variable(con: AffineConicConstraint, value: float = 1.0) -> AffineConicConstraint:
    """Substitute a constant for the last decision variable.

    Robust constraints with an uncertain right-hand side are written over
    ``z = (x, 1)``; this turns them back into a constraint on `x`.
    """
    A = np.array(con.A)
    return AffineConicConstraint(A[:, :-1], con.b - value * A[:, -1], con.cone)


@dataclass(frozen=True, eq=False)
class CanonicalInstance:
    """A built-in problem whose feasible set is a hyperboloid.

    `objective_offset` is added to reported objective values only.
    """

    problem: ConicProblem
    feasible_set: HyperboloidSet
    objective_offset: float = 0.0
    name: str = ""

    @property
    def n(self) -> int:
        return self.feasible_set.n

    @property
    def polyhedral(self) -> bool:
        # only {h1 >= |h2|} in R^2 is polyhedral within this family
        return self.feasible_set.n == 2 and self.feasible_set.rho == 0.0

    def reported_value(self, x) -> float:
        return self.problem.objective(x) + self.objective_offset


def canonical_constraint(n: int, rho: float = 1.0) -> AffineConicConstraint:
    """``A x - b = (rho, x_2, ..., x_n, x_1)`` in the last-dominant ``Q^{n+1}``."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    A = np.zeros((n + 1, n))
    for i in range(1, n):
        A[i, i] = 1.0
    A[n, 0] = 1.0
    b = np.zeros(n + 1)
    b[0] = -float(rho)
    return AffineConicConstraint(A, b, SecondOrderCone(n + 1, "last"))


def build_canonical(n: int = 2, objective=None, rho: float = 1.0, offset: float = 0.0) -> CanonicalInstance:
    """The family (P_n); ``n=2`` gives (P). Objective defaults to all-ones."""
    con = canonical_constraint(n, rho)
    c = np.ones(n) if objective is None else as_vec(objective, "objective")
    name = "P" if n == 2 else f"P{n}"
    return CanonicalInstance(ConicProblem(c, con), HyperboloidSet(n, rho), float(offset), name)


def is_canonical(instance: CanonicalInstance) -> bool:
    hs = instance.feasible_set
    return instance.problem.constraint.same_as(canonical_constraint(hs.n, hs.rho))


# -- the robust-LP narrative ------------------------------------------------


class Verdict(str, Enum):
    INFEASIBLE = "infeasible"
    SINGLETON = "singleton"
    CANONICAL = "canonical"
    OTHER = "other"


@dataclass(frozen=True, eq=False)
class StoryStep:
    label: str
    constraint: RobustConstraint
    soc: AffineConicConstraint
    verdict: Verdict
    expected: Verdict
    point: tuple[float, ...] | None = None
    instance: CanonicalInstance | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def matches(self) -> bool:
        return self.verdict == self.expected


def probe_constant_rhs(rc: RobustConstraint, n_fixed: int = 0, tol: float = 1e-12):
    """Decide feasibility when the nominal vector vanishes on the free variables.

    The constraint lives on ``z = (x, 1, ..., 1)`` with the last `n_fixed`
    coordinates pinned to one. With ``a0`` zero on `x`, the smallest
    attainable worst-case value is reached at the least-squares solution
    of ``P^T z = 0``; that point decides between empty, singleton and a
    larger set.

    Returns ``(verdict, minimizer)``.
    """
    U = rc.uncertainty
    m = U.dim - n_fixed
    if np.any(U.a0[:m] != 0.0):
        raise ValueError("probe requires a0 to vanish on the free variables")
    M = U.P.T[:, :m]
    q = U.P.T[:, m:] @ np.ones(n_fixed)
    x, *_ = np.linalg.lstsq(M, -q, rcond=None)
    z = np.concatenate([x, np.ones(n_fixed)])
    gap = worst_case_value(rc, z) - rc.rhs
    if gap > tol:
        return Verdict.INFEASIBLE, None
    if np.linalg.matrix_rank(M) == m and gap >= -tol:
        return Verdict.SINGLETON, tuple(float(v) for v in x)
    return Verdict.OTHER, tuple(float(v) for v in x)


def _predicate_grid(con: AffineConicConstraint, hset: HyperboloidSet, half_width=6.0, count=61) -> bool:
    """True when `con` and `hset` agree on a grid plus on sampled boundary points."""
    g = np.linspace(-half_width, half_width, count)
    pts = [(a, b) for a in g for b in g]
    for t in np.linspace(-half_width, half_width, 2 * count + 1):
        r = math.hypot(hset.rho, t)
        pts += [(r + 1e-7, t), (r - 1e-7, t)]
    return all(con.contains(p, tol=0.0) == hyperboloid_contains(p, hset) for p in pts)


def build_robust_story() -> list[StoryStep]:
    """Four robust constraints, from an infeasible counterpart to (P).

    (i)   ``<a, x> <= -1`` over the unit disk: empty.
    (ii)  ``<a, x> <= 0``: only the origin.
    (iii) ``<a, y> <= a_1`` on ``z = (y, 1)``: only ``y = (1, 0)``.
    (iv)  ``a_1 + a_2 x_2 <= x_1`` on ``z = (x, 1)``: the hyperboloid of (P),
          objective ``y_1 + y_2 = x_1 + x_2 + 1``.

    The rhs-with-slack reading ``<a, y> <= a_1 - 1`` is evaluated as well;
    its counterpart is empty and that result is attached to step (iv).
    """
    unit_disk = EllipsoidalUncertainty(np.zeros(2), np.eye(2), 1.0)
    steps: list[StoryStep] = []

    for label, rhs, expected in (("i", -1.0, Verdict.INFEASIBLE), ("ii", 0.0, Verdict.SINGLETON)):
        rc = RobustConstraint(unit_disk, rhs)
        verdict, point = probe_constant_rhs(rc)
        steps.append(StoryStep(label, rc, robust_to_soc(rc), verdict, expected, point))

    # a in the disk acts on (y1, y2, 1) through (a1, a2, -a1)
    shifted = EllipsoidalUncertainty(np.zeros(3), np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]), 1.0)
    rc3 = RobustConstraint(shifted, 0.0)
    verdict, point = probe_constant_rhs(rc3, n_fixed=1)
    steps.append(StoryStep("iii", rc3, fix_last_variable(robust_to_soc(rc3)), verdict, Verdict.SINGLETON, point))

    literal = RobustConstraint(
        EllipsoidalUncertainty(np.array([0.0, 0.0, 1.0]), shifted.P, 1.0), 0.0
    )
    literal_verdict, _ = probe_constant_rhs(literal, n_fixed=1)

    # a in the disk acts on (x1, x2, 1) through (-1, a2, a1)
    slack_rc = RobustConstraint(
        EllipsoidalUncertainty(np.array([-1.0, 0.0, 0.0]), np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]), 1.0),
        0.0,
    )
    soc4 = fix_last_variable(robust_to_soc(slack_rc))
    target = build_canonical(2, offset=1.0)
    verdict4 = Verdict.CANONICAL if _predicate_grid(soc4, target.feasible_set) else Verdict.OTHER
    notes = (
        f"reading <a, y> <= a_1 - 1 for all a in the disk gives worst case 1 + ||(y_1 - 1, y_2)|| "
        f"and verdict {literal_verdict.value}; the slack must enter as a_1 * 1 + a_2 x_2 <= x_1",
    )
    steps.append(
        StoryStep(
            "iv", slack_rc, soc4, verdict4, Verdict.CANONICAL,
            instance=target if verdict4 == Verdict.CANONICAL else None, notes=notes,
        )
    )
    return steps

"""Recession cones, copositivity certificates, duals and the attainment verdict."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from . import __version__
from .conic import (
    DIAGNOSIS_TOL,
    AffineConicConstraint,
    ConicProblem,
    SecondOrderCone,
    as_vec,
    soc_contains,
    soc_interior_contains,
    soc_margin,
)
from .errors import DimensionError, UnsupportedProblemError
from .robust import CanonicalInstance, canonical_constraint, is_canonical
from .solvers import RegularizationPath, default_schedule, regularization_path


def _tup(v) -> tuple[float, ...]:
    # +0.0 folds negative zeros so serialized reports are canonical
    return tuple(float(a) + 0.0 for a in np.asarray(v, dtype=float).reshape(-1))


# -- recession cone and copositivity ---------------------------------------


@dataclass(frozen=True, eq=False)
class RecessionCone:
    """Either ``{h : h_1 >= ||h_2..n||}`` (``generic is None``) or ``{h : A h in K}``."""

    n: int
    generic: AffineConicConstraint | None = None

    @property
    def embedded(self) -> bool:
        return self.generic is None

    def contains(self, h, tol: float = 0.0) -> bool:
        h = as_vec(h, "h")
        if h.size != self.n:
            raise DimensionError(f"h has dim {h.size}, cone lives in R^{self.n}")
        if self.generic is None:
            return soc_contains(h, SecondOrderCone(self.n, "first"), tol)
        return soc_contains(self.generic.A @ h, self.generic.cone, tol)


def recession_cone(instance: CanonicalInstance) -> RecessionCone:
    """Recession cone of a hyperboloid feasible set: the SOC in ``R^n``."""
    if not is_canonical(instance):
        raise UnsupportedProblemError("generic recession cones unsupported: instance is not canonical")
    return RecessionCone(instance.n)


def generic_recession_cone(problem: ConicProblem) -> RecessionCone:
    con = problem.constraint
    return RecessionCone(problem.n, AffineConicConstraint(con.A, np.zeros(con.A.shape[0]), con.cone))


@dataclass(frozen=True)
class CopositivityCertificate:
    min_value: float
    argmin_direction: tuple[float, ...]
    strict: bool
    copositive: bool
    tol: float


def copositivity_certificate(c, cone: RecessionCone, tol: float = DIAGNOSIS_TOL) -> CopositivityCertificate:
    """Exact minimum of ``<c, h>`` over unit vectors of an embedded SOC.

    Unit cone vectors are ``h = (cos a, sin a * w)`` with ``a in [0, pi/4]``
    and ``||w|| = 1``. The inner minimum over `w` is attained at
    ``w = -c_tail/||c_tail||``, leaving ``c_1 cos a - ||c_tail|| sin a``, a
    shifted cosine whose minimiser on the interval is
    ``clip(pi - atan2(||c_tail||, c_1), 0, pi/4)``.
    """
    if not cone.embedded:
        raise UnsupportedProblemError("copositivity is certified only for embedded second-order recession cones")
    c = as_vec(c, "c")
    if c.size != cone.n:
        raise DimensionError(f"c has dim {c.size}, cone lives in R^{cone.n}")
    c1, tail = float(c[0]), c[1:]
    s = float(np.linalg.norm(tail))
    alpha = min(max(math.pi - math.atan2(s, c1), 0.0), math.pi / 4)
    w = -tail / s if s > 0.0 else np.eye(tail.size)[0]
    h = np.concatenate([[math.cos(alpha)], math.sin(alpha) * w])
    h /= np.linalg.norm(h)
    value = float(c @ h) + 0.0
    return CopositivityCertificate(value, _tup(h), value > tol, value >= -tol, float(tol))


# -- Slater probe ----------------------------------------------------------


@dataclass(frozen=True)
class SlaterResult:
    holds: bool
    witness: tuple[float, ...] | None
    margin: float | None


def slater_probe(instance: CanonicalInstance, max_doublings: int = 60) -> SlaterResult:
    """Try ``x = (rho + t, 0, ..., 0)`` for ``t = 1, 2, 4, ...`` until the slack is interior."""
    con = instance.problem.constraint
    rho = instance.feasible_set.rho
    t = 1.0
    for _ in range(max_doublings):
        x = np.zeros(instance.n)
        x[0] = rho + t
        y = con.slack(x)
        if soc_interior_contains(y, con.cone, 0.0):
            return SlaterResult(True, _tup(x), soc_margin(y, con.cone))
        t *= 2.0
    return SlaterResult(False, None, None)


# -- duality ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualProblem:
    """``max <b, y>`` subject to ``A^T y = c`` and ``y`` in the (self-dual) cone."""

    objective: np.ndarray
    adjoint: np.ndarray
    rhs: np.ndarray
    cone: SecondOrderCone


def dual_build(problem: ConicProblem) -> DualProblem:
    con = problem.constraint
    return DualProblem(np.array(con.b), np.array(con.A.T), np.array(problem.c), con.cone)


@dataclass(frozen=True)
class DualSolution:
    """`status` is ``"unique"``, ``"interval"`` or ``"infeasible"``.

    For an interval, `y1_range` bounds the free coordinate, `point` is the
    maximiser and `value` the dual optimum.
    """

    status: str
    point: tuple[float, ...] | None = None
    value: float | None = None
    y1_range: tuple[float, float] | None = None


def dual_solve_canonical(dual: DualProblem, tol: float = 1e-12) -> DualSolution:
    """Solve the dual of a canonical instance in closed form.

    ``A^T y = c`` fixes ``y_{n+1} = c_1`` and ``y_i = c_i`` for ``2 <= i <= n``;
    only ``y_1`` is free and the cone asks ``c_1 >= sqrt(y_1^2 + sum c_i^2)``.
    """
    n = dual.adjoint.shape[0]
    unsupported = UnsupportedProblemError("dual is not the dual of a canonical instance")
    if n < 2 or dual.cone != SecondOrderCone(n + 1, "last"):
        raise unsupported
    if not np.array_equal(dual.adjoint, canonical_constraint(n).A.T):
        raise unsupported
    b = dual.objective
    rho = -float(b[0])
    if rho < 0 or np.any(b[1:] != 0.0):
        raise unsupported
    c = dual.rhs
    c1 = float(c[0])
    pinned = float(np.sum(c[1:] * c[1:]))
    disc = c1 * c1 - pinned
    if c1 < 0 or disc < -tol:
        return DualSolution("infeasible")
    if disc <= tol:
        y = np.concatenate([[0.0], c[1:], [c1]])
        return DualSolution("unique", _tup(y), float(b @ y) + 0.0, (0.0, 0.0))
    r = math.sqrt(disc)
    # <b, y> = -rho y_1, so the maximiser is y_1 = -r when rho > 0
    y = np.concatenate([[-r if rho > 0 else 0.0], c[1:], [c1]])
    return DualSolution("interval", _tup(y), float(b @ y) + 0.0, (-r, r))


# -- classification ---------------------------------------------------------


class Classification(str, Enum):
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    SOLVABLE_CERTAIN = "SolvableCertain"
    ATTAINMENT_SUSPECT = "AttainmentSuspect"


@dataclass(frozen=True)
class FeasibilityCheck:
    feasible: bool
    witness: tuple[float, ...] | None


@dataclass(frozen=True)
class RegularizationEvidence:
    ks: tuple[int, ...]
    values: tuple[float, ...]
    norms: tuple[float, ...]
    value_trend: str
    norm_trend: str
    norm_growth: float
    infimum_estimate: float
    strength: str


@dataclass(frozen=True)
class Discrepancy:
    topic: str
    claim: str
    computed: str


@dataclass(frozen=True)
class InstanceSummary:
    name: str
    n: int
    rho: float
    objective: tuple[float, ...]
    objective_offset: float
    polyhedral: bool


@dataclass(frozen=True)
class DiagnosisReport:
    instance: InstanceSummary
    feasibility: FeasibilityCheck
    slater: SlaterResult
    copositivity: CopositivityCertificate
    classification: Classification
    tol: float
    evidence: RegularizationEvidence | None = None
    dual: DualSolution | None = None
    non_attainment_identity: bool = False
    discrepancies: tuple[Discrepancy, ...] = ()
    config: dict[str, Any] | None = None
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["classification"] = self.classification.value
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DiagnosisReport":
        def opt(klass, v):
            return None if v is None else _build(klass, v)

        return cls(
            instance=_build(InstanceSummary, d["instance"]),
            feasibility=_build(FeasibilityCheck, d["feasibility"]),
            slater=_build(SlaterResult, d["slater"]),
            copositivity=_build(CopositivityCertificate, d["copositivity"]),
            classification=Classification(d["classification"]),
            tol=float(d["tol"]),
            evidence=opt(RegularizationEvidence, d.get("evidence")),
            dual=opt(DualSolution, d.get("dual")),
            non_attainment_identity=bool(d.get("non_attainment_identity", False)),
            discrepancies=tuple(_build(Discrepancy, x) for x in d.get("discrepancies", ())),
            config=d.get("config"),
            version=d.get("version", __version__),
        )


def _build(klass, d: dict[str, Any]):
    kwargs = {}
    for f in dataclasses.fields(klass):
        v = d[f.name]
        kwargs[f.name] = tuple(v) if isinstance(v, list) else v
    return klass(**kwargs)


def _trend(v: np.ndarray, rel: float = 1e-12) -> str:
    d = np.diff(v)
    band = rel * np.maximum(1.0, np.abs(v[1:]))
    if d.size == 0 or np.all(np.abs(d) <= band):
        return "constant"
    if np.all(d < 0):
        return "decreasing"
    if np.all(d > 0):
        return "increasing"
    if np.all(d <= band):
        return "non-increasing"
    if np.all(d >= -band):
        return "non-decreasing"
    return "mixed"


def regularization_evidence(path: RegularizationPath) -> RegularizationEvidence:
    """Summarise a path: falling values with diverging iterates is strong evidence of non-attainment."""
    values, norms = path.values, path.norms
    vt, nt = _trend(values), _trend(norms)
    growth = float(norms[-1] / norms[0]) if norms[0] > 0 else math.inf
    if vt == "decreasing" and nt in ("increasing", "non-decreasing") and growth >= 10.0:
        strength = "strong"
    elif vt in ("decreasing", "non-increasing") and nt != "constant":
        strength = "weak"
    else:
        strength = "none"
    return RegularizationEvidence(
        tuple(path.ks), _tup(values), _tup(norms), vt, nt, growth, float(values[-1]), strength
    )


def _discrepancies(instance: CanonicalInstance, cert: CopositivityCertificate, slater: SlaterResult, tol: float):
    hs = instance.feasible_set
    c = instance.problem.c
    notes = []
    if hs.n >= 3 and hs.rho == 1.0 and np.all(c == 1.0) and cert.min_value < -tol:
        h = ", ".join(f"{v:.6f}" for v in cert.argmin_direction)
        notes.append(
            Discrepancy(
                "copositivity-all-ones",
                f"the all-ones objective is copositive on the recession cone of P{hs.n} and its value 0 is not attained",
                f"min <c,h> over unit recession directions is {cert.min_value:.17g} at h = ({h}); "
                f"the objective decreases without bound along that ray",
            )
        )
    if hs.n == 2 and hs.rho == 1.0 and slater.holds:
        w = ", ".join(f"{v:g}" for v in slater.witness)
        slack = instance.problem.constraint.slack(slater.witness)
        notes.append(
            Discrepancy(
                "slater",
                "no x has A x - b in the interior of the cone, i.e. no x with x1 > sqrt(1 + x2^2)",
                f"x = ({w}) gives A x - b = ({', '.join(f'{v:g}' for v in slack)}) with interior margin {slater.margin:g}",
            )
        )
    return tuple(notes)


def classify(
    instance: CanonicalInstance,
    reg_evidence: RegularizationEvidence | None = None,
    tol: float = DIAGNOSIS_TOL,
    config: dict[str, Any] | None = None,
    schedule=None,
) -> DiagnosisReport:
    """Run every check on a canonical instance and fill in the decision table.

    ======================================  =================
    condition                               classification
    ======================================  =================
    no feasible point                       Infeasible
    certificate min < -tol                  Unbounded
    certificate min > tol                   SolvableCertain
    \\|min\\| <= tol, polyhedral set          SolvableCertain
    \\|min\\| <= tol, non-polyhedral set      AttainmentSuspect
    ======================================  =================

    AttainmentSuspect reports carry regularization-path evidence, computed on
    `schedule` (default ``k = 1, 2, 4, ..., 2**20``) unless supplied.
    """
    hs = instance.feasible_set
    con = instance.problem.constraint
    x0 = np.zeros(hs.n)
    x0[0] = hs.rho
    feasible = con.contains(x0, tol)
    feas = FeasibilityCheck(feasible, _tup(x0) if feasible else None)

    cert = copositivity_certificate(instance.problem.c, recession_cone(instance), tol)
    slater = slater_probe(instance)
    dual = dual_solve_canonical(dual_build(instance.problem))

    if not feasible:
        cls = Classification.INFEASIBLE
    elif cert.min_value < -tol:
        cls = Classification.UNBOUNDED
    elif cert.min_value > tol or instance.polyhedral:
        cls = Classification.SOLVABLE_CERTAIN
    else:
        cls = Classification.ATTAINMENT_SUSPECT

    evidence = reg_evidence
    if evidence is None and cls == Classification.ATTAINMENT_SUSPECT and instance.problem.c[0] > 0:
        evidence = regularization_evidence(
            regularization_path(instance, default_schedule() if schedule is None else schedule)
        )

    # f >= c1 r - s ||x_tail|| > (c1 - s) ||x_tail|| = 0 when c1 = s and rho > 0,
    # while (sqrt(rho^2 + k^2), -k c_tail/s) drives f to 0
    c = instance.problem.c
    identity = bool(
        cls == Classification.ATTAINMENT_SUSPECT and hs.rho > 0 and c[0] > 0 and c[0] == math.sqrt(float(np.sum(c[1:] * c[1:])))
    )

    summary = InstanceSummary(
        instance.name, hs.n, hs.rho, _tup(c), float(instance.objective_offset), instance.polyhedral
    )
    return DiagnosisReport(
        instance=summary,
        feasibility=feas,
        slater=slater,
        copositivity=cert,
        classification=cls,
        tol=float(tol),
        evidence=evidence,
        dual=dual,
        non_attainment_identity=identity,
        discrepancies=_discrepancies(instance, cert, slater, tol),
        config=config,
    )

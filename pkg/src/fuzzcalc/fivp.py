"""Fuzzy growth/decay initial-value problem ``dy/dt = k * y, y(0) = c``.

With fuzzy ``k`` and ``c`` the problem becomes, per alpha level, the crisp
system

    y1' = min(k1*y1, k1*y2, k2*y1, k2*y2)
    y2' = max(k1*y1, k1*y2, k2*y1, k2*y2)
    y1(0) = c1, y2(0) = c2

Closed forms exist when ``k`` is entirely non-negative (growth) or entirely
negative (decay). For decay two coefficient sets are provided: the one
printed in the source analysis (``DecayVariant.PAPER``) and one rederived by
substituting back into the linear system (``DecayVariant.REDERIVED``). They
disagree; :func:`residual_check` tells which one actually solves the system.
A classic RK4 integrator of the min/max system serves as independent oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CaseError,
    DivergenceError,
    DomainError,
    FuzzError,
    GridMismatchError,
    PreconditionError,
    SingularityError,
)
from .fuzzy import (
    DEFAULT_TOL,
    AlphaGrid,
    FuzzyNumber,
    TriangularParams,
    from_triangular,
)
from .seikkala import LevelFunctionField, SeikkalaReport, seikkala_verdict, time_derivative

DECAY_EPS = 1e-12
DEFAULT_T = 2.0
DEFAULT_T_STEP = 1e-3
MAX_CHECK_POINTS = 201


class CaseTag(str, enum.Enum):
    GROWTH = "growth"
    DECAY = "decay"
    MIXED = "mixed"


class DecayVariant(str, enum.Enum):
    PAPER = "paper"
    REDERIVED = "rederived"


@dataclass(frozen=True)
class FivpModel:
    k: FuzzyNumber
    c: FuzzyNumber
    T: float = DEFAULT_T
    t_step: float = DEFAULT_T_STEP

    def __post_init__(self):
        if self.k.grid != self.c.grid:
            raise GridMismatchError("k and c must share one alpha grid")
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"T must be positive, got {self.T!r}")
        if not (math.isfinite(self.t_step) and 0 < self.t_step <= self.T):
            raise DomainError(f"t_step must lie in (0, T], got {self.t_step!r}")

    @classmethod
    def triangular(cls, k, c, T=DEFAULT_T, t_step=DEFAULT_T_STEP, alpha_n=100):
        """Build a model from triangular triples or crisp reals."""
        grid = AlphaGrid.uniform(alpha_n)
        return cls(_as_fuzzy(k, grid), _as_fuzzy(c, grid), float(T), float(t_step))

    @property
    def grid(self) -> AlphaGrid:
        return self.k.grid

    def time_nodes(self) -> np.ndarray:
        """Integration nodes: equal steps no longer than ``t_step``, ending at T."""
        n = max(1, math.ceil(self.T / self.t_step - 1e-9))
        return np.linspace(0.0, self.T, n + 1)

    def check_times(self, max_points: int = MAX_CHECK_POINTS) -> np.ndarray:
        """Subset of the integration nodes used for verdicts and output."""
        nodes = self.time_nodes()
        stride = max(1, math.ceil((nodes.size - 1) / (max_points - 1)))
        picked = nodes[::stride]
        if picked[-1] != nodes[-1]:
            picked = np.append(picked, nodes[-1])
        return picked


def _as_fuzzy(value, grid: AlphaGrid) -> FuzzyNumber:
    if isinstance(value, FuzzyNumber):
        return value
    if isinstance(value, TriangularParams):
        return from_triangular(value, grid)
    if np.ndim(value) == 0:
        return FuzzyNumber.crisp(float(value), grid)
    return from_triangular(TriangularParams(*map(float, value)), grid)


def classify_case(k: FuzzyNumber, eps: float = DECAY_EPS) -> CaseTag:
    if np.all(k.lower >= 0.0):
        return CaseTag.GROWTH
    if np.all(k.upper <= -eps):
        return CaseTag.DECAY
    return CaseTag.MIXED


def _require_nonnegative(c: FuzzyNumber):
    if np.any(c.lower < 0.0):
        raise PreconditionError("closed forms assume a non-negative initial value c")


def _levels(m: FivpModel, alpha):
    k, c = m.k, m.c
    return (k.lower_at(alpha), k.upper_at(alpha), c.lower_at(alpha), c.upper_at(alpha))


def _slopes(m: FivpModel, alpha):
    k, c = m.k, m.c
    return (k.lower_slope_at(alpha), k.upper_slope_at(alpha),
            c.lower_slope_at(alpha), c.upper_slope_at(alpha))


# --------------------------------------------------------------------------
# growth: k >= 0


def solve_growth_closed(m: FivpModel) -> LevelFunctionField:
    """``y1 = c1 exp(k1 t)``, ``y2 = c2 exp(k2 t)`` level by level."""
    case = classify_case(m.k)
    if case is not CaseTag.GROWTH:
        raise CaseError(f"growth closed form needs k >= 0, model is {case.value}")
    _require_nonnegative(m.c)

    def y1(t, a):
        k1, _, c1, _ = _levels(m, a)
        return c1 * np.exp(k1 * t)

    def y2(t, a):
        _, k2, _, c2 = _levels(m, a)
        return c2 * np.exp(k2 * t)

    def d1(t, a):
        k1, _, c1, _ = _levels(m, a)
        return c1 * k1 * np.exp(k1 * t)

    def d2(t, a):
        _, k2, _, c2 = _levels(m, a)
        return c2 * k2 * np.exp(k2 * t)

    def da1(t, a):
        k1, _, c1, _ = _levels(m, a)
        dk1, _, dc1, _ = _slopes(m, a)
        return (dc1 + c1 * t * dk1) * np.exp(k1 * t)

    def da2(t, a):
        _, k2, _, c2 = _levels(m, a)
        _, dk2, _, dc2 = _slopes(m, a)
        return (dc2 + c2 * t * dk2) * np.exp(k2 * t)

    return LevelFunctionField.closed_form(y1, y2, m.T, d1, d2, da1, da2, label="growth")


# --------------------------------------------------------------------------
# decay: k < 0


@dataclass(frozen=True)
class DecayCoefficients:
    """Per-level coefficients of the decay solution

        y1 = A11 exp(p t) + A12 exp(-p t)
        y2 = A21 exp(p t) - A22 exp(-p t)

    For ``REDERIVED`` the pair (A11, A12) is (B11, B12) and
    (A21, A22) = (p / k1) * (B11, B12).
    """

    p: np.ndarray
    q: np.ndarray
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray


def _decay_terms(k1, k2, c1, c2, dk1, dk2, dc1, dc2, variant):
    """Coefficients together with their alpha derivatives."""
    p = np.sqrt(k1 * k2)
    q = np.sqrt(k1 / k2)
    dp = (dk1 * k2 + k1 * dk2) / (2 * p)
    dq = (dk1 * k2 - k1 * dk2) / (2 * q * k2 * k2)
    if variant is DecayVariant.PAPER:
        A11 = 0.5 * (c1 + q * c2)
        A12 = 0.5 * (c1 - q * c2)
        A21 = 0.5 * (c1 / q + c2)
        A22 = 0.5 * (c1 / q - c2)
        dA11 = 0.5 * (dc1 + dq * c2 + q * dc2)
        dA12 = 0.5 * (dc1 - dq * c2 - q * dc2)
        dA21 = 0.5 * (dc1 / q - c1 * dq / (q * q) + dc2)
        dA22 = 0.5 * (dc1 / q - c1 * dq / (q * q) - dc2)
    else:
        r = k1 / p
        dr = (dk1 * p - k1 * dp) / (p * p)
        A11 = 0.5 * (c1 + r * c2)
        A12 = 0.5 * (c1 - r * c2)
        dA11 = 0.5 * (dc1 + dr * c2 + r * dc2)
        dA12 = 0.5 * (dc1 - dr * c2 - r * dc2)
        A21 = A11 / r
        A22 = A12 / r
        dA21 = (dA11 * r - A11 * dr) / (r * r)
        dA22 = (dA12 * r - A12 * dr) / (r * r)
    coef = DecayCoefficients(p, q, A11, A12, A21, A22)
    return coef, (dp, dA11, dA12, dA21, dA22)


def _check_decay_levels(k1, k2, c1, c2, eps):
    if np.any(np.abs(k2) < eps):
        raise SingularityError("k2 vanishes; q = sqrt(k1/k2) is undefined")
    if np.any(k1 > -eps) or np.any(k2 > -eps):
        raise CaseError("decay coefficients need k1, k2 < 0")
    if np.any(c1 < 0) or np.any(c2 < 0):
        raise PreconditionError("decay closed form assumes a non-negative initial value c")


def decay_coefficients(k: FuzzyNumber, c: FuzzyNumber, alpha, variant=DecayVariant.PAPER,
                       eps: float = DECAY_EPS) -> DecayCoefficients:
    variant = DecayVariant(variant)
    if not (0.0 <= np.min(alpha) and np.max(alpha) <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    k1, k2, c1, c2 = k.lower_at(alpha), k.upper_at(alpha), c.lower_at(alpha), c.upper_at(alpha)
    _check_decay_levels(k1, k2, c1, c2, eps)
    zeros = np.zeros_like(k1)
    coef, _ = _decay_terms(k1, k2, c1, c2, zeros, zeros, zeros, zeros, variant)
    return coef


def solve_decay_closed(m: FivpModel, variant=DecayVariant.PAPER,
                       eps: float = DECAY_EPS) -> LevelFunctionField:
    variant = DecayVariant(variant)
    case = classify_case(m.k, eps)
    if case is not CaseTag.DECAY:
        raise CaseError(f"decay closed form needs k < 0, model is {case.value}")
    _check_decay_levels(m.k.lower, m.k.upper, m.c.lower, m.c.upper, eps)

    def terms(a):
        return _decay_terms(*_levels(m, a), *_slopes(m, a), variant)

    def y1(t, a):
        C, _ = terms(a)
        return C.A11 * np.exp(C.p * t) + C.A12 * np.exp(-C.p * t)

    def y2(t, a):
        C, _ = terms(a)
        return C.A21 * np.exp(C.p * t) - C.A22 * np.exp(-C.p * t)

    def d1(t, a):
        C, _ = terms(a)
        return C.A11 * C.p * np.exp(C.p * t) - C.A12 * C.p * np.exp(-C.p * t)

    def d2(t, a):
        C, _ = terms(a)
        return C.A21 * C.p * np.exp(C.p * t) + C.A22 * C.p * np.exp(-C.p * t)

    def da1(t, a):
        C, (dp, dA11, dA12, _, _) = terms(a)
        up, dn = np.exp(C.p * t), np.exp(-C.p * t)
        return dA11 * up + C.A11 * t * dp * up + dA12 * dn - C.A12 * t * dp * dn

    def da2(t, a):
        C, (dp, _, _, dA21, dA22) = terms(a)
        up, dn = np.exp(C.p * t), np.exp(-C.p * t)
        return dA21 * up + C.A21 * t * dp * up - dA22 * dn + C.A22 * t * dp * dn

    return LevelFunctionField.closed_form(y1, y2, m.T, d1, d2, da1, da2, label=variant.value)


# --------------------------------------------------------------------------
# numeric oracle


def _minmax_rhs(k1, k2, y1, y2):
    prods = (k1 * y1, k1 * y2, k2 * y1, k2 * y2)
    return np.minimum.reduce(prods), np.maximum.reduce(prods)


def integrate_parametric(m: FivpModel) -> LevelFunctionField:
    """Classic RK4 on the min/max system, all alpha levels side by side.

    Levels never interact; stacking them is only vectorization. The result
    records, per level, the first node where y1 or y2 turned negative
    (``positivity_onset``; NaN if never).
    """
    t = m.time_nodes()
    k1, k2 = m.k.lower, m.k.upper
    y1 = np.empty((t.size, len(m.grid)))
    y2 = np.empty_like(y1)
    y1[0], y2[0] = m.c.lower, m.c.upper
    for n in range(t.size - 1):
        h = t[n + 1] - t[n]
        a1, a2 = y1[n], y2[n]
        p1, p2 = _minmax_rhs(k1, k2, a1, a2)
        q1, q2 = _minmax_rhs(k1, k2, a1 + 0.5 * h * p1, a2 + 0.5 * h * p2)
        r1, r2 = _minmax_rhs(k1, k2, a1 + 0.5 * h * q1, a2 + 0.5 * h * q2)
        s1, s2 = _minmax_rhs(k1, k2, a1 + h * r1, a2 + h * r2)
        y1[n + 1] = a1 + h / 6 * (p1 + 2 * q1 + 2 * r1 + s1)
        y2[n + 1] = a2 + h / 6 * (p2 + 2 * q2 + 2 * r2 + s2)
        if not (np.all(np.isfinite(y1[n + 1])) and np.all(np.isfinite(y2[n + 1]))):
            raise DivergenceError(f"integration diverged after t = {t[n]:g}", last_t=float(t[n]))
    d1, d2 = _minmax_rhs(k1, k2, y1, y2)
    negative = (y1 < 0) | (y2 < 0)
    onset = np.where(negative.any(axis=0), t[np.argmax(negative, axis=0)], np.nan)
    return LevelFunctionField.sampled(t, m.grid, y1, y2, d1, d2, label="oracle",
                                      positivity_onset=onset)


# --------------------------------------------------------------------------
# residuals


@dataclass(frozen=True)
class ResidualReport:
    """Largest defect of each equation of the min/max system.

    ``where_1``/``where_2`` are the ``(t, alpha)`` at which each maximum occurs.
    """

    max_abs_residual_1: float
    max_abs_residual_2: float
    where_1: tuple[float, float]
    where_2: tuple[float, float]

    @property
    def max_abs_residual(self) -> float:
        return max(self.max_abs_residual_1, self.max_abs_residual_2)


def residual_check(f: LevelFunctionField, m: FivpModel, tgrid, grid: AlphaGrid | None = None
                   ) -> ResidualReport:
    grid = grid if grid is not None else m.grid
    tgrid = np.atleast_1d(np.asarray(tgrid, dtype=float))
    T = tgrid[:, None]
    A = grid.levels[None, :]
    y1, y2 = f.values(T, A)
    d1, d2 = time_derivative(f, T, A)
    f1, f2 = _minmax_rhs(m.k.lower_at(A), m.k.upper_at(A), y1, y2)
    shape = (tgrid.size, len(grid))
    e1 = np.broadcast_to(np.abs(d1 - f1), shape)
    e2 = np.broadcast_to(np.abs(d2 - f2), shape)
    i1 = np.unravel_index(np.argmax(e1), shape)
    i2 = np.unravel_index(np.argmax(e2), shape)
    return ResidualReport(
        float(e1[i1]), float(e2[i2]),
        (float(tgrid[i1[0]]), float(grid.levels[i1[1]])),
        (float(tgrid[i2[0]]), float(grid.levels[i2[1]])),
    )


# --------------------------------------------------------------------------
# whole analysis


@dataclass(frozen=True)
class FieldAnalysis:
    """Everything computed for one candidate solution.

    ``positivity_end`` is the first checked time at which some level went
    negative (None if never); verdicts and residuals only cover the checked
    times before it.
    """

    name: str
    field: LevelFunctionField
    verdict: SeikkalaReport
    residual: ResidualReport | None
    oracle_deviation: float | None
    positivity_end: float | None

    @property
    def differentiable(self) -> bool:
        return self.verdict.differentiable


@dataclass(frozen=True)
class AnalysisReport:
    model: FivpModel
    case: CaseTag
    tgrid: np.ndarray
    fields: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    warnings: tuple = ()

    @property
    def differentiable(self) -> bool:
        """True when every computed solution passed the Seikkala test."""
        return bool(self.fields) and all(fa.differentiable for fa in self.fields.values())

    @property
    def max_oracle_deviation(self) -> float | None:
        devs = [fa.oracle_deviation for fa in self.fields.values() if fa.oracle_deviation is not None]
        return max(devs) if devs else None


def _positivity_end(f: LevelFunctionField, tgrid, grid):
    y1, y2 = f.values(tgrid[:, None], grid.levels[None, :])
    bad = np.broadcast_to((y1 < 0) | (y2 < 0), (tgrid.size, len(grid))).any(axis=1)
    return float(tgrid[np.argmax(bad)]) if bad.any() else None


def oracle_deviation(closed: LevelFunctionField, oracle: LevelFunctionField) -> float | None:
    """Max relative gap between a closed form and the oracle where y1, y2 > 0."""
    s = oracle.samples
    T, A = s.t[:, None], s.grid.levels[None, :]
    c1, c2 = (np.broadcast_to(v, s.y1.shape) for v in closed.values(T, A))
    mask = (c1 > 0) & (c2 > 0)
    if not mask.any():
        return None
    rel = np.maximum(np.abs(s.y1 - c1) / np.where(mask, c1, 1.0),
                     np.abs(s.y2 - c2) / np.where(mask, c2, 1.0))
    return float(rel[mask].max())


def analyze(m: FivpModel, variants=(DecayVariant.PAPER, DecayVariant.REDERIVED),
            tol: float = DEFAULT_TOL, max_points: int = MAX_CHECK_POINTS) -> AnalysisReport:
    """Classify, solve in closed form where possible, integrate, and judge.

    Sub-operation failures are recorded under ``errors`` keyed by field name
    instead of aborting the analysis.
    """
    case = classify_case(m.k)
    tgrid = m.check_times(max_points)
    errors, warnings = {}, []

    closed = {}
    if case is CaseTag.GROWTH:
        try:
            closed["growth"] = solve_growth_closed(m)
        except FuzzError as exc:
            errors["growth"] = exc
    elif case is CaseTag.DECAY:
        for v in variants:
            v = DecayVariant(v)
            try:
                closed[v.value] = solve_decay_closed(m, v)
            except FuzzError as exc:
                errors[v.value] = exc
    else:
        warnings.append("k changes sign across levels: no closed form, oracle only")

    oracle = None
    try:
        oracle = integrate_parametric(m)
    except FuzzError as exc:
        errors["oracle"] = exc

    fields = {}
    candidates = list(closed.items()) + ([("oracle", oracle)] if oracle is not None else [])
    for name, f in candidates:
        try:
            end = _positivity_end(f, tgrid, m.grid)
            checked = tgrid if end is None else tgrid[tgrid < end]
            if checked.size == 0:
                checked = tgrid
                warnings.append(f"{name}: negative at t = 0, checked on the full time grid")
            elif end is not None:
                warnings.append(f"{name}: positivity lost at t = {end:g}, checked on t < {end:g}")
            values = f.values(tgrid[:, None], m.grid.levels[None, :])
            if not all(np.all(np.isfinite(v)) for v in values):
                raise DivergenceError(f"{name}: non-finite values on [0, {m.T:g}]")
            verdict = seikkala_verdict(f, checked, m.grid, tol)
            residual = residual_check(f, m, checked) if f.kind == "closed-form" else None
            dev = oracle_deviation(f, oracle) if (oracle is not None and f is not oracle) else None
            fields[name] = FieldAnalysis(name, f, verdict, residual, dev, end)
        except FuzzError as exc:
            errors[name] = exc

    return AnalysisReport(m, case, tgrid, fields, errors, tuple(warnings))

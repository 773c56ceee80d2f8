"""Fuzzy-valued functions of time and the Seikkala derivative test.

A fuzzy-valued function ``y(t)`` is handled through its level functions
``y1(t, alpha)`` and ``y2(t, alpha)``. Its Seikkala derivative exists at
``t`` when ``[y1'(t, alpha), y2'(t, alpha)]`` (time derivatives) are again
the alpha-cuts of a fuzzy number. We test the sufficient conditions on a
finite alpha grid: y1' non-decreasing in alpha, y2' non-increasing, and
y1' <= y2'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, StructureError
from .fuzzy import DEFAULT_TOL, AlphaGrid, FuzzyNumber, ValidityReport, validate_fuzzy

LevelFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

CONDITIONS = ("dα-y1", "dα-y2", "order", "dα-y1'", "dα-y2'", "order'")
VALUE_CONDITIONS = CONDITIONS[:3]
DERIVATIVE_CONDITIONS = CONDITIONS[3:]


@dataclass(frozen=True)
class SampledLevels:
    """Level functions tabulated on a (t, alpha) lattice.

    ``y1``/``y2`` have shape ``(len(t), len(grid))``; ``d1``/``d2`` hold the
    time derivatives at the same nodes.
    """

    t: np.ndarray
    grid: AlphaGrid
    y1: np.ndarray
    y2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


@dataclass(frozen=True)
class LevelFunctionField:
    """A fuzzy-valued function on ``[0, t_max]`` given by its level functions.

    All callables take broadcastable arrays ``(t, alpha)``. ``dy*_dt`` are
    analytic time derivatives and ``dy*_da`` analytic alpha partials; either
    may be ``None``, in which case finite differences are used.
    """

    kind: str  # "closed-form" or "sampled"
    y1: LevelFn
    y2: LevelFn
    t_max: float
    dy1_dt: LevelFn | None = None
    dy2_dt: LevelFn | None = None
    dy1_da: LevelFn | None = None
    dy2_da: LevelFn | None = None
    label: str = ""
    samples: SampledLevels | None = field(default=None, repr=False)
    positivity_onset: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def closed_form(cls, y1, y2, t_max, dy1_dt=None, dy2_dt=None,
                    dy1_da=None, dy2_da=None, label=""):
        return cls("closed-form", y1, y2, float(t_max), dy1_dt, dy2_dt, dy1_da, dy2_da, label)

    @classmethod
    def sampled(cls, t, grid: AlphaGrid, y1, y2, d1=None, d2=None, label="",
                positivity_onset=None):
        """Field interpolated from tabulated values.

        Cubic Hermite in t (using the supplied derivatives, or second-order
        finite differences when absent) and linear in alpha.
        """
        t = np.asarray(t, dtype=float)
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        shape = (t.size, len(grid))
        if t.ndim != 1 or t.size < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise StructureError("time nodes must start at 0 and increase strictly")
        if y1.shape != shape or y2.shape != shape:
            raise StructureError(f"sampled levels must have shape {shape}")
        edge = 2 if t.size > 2 else 1
        d1 = np.gradient(y1, t, axis=0, edge_order=edge) if d1 is None else np.asarray(d1, float)
        d2 = np.gradient(y2, t, axis=0, edge_order=edge) if d2 is None else np.asarray(d2, float)
        if d1.shape != shape or d2.shape != shape:
            raise StructureError(f"sampled derivatives must have shape {shape}")
        s = SampledLevels(t, grid, y1, y2, d1, d2)
        return cls(
            "sampled",
            lambda tt, aa: _interp(s, s.y1, s.d1, tt, aa),
            lambda tt, aa: _interp(s, s.y2, s.d2, tt, aa),
            float(t[-1]),
            lambda tt, aa: _interp_derivative(s, s.y1, s.d1, tt, aa),
            lambda tt, aa: _interp_derivative(s, s.y2, s.d2, tt, aa),
            label=label,
            samples=s,
            positivity_onset=positivity_onset,
        )

    def check_t(self, t):
        tt = np.asarray(t, dtype=float)
        span = 1e-12 * max(1.0, self.t_max)
        if np.any(~np.isfinite(tt)) or np.any(tt < -span) or np.any(tt > self.t_max + span):
            raise DomainError(f"t must lie in [0, {self.t_max}], got {t!r}")

    def values(self, t, alpha):
        """``(y1, y2)`` broadcast over ``t`` and ``alpha``."""
        self.check_t(t)
        _check_alpha(alpha)
        return self.y1(t, alpha), self.y2(t, alpha)

    def dalpha(self, t, alpha, h: float = 0.01):
        """Alpha partials: analytic when the field carries them, else FD."""
        if self.dy1_da is not None and self.dy2_da is not None:
            self.check_t(t)
            _check_alpha(alpha)
            return self.dy1_da(t, alpha), self.dy2_da(t, alpha)
        return partial_alpha(self, t, alpha, h)


# --------------------------------------------------------------------------
# interpolation of sampled fields


def _locate(s: SampledLevels, t, alpha):
    t, alpha = np.broadcast_arrays(np.asarray(t, float), np.asarray(alpha, float))
    shape = t.shape
    t, alpha = t.ravel(), alpha.ravel()
    i = np.clip(np.searchsorted(s.t, t, side="right") - 1, 0, s.t.size - 2)
    h = s.t[i + 1] - s.t[i]
    u = np.clip((t - s.t[i]) / h, 0.0, 1.0)
    lv = s.grid.levels
    j = np.clip(np.searchsorted(lv, alpha, side="right") - 1, 0, lv.size - 2)
    w = np.clip((alpha - lv[j]) / (lv[j + 1] - lv[j]), 0.0, 1.0)
    return shape, i, h, u, j, w


def _hermite(vals, ders, i, j, h, u):
    h00 = (1 + 2 * u) * (1 - u) ** 2
    h10 = u * (1 - u) ** 2
    h01 = u * u * (3 - 2 * u)
    h11 = u * u * (u - 1)
    return h00 * vals[i, j] + h10 * h * ders[i, j] + h01 * vals[i + 1, j] + h11 * h * ders[i + 1, j]


def _hermite_slope(vals, ders, i, j, h, u):
    g00 = 6 * u * (u - 1) / h
    g10 = (1 - u) * (1 - 3 * u)
    g01 = -g00
    g11 = u * (3 * u - 2)
    return g00 * vals[i, j] + g10 * ders[i, j] + g01 * vals[i + 1, j] + g11 * ders[i + 1, j]


def _interp(s, vals, ders, t, alpha):
    shape, i, h, u, j, w = _locate(s, t, alpha)
    lo = _hermite(vals, ders, i, j, h, u)
    hi = _hermite(vals, ders, i, j + 1, h, u)
    # exact node values where the query sits on a node
    out = np.where(w == 0.0, lo, np.where(w == 1.0, hi, (1 - w) * lo + w * hi))
    return out.reshape(shape)


def _interp_derivative(s, vals, ders, t, alpha):
    shape, i, h, u, j, w = _locate(s, t, alpha)
    lo = _hermite_slope(vals, ders, i, j, h, u)
    hi = _hermite_slope(vals, ders, i, j + 1, h, u)
    out = np.where(w == 0.0, lo, np.where(w == 1.0, hi, (1 - w) * lo + w * hi))
    return out.reshape(shape)


def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a < 0.0) or np.any(a > 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")


# --------------------------------------------------------------------------
# derivatives


def partial_alpha(f: LevelFunctionField, t, alpha, h: float = 0.01):
    """Finite-difference ``(dy1/dalpha, dy2/dalpha)`` at ``(t, alpha)``.

    Central differences in the interior; second-order one-sided stencils
    where ``alpha -+ h`` would leave [0, 1].
    """
    if not h > 0 or 2 * h > 1:
        raise DomainError(f"step h must satisfy 0 < h <= 0.5, got {h!r}")
    f.check_t(t)
    _check_alpha(alpha)
    t, alpha = np.broadcast_arrays(np.asarray(t, float), np.asarray(alpha, float))
    fwd = alpha - h < 0.0
    bwd = ~fwd & (alpha + h > 1.0)

    def stencil(fn):
        central = (fn(t, np.minimum(alpha + h, 1.0)) - fn(t, np.maximum(alpha - h, 0.0))) / (2 * h)
        a_f = np.minimum(alpha, 1.0 - 2 * h)
        forward = (-3 * fn(t, a_f) + 4 * fn(t, a_f + h) - fn(t, a_f + 2 * h)) / (2 * h)
        a_b = np.maximum(alpha, 2 * h)
        backward = (3 * fn(t, a_b) - 4 * fn(t, a_b - h) + fn(t, a_b - 2 * h)) / (2 * h)
        return np.where(fwd, forward, np.where(bwd, backward, central))

    return stencil(f.y1), stencil(f.y2)


def time_derivative(f: LevelFunctionField, t, alpha):
    """``(y1', y2')`` at ``(t, alpha)``; analytic if available, else FD in t."""
    f.check_t(t)
    _check_alpha(alpha)
    if f.dy1_dt is not None and f.dy2_dt is not None:
        return f.dy1_dt(t, alpha), f.dy2_dt(t, alpha)
    h = 1e-5 * max(1.0, f.t_max)
    t, alpha = np.broadcast_arrays(np.asarray(t, float), np.asarray(alpha, float))
    lo = np.maximum(t - h, 0.0)
    hi = np.minimum(t + h, f.t_max)
    return (
        (f.y1(hi, alpha) - f.y1(lo, alpha)) / (hi - lo),
        (f.y2(hi, alpha) - f.y2(lo, alpha)) / (hi - lo),
    )


# --------------------------------------------------------------------------
# validity and verdict


def check_level_validity(f: LevelFunctionField, t: float, grid: AlphaGrid,
                         tol: float = DEFAULT_TOL) -> ValidityReport:
    """Envelope conditions for the level sets of ``y(t)`` at a fixed time."""
    y1, y2 = f.values(t, grid.levels)
    return validate_fuzzy(FuzzyNumber(grid, np.broadcast_to(y1, grid.levels.shape),
                                      np.broadcast_to(y2, grid.levels.shape)), tol)


class Witness(NamedTuple):
    """A failed check at time ``t`` between levels ``alpha_lo`` and ``alpha_hi``.

    ``magnitude`` is signed: the alpha slope for monotonicity conditions
    (negative for y1-type, positive for y2-type failures) and ``y2 - y1``
    (negative) for order conditions, where ``alpha_lo == alpha_hi``.
    """

    t: float
    alpha_lo: float
    alpha_hi: float
    condition: str
    magnitude: float


@dataclass(frozen=True)
class SeikkalaReport:
    value_valid: bool
    derivative_valid: bool
    witnesses: tuple[Witness, ...]
    # per monotonicity condition, how many adjacent-level steps were flat
    # (|difference| <= tol): allowed, but not strictly monotone
    flat_steps: dict = field(default_factory=dict)
    tgrid: tuple = ()

    @property
    def differentiable(self) -> bool:
        return self.value_valid and self.derivative_valid

    def failed_conditions(self) -> list[str]:
        seen = {w.condition for w in self.witnesses}
        return [c for c in CONDITIONS if c in seen]

    def worst(self, condition: str) -> Witness | None:
        """Witness with the largest violation for ``condition``."""
        ws = [w for w in self.witnesses if w.condition == condition]
        if not ws:
            return None
        return max(ws, key=lambda w: abs(w.magnitude))


def seikkala_verdict(f: LevelFunctionField, tgrid, grid: AlphaGrid,
                     tol: float = DEFAULT_TOL) -> SeikkalaReport:
    """Decide Seikkala differentiability of ``f`` on ``tgrid`` x ``grid``.

    Monotonicity in alpha is checked non-strictly between adjacent grid
    levels (differences must not go past ``tol`` the wrong way). Every
    failing (t, alpha) is reported.
    """
    tgrid = np.atleast_1d(np.asarray(tgrid, dtype=float))
    if tgrid.size == 0:
        raise DomainError("empty time grid")
    f.check_t(tgrid)
    T = tgrid[:, None]
    A = grid.levels[None, :]
    Y1, Y2 = (np.broadcast_to(v, (tgrid.size, len(grid))) for v in f.values(T, A))
    D1, D2 = (np.broadcast_to(v, (tgrid.size, len(grid))) for v in time_derivative(f, T, A))
    dA = grid.spacing[None, :]

    witnesses = []
    flat = {}

    def monotone(name, vals, increasing):
        diff = np.diff(vals, axis=1)
        bad = diff < -tol if increasing else diff > tol
        flat[name] = int(np.count_nonzero(np.abs(diff) <= tol))
        slope = diff / dA
        for i, j in zip(*np.nonzero(bad)):
            witnesses.append(Witness(float(tgrid[i]), float(grid.levels[j]),
                                     float(grid.levels[j + 1]), name, float(slope[i, j])))
        return not bad.any()

    def ordered(name, lo, hi):
        gap = hi - lo
        bad = gap < -tol
        for i, j in zip(*np.nonzero(bad)):
            a = float(grid.levels[j])
            witnesses.append(Witness(float(tgrid[i]), a, a, name, float(gap[i, j])))
        return not bad.any()

    ok = [
        monotone("dα-y1", Y1, True),
        monotone("dα-y2", Y2, False),
        ordered("order", Y1, Y2),
        monotone("dα-y1'", D1, True),
        monotone("dα-y2'", D2, False),
        ordered("order'", D1, D2),
    ]
    order = {c: n for n, c in enumerate(CONDITIONS)}
    witnesses.sort(key=lambda w: (w.t, w.alpha_lo, order[w.condition]))
    return SeikkalaReport(
        value_valid=all(ok[:3]),
        derivative_valid=all(ok[3:]),
        witnesses=tuple(witnesses),
        flat_steps=flat,
        tgrid=tuple(float(x) for x in tgrid),
    )

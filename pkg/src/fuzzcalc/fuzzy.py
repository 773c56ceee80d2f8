"""Fuzzy numbers stored as alpha-level envelopes on a discrete grid.

A fuzzy number ``a`` is kept as two sampled functions of alpha,
``a1(alpha)`` (lower envelope) and ``a2(alpha)`` (upper envelope), so that
the alpha-cut at every grid level is the closed interval ``[a1, a2]``.
Arithmetic follows the extension principle level by level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, GridMismatchError, StructureError

DEFAULT_ALPHA_N = 100
DEFAULT_TOL = 1e-9


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class AlphaGrid:
    """Strictly increasing alpha levels running from 0 to 1."""

    __slots__ = ("levels",)

    def __init__(self, levels):
        levels = _frozen(levels)
        if levels.ndim != 1 or levels.size < 2:
            raise StructureError("an alpha grid needs at least two levels")
        if levels[0] != 0.0 or levels[-1] != 1.0:
            raise StructureError("alpha grid must start at 0 and end at 1")
        if np.any(np.diff(levels) <= 0):
            raise StructureError("alpha grid must be strictly increasing")
        self.levels = levels

    @classmethod
    def uniform(cls, n: int = DEFAULT_ALPHA_N) -> AlphaGrid:
        """Grid with ``n`` equal intervals, i.e. ``n + 1`` levels."""
        if int(n) != n or n < 1:
            raise StructureError(f"number of alpha intervals must be a positive integer, got {n!r}")
        return cls(np.linspace(0.0, 1.0, int(n) + 1))

    @property
    def n(self) -> int:
        return self.levels.size - 1

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.levels)

    def __len__(self):
        return self.levels.size

    def __eq__(self, other):
        if not isinstance(other, AlphaGrid):
            return NotImplemented
        return self.levels.shape == other.levels.shape and bool(np.all(self.levels == other.levels))

    def __hash__(self):
        return hash(self.levels.tobytes())

    def __repr__(self):
        return f"AlphaGrid(n={self.n})"


class LevelInterval(NamedTuple):
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, other: LevelInterval, tol: float = 0.0) -> bool:
        return self.lo <= other.lo + tol and other.hi <= self.hi + tol


@dataclass(frozen=True)
class TriangularParams:
    """Triangular fuzzy number ``(left, peak, right)``."""

    left: float
    peak: float
    right: float

    def __post_init__(self):
        if not (self.left <= self.peak <= self.right):
            raise DomainError(
                f"triangular parameters must satisfy left <= peak <= right, got "
                f"({self.left}, {self.peak}, {self.right})"
            )

    @classmethod
    def crisp(cls, value: float) -> TriangularParams:
        return cls(value, value, value)


class Violation(NamedTuple):
    condition: str  # "i", "ii" or "iv"
    index: int
    magnitude: float


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


class FuzzyNumber:
    """Discretized fuzzy number: lower/upper envelopes over an :class:`AlphaGrid`.

    Construction only checks structure. Use :func:`validate_fuzzy` to test the
    envelope conditions; invalid envelopes are representable on purpose so
    they can be diagnosed.
    """

    __slots__ = ("grid", "lower", "upper")

    def __init__(self, grid: AlphaGrid, lower, upper):
        lower = _frozen(lower)
        upper = _frozen(upper)
        if lower.ndim != 1 or upper.ndim != 1:
            raise StructureError("envelopes must be one-dimensional")
        if lower.size != len(grid) or upper.size != len(grid):
            raise StructureError(
                f"envelope lengths ({lower.size}, {upper.size}) do not match "
                f"the {len(grid)} grid levels"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise StructureError("envelopes must be finite")
        self.grid = grid
        self.lower = lower
        self.upper = upper

    @classmethod
    def crisp(cls, value: float, grid: AlphaGrid) -> FuzzyNumber:
        const = np.full(len(grid), float(value))
        return cls(grid, const, const)

    @property
    def is_crisp(self) -> bool:
        return bool(np.all(self.lower == self.upper) and np.all(self.lower == self.lower[0]))

    @property
    def support(self) -> LevelInterval:
        return LevelInterval(float(self.lower[0]), float(self.upper[0]))

    @property
    def core(self) -> LevelInterval:
        return LevelInterval(float(self.lower[-1]), float(self.upper[-1]))

    def lower_at(self, alpha):
        """Lower envelope at arbitrary alpha, linearly interpolated between levels."""
        return np.interp(alpha, self.grid.levels, self.lower)

    def upper_at(self, alpha):
        return np.interp(alpha, self.grid.levels, self.upper)

    def lower_slope_at(self, alpha):
        """d(lower)/d(alpha); exact for envelopes that are linear in alpha."""
        return np.interp(alpha, self.grid.levels, _envelope_slope(self.grid, self.lower))

    def upper_slope_at(self, alpha):
        return np.interp(alpha, self.grid.levels, _envelope_slope(self.grid, self.upper))

    def cut(self, alpha: float) -> LevelInterval:
        _check_alpha(alpha)
        return LevelInterval(float(self.lower_at(alpha)), float(self.upper_at(alpha)))

    def level(self, index: int) -> LevelInterval:
        return LevelInterval(float(self.lower[index]), float(self.upper[index]))

    def __add__(self, other):
        if isinstance(other, FuzzyNumber):
            return add(self, other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, FuzzyNumber):
            return multiply(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return scalar_mul(float(other), self)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return scalar_mul(-1.0, self)

    def __eq__(self, other):
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return (
            self.grid == other.grid
            and bool(np.all(self.lower == other.lower))
            and bool(np.all(self.upper == other.upper))
        )

    __hash__ = None

    def __repr__(self):
        s, c = self.support, self.core
        return f"FuzzyNumber(support=[{s.lo:g}, {s.hi:g}], core=[{c.lo:g}, {c.hi:g}], {self.grid!r})"


def _envelope_slope(grid: AlphaGrid, env: np.ndarray) -> np.ndarray:
    if len(grid) < 3:
        return np.full(len(grid), (env[-1] - env[0]) / (grid.levels[-1] - grid.levels[0]))
    return np.gradient(env, grid.levels, edge_order=2)


def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a < 0.0) or np.any(a > 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")


def _same_grid(a: FuzzyNumber, b: FuzzyNumber):
    if a.grid != b.grid:
        raise GridMismatchError(f"fuzzy numbers live on different grids: {a.grid!r} vs {b.grid!r}")


# --------------------------------------------------------------------------
# triangular numbers


def triangular_membership(p: TriangularParams, r: float) -> float:
    """Membership grade of ``r`` in the triangular number ``p``.

    A collapsed flank (left == peak or peak == right) contributes nothing;
    the peak itself always has grade 1.
    """
    if r == p.peak:
        return 1.0
    if p.left <= r < p.peak:
        return (r - p.left) / (p.peak - p.left)
    if p.peak < r <= p.right:
        return (p.right - r) / (p.right - p.peak)
    return 0.0


def triangular_alpha_cut(p: TriangularParams, alpha: float) -> LevelInterval:
    _check_alpha(alpha)
    return LevelInterval(*_triangular_envelopes(p, alpha))


def from_triangular(p: TriangularParams, grid: AlphaGrid | None = None) -> FuzzyNumber:
    grid = grid if grid is not None else AlphaGrid.uniform()
    lower, upper = _triangular_envelopes(p, grid.levels)
    return FuzzyNumber(grid, lower, upper)


def _triangular_envelopes(p: TriangularParams, alpha):
    # left + alpha*(peak - left) is exact on collapsed flanks; the core is
    # pinned so rounding cannot make the envelopes cross at alpha = 1
    lower = np.where(alpha == 1.0, p.peak, p.left + alpha * (p.peak - p.left))
    upper = np.where(alpha == 1.0, p.peak, p.right + alpha * (p.peak - p.right))
    if np.ndim(alpha) == 0:
        return float(lower), float(upper)
    return lower, upper


# --------------------------------------------------------------------------
# validity


def validate_fuzzy(f: FuzzyNumber, tol: float = DEFAULT_TOL) -> ValidityReport:
    """Check the envelope characterization of a fuzzy number on the grid.

    (i) lower non-decreasing, (ii) upper non-increasing, (iv) lower <= upper.
    One-sided continuity cannot fail on finite samples and is not checked.
    Magnitudes are the positive amount by which each condition is broken.
    """
    if f.lower.shape != f.upper.shape or f.lower.size != len(f.grid):
        raise StructureError("envelopes and grid have mismatched lengths")
    violations = []
    drop = -np.diff(f.lower)
    for j in np.flatnonzero(drop > tol):
        violations.append(Violation("i", int(j + 1), float(drop[j])))
    rise = np.diff(f.upper)
    for j in np.flatnonzero(rise > tol):
        violations.append(Violation("ii", int(j + 1), float(rise[j])))
    cross = f.lower - f.upper
    for j in np.flatnonzero(cross > tol):
        violations.append(Violation("iv", int(j), float(cross[j])))
    violations.sort(key=lambda v: (v.index, v.condition))
    return ValidityReport(tuple(violations))


# --------------------------------------------------------------------------
# extension-principle arithmetic


def add(a: FuzzyNumber, b: FuzzyNumber) -> FuzzyNumber:
    _same_grid(a, b)
    return FuzzyNumber(a.grid, a.lower + b.lower, a.upper + b.upper)


def multiply(a: FuzzyNumber, b: FuzzyNumber) -> FuzzyNumber:
    _same_grid(a, b)
    products = np.stack(
        [a.lower * b.lower, a.lower * b.upper, a.upper * b.lower, a.upper * b.upper]
    )
    return FuzzyNumber(a.grid, products.min(axis=0), products.max(axis=0))


def scalar_mul(lam: float, a: FuzzyNumber) -> FuzzyNumber:
    if lam >= 0:
        return FuzzyNumber(a.grid, lam * a.lower, lam * a.upper)
    return FuzzyNumber(a.grid, lam * a.upper, lam * a.lower)


def extension_brute_force_multiply(a: FuzzyNumber, b: FuzzyNumber, samples: int = 101) -> FuzzyNumber:
    """Product by direct enumeration of ``r * s`` over sampled alpha-cuts.

    Independent of :func:`multiply`: no use is made of the fact that the
    extrema sit on interval corners. Samples include both endpoints.
    """
    _same_grid(a, b)
    if samples < 2:
        raise DomainError("need at least two samples per interval")
    u = np.linspace(0.0, 1.0, samples)
    r = a.lower[:, None] + (a.upper - a.lower)[:, None] * u
    s = b.lower[:, None] + (b.upper - b.lower)[:, None] * u
    r[:, -1], s[:, -1] = a.upper, b.upper
    r = np.clip(r, a.lower[:, None], a.upper[:, None])
    s = np.clip(s, b.lower[:, None], b.upper[:, None])
    prod = r[:, :, None] * s[:, None, :]
    flat = prod.reshape(prod.shape[0], -1)
    return FuzzyNumber(a.grid, flat.min(axis=1), flat.max(axis=1))

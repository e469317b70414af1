"""Problem primitives: state space, diffusion, payoff, stopping regions.

Stopping regions are finite ordered unions of disjoint intervals that are
closed within the (open) state space.  Every boundary point of such a region
is either the edge of an interval with non-empty interior (case "a") or an
isolated point (case "b"); the pathological accumulation case "c" cannot
occur for finite unions, so normalization only has to reject pieces that are
not closed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")


class OpenPieceError(ValueError):
    """An input interval is not closed within the state space."""


class OutOfDomain(ValueError):
    """A query point lies outside the state space."""


class InadmissibleRegion(ValueError):
    """Classifier invoked on a region that failed admissibility."""


class ParameterError(ValueError):
    """Example builder received parameters violating its constraints."""


# ---------------------------------------------------------------------------
# Intervals


@dataclass(frozen=True)
class Interval:
    """Interval with extended-real endpoints.

    ``lower_closed`` / ``upper_closed`` are ignored at infinite endpoints.
    A degenerate point has lower == upper and both ends closed.
    """

    lower: float
    upper: float
    lower_closed: bool = True
    upper_closed: bool = True

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("interval endpoints must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")
        if self.lower == self.upper and not (self.lower_closed and self.upper_closed):
            raise ValueError("a degenerate point must be closed on both sides")

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper

    def contains(self, x: float) -> bool:
        if x < self.lower or x > self.upper:
            return False
        if x == self.lower and not self.lower_closed and math.isfinite(self.lower):
            return False
        if x == self.upper and not self.upper_closed and math.isfinite(self.upper):
            return False
        return True

    def contains_open(self, x: float) -> bool:
        return self.lower < x < self.upper

    def __str__(self):
        lb = "[" if self.lower_closed else "("
        rb = "]" if self.upper_closed else ")"
        return f"{lb}{self.lower}, {self.upper}{rb}"


def closed(lower: float, upper: float) -> Interval:
    return Interval(lower, upper, True, True)


def point(x: float) -> Interval:
    return Interval(x, x, True, True)


# ---------------------------------------------------------------------------
# Stopping regions


class Membership(Enum):
    INTERIOR_OF_S = "interior"
    BOUNDARY_CASE_A = "boundary_a"
    BOUNDARY_CASE_B = "boundary_b"
    IN_COMPLEMENT = "complement"


class Admissibility(Enum):
    ADMISSIBLE = "admissible"
    INADMISSIBLE_CASE_C = "inadmissible_case_c"


@dataclass(frozen=True)
class StoppingRegion:
    """Normalized stopping region: sorted disjoint pieces, closed in X.

    ``pieces`` store endpoints clamped to the state space; a piece endpoint
    equal to an open domain bound means the piece runs all the way to that
    edge of X (and is still closed *within* X).
    """

    pieces: tuple[Interval, ...]
    domain: Interval
    admissibility: Admissibility = Admissibility.ADMISSIBLE
    offending_points: tuple[float, ...] = ()

    @property
    def is_empty(self) -> bool:
        return len(self.pieces) == 0

    @property
    def is_whole_space(self) -> bool:
        return (
            len(self.pieces) == 1
            and self.pieces[0].lower <= self.domain.lower
            and self.pieces[0].upper >= self.domain.upper
        )

    def boundary_points(self) -> list[tuple[float, Membership]]:
        """Boundary points of S inside X with their case classification."""
        out = []
        for p in self.pieces:
            if p.is_point:
                out.append((p.lower, Membership.BOUNDARY_CASE_B))
                continue
            if p.lower > self.domain.lower:
                out.append((p.lower, Membership.BOUNDARY_CASE_A))
            if p.upper < self.domain.upper:
                out.append((p.upper, Membership.BOUNDARY_CASE_A))
        return out

    def contains(self, x: float) -> bool:
        return any(p.lower <= x <= p.upper for p in self.pieces)

    def locate(self, x: float) -> Membership:
        if not self.domain.contains_open(x):
            raise OutOfDomain(f"x={x} outside state space {self.domain}")
        for p in self.pieces:
            if not (p.lower <= x <= p.upper):
                continue
            if p.is_point:
                return Membership.BOUNDARY_CASE_B
            lo_edge = p.lower > self.domain.lower and x == p.lower
            hi_edge = p.upper < self.domain.upper and x == p.upper
            if lo_edge or hi_edge:
                return Membership.BOUNDARY_CASE_A
            return Membership.INTERIOR_OF_S
        return Membership.IN_COMPLEMENT

    def complement_components(self) -> list[tuple[float, float]]:
        """Open components of X \\ S, as (lower, upper) with domain bounds."""
        lo, hi = self.domain.lower, self.domain.upper
        if self.is_empty:
            return [(lo, hi)]
        comps = []
        if self.pieces[0].lower > lo:
            comps.append((lo, self.pieces[0].lower))
        for left, right in zip(self.pieces[:-1], self.pieces[1:]):
            comps.append((left.upper, right.lower))
        if self.pieces[-1].upper < hi:
            comps.append((self.pieces[-1].upper, hi))
        return comps

    def __str__(self):
        if self.is_empty:
            return "{}"
        return " U ".join(str(p) for p in self.pieces)


def region_normalize(
    raw_pieces: Sequence[Interval], domain: Interval
) -> StoppingRegion:
    """Sort, clamp to X, fuse touching/overlapping pieces, classify boundary.

    Raises :class:`OpenPieceError` when a finite endpoint strictly inside X
    is open: such pieces are not closed in X, and the classifiers refuse to
    approximate them.  An empty input yields the empty region.
    """
    clamped: list[Interval] = []
    for p in raw_pieces:
        lo = max(p.lower, domain.lower)
        hi = min(p.upper, domain.upper)
        if lo > hi:
            continue  # piece entirely outside X
        lo_inside = lo > domain.lower
        hi_inside = hi < domain.upper
        if lo_inside and lo == p.lower and not p.lower_closed:
            raise OpenPieceError(f"piece {p} is open at {p.lower} inside X")
        if hi_inside and hi == p.upper and not p.upper_closed:
            raise OpenPieceError(f"piece {p} is open at {p.upper} inside X")
        if lo == hi and not (lo_inside or hi_inside):
            continue
        clamped.append(closed(lo, hi))
    clamped.sort(key=lambda q: (q.lower, q.upper))

    merged: list[list[float]] = []
    for p in clamped:
        if merged and p.lower <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], p.upper)
        else:
            merged.append([p.lower, p.upper])
    pieces = tuple(closed(lo, hi) for lo, hi in merged)
    return StoppingRegion(pieces, domain, Admissibility.ADMISSIBLE, ())


def region_contains(region: StoppingRegion, x: float) -> Membership:
    """Exact membership classification of ``x`` relative to the region."""
    return region.locate(x)


# ---------------------------------------------------------------------------
# Diffusion


class DiffusionKind(Enum):
    BROWNIAN = "bm"
    GEOMETRIC = "gbm"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DiffusionSpec:
    """dX = mu(X) dt + sigma(X) dW on an open interval X."""

    kind: DiffusionKind
    mu: Callable[[np.ndarray], np.ndarray]
    sigma: Callable[[np.ndarray], np.ndarray]
    state_space: Interval
    drift_param: Optional[float] = None
    vol_param: Optional[float] = None

    @staticmethod
    def brownian(mu: float = 0.0, sigma: float = 1.0,
                 domain: Interval | None = None) -> "DiffusionSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        dom = domain or Interval(NEG_INF, POS_INF, False, False)
        return DiffusionSpec(
            DiffusionKind.BROWNIAN,
            lambda x: np.full_like(np.asarray(x, dtype=float), mu),
            lambda x: np.full_like(np.asarray(x, dtype=float), sigma),
            dom, mu, sigma,
        )

    @staticmethod
    def gbm(mu: float, sigma: float) -> "DiffusionSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        dom = Interval(0.0, POS_INF, False, False)
        return DiffusionSpec(
            DiffusionKind.GEOMETRIC,
            lambda x: mu * np.asarray(x, dtype=float),
            lambda x: sigma * np.asarray(x, dtype=float),
            dom, mu, sigma,
        )

    @staticmethod
    def custom(mu, sigma, domain: Interval) -> "DiffusionSpec":
        return DiffusionSpec(DiffusionKind.CUSTOM, mu, sigma, domain)

    def validate(self, n_grid: int = 201, lipschitz_bound: float = 1e6) -> None:
        """Spot-check ellipticity and finiteness on a probe grid.

        Lipschitz continuity is a declared assumption; sampled difference
        quotients above ``lipschitz_bound`` only raise a warning.
        """
        xs = self.probe_grid(n_grid)
        mu = np.asarray(self.mu(xs), dtype=float)
        sg = np.asarray(self.sigma(xs), dtype=float)
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sg))):
            raise ValueError("mu/sigma must be finite on the state space")
        if np.any(sg * sg <= 0):
            raise ValueError("sigma^2 must be strictly positive on X")
        dx = np.diff(xs)
        for name, vals in (("mu", mu), ("sigma", sg)):
            quot = np.abs(np.diff(vals)) / dx
            if np.any(quot > lipschitz_bound):
                warnings.warn(
                    f"{name} difference quotient exceeds {lipschitz_bound:g}; "
                    "Lipschitz assumption may fail", RuntimeWarning)

    def probe_grid(self, n: int = 201) -> np.ndarray:
        """Representative interior grid of the state space."""
        lo, hi = self.state_space.lower, self.state_space.upper
        if math.isfinite(lo) and math.isfinite(hi):
            return np.linspace(lo, hi, n + 2)[1:-1]
        if lo == 0.0 and not math.isfinite(hi):
            return np.geomspace(1e-6, 1e3, n)
        if not math.isfinite(lo) and not math.isfinite(hi):
            return np.linspace(-50.0, 50.0, n)
        anchor = lo if math.isfinite(lo) else hi
        span = np.geomspace(1e-6, 1e3, n)
        return anchor + span if math.isfinite(lo) else anchor - span[::-1]


# ---------------------------------------------------------------------------
# Payoff


@dataclass(frozen=True)
class PayoffSpec:
    """Non-negative payoff, piecewise C^2 between kinks.

    ``d1``/``d2`` give one-sided first/second derivatives; ``side`` is
    "left" or "right".  ``wellposedness_zeta`` is declared metadata for the
    moment condition and is not verified.
    """

    f: Callable[[np.ndarray], np.ndarray]
    kinks: tuple[float, ...]
    d1: Callable[[float, str], float]
    d2: Callable[[float, str], float]
    wellposedness_zeta: float = 1.0
    label: str = "custom"

    @staticmethod
    def put(strike: float) -> "PayoffSpec":
        if strike <= 0:
            raise ValueError("strike must be positive")
        K = float(strike)

        def d1(x, side):
            if x < K or (x == K and side == "left"):
                return -1.0
            return 0.0

        return PayoffSpec(
            f=lambda x: np.maximum(K - np.asarray(x, dtype=float), 0.0),
            kinks=(K,), d1=d1, d2=lambda x, side: 0.0, label=f"put(K={K})")

    @staticmethod
    def capped_identity(cap: float) -> "PayoffSpec":
        if cap <= 0:
            raise ValueError("cap must be positive")
        K = float(cap)

        def d1(x, side):
            if x < K or (x == K and side == "left"):
                return 1.0
            return 0.0

        return PayoffSpec(
            f=lambda x: np.minimum(np.asarray(x, dtype=float), K),
            kinks=(K,), d1=d1, d2=lambda x, side: 0.0,
            label=f"capped_identity(K={K})")

    @staticmethod
    def from_table(x: Sequence[float], values: Sequence[float],
                   kinks: Sequence[float] = ()) -> "PayoffSpec":
        """Piecewise-cubic payoff: one spline per smooth segment."""
        from scipy.interpolate import CubicSpline

        xa = np.asarray(x, dtype=float)
        ya = np.asarray(values, dtype=float)
        if xa.ndim != 1 or xa.size < 4 or np.any(np.diff(xa) <= 0):
            raise ValueError("table grid must be increasing with >= 4 points")
        if np.any(ya < 0):
            raise ValueError("payoff values must be non-negative")
        ks = tuple(sorted(float(k) for k in kinks))
        edges = [xa[0], *[k for k in ks if xa[0] < k < xa[-1]], xa[-1]]
        splines = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            m = (xa >= lo - 1e-12) & (xa <= hi + 1e-12)
            if m.sum() < 4:
                raise ValueError("each smooth segment needs >= 4 table points")
            splines.append((lo, hi, CubicSpline(xa[m], ya[m])))

        def pick(xq, side):
            for lo, hi, sp in splines:
                if lo <= xq < hi or (xq == hi and (side == "left" or hi == edges[-1])):
                    return sp
            return splines[0][2] if xq < edges[0] else splines[-1][2]

        def f(xq):
            xq = np.asarray(xq, dtype=float)
            out = np.empty_like(xq)
            flat = xq.ravel()
            res = out.ravel()
            for i, xv in enumerate(flat):
                res[i] = max(float(pick(xv, "left" if xv in ks else "right")(xv)), 0.0)
            return out if out.ndim else float(out)

        return PayoffSpec(
            f=f, kinks=ks,
            d1=lambda xq, side: float(pick(xq, side)(xq, 1)),
            d2=lambda xq, side: float(pick(xq, side)(xq, 2)),
            label="custom_table")

    def validate(self, grid: np.ndarray) -> None:
        vals = np.asarray(self.f(grid), dtype=float)
        if np.any(vals < -1e-12):
            raise ValueError("payoff must be non-negative")
        ks = np.asarray(self.kinks)
        if ks.size > 1 and np.min(np.diff(np.sort(ks))) <= 0:
            raise ValueError("kinks must be strictly separated")
        for k in self.kinks:
            left = float(self.f(np.asarray([k - 1e-9])))
            right = float(self.f(np.asarray([k + 1e-9])))
            if abs(left - right) > 1e-6 * (1.0 + abs(left)):
                raise ValueError(f"payoff discontinuous across kink {k}")

    def in_smooth_set(self, x: float) -> bool:
        return all(x != k for k in self.kinks)

    def value(self, x: float) -> float:
        return float(self.f(np.asarray([x]))[0])


# ---------------------------------------------------------------------------
# Problem instance


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable bundle of diffusion, discount and payoff.

    Construction runs the component validations; the moment/transversality
    assumptions on delta(t) f(X_t) are declared, not checked, and are echoed
    into reports as assumption notes.
    """

    diffusion: DiffusionSpec
    discount: "DiscountSpec"  # noqa: F821 - defined in stopeq.discount
    payoff: PayoffSpec
    label: str = ""
    assumption_notes: tuple[str, ...] = field(default=(
        "integrability/transversality of delta(t) f(X_t): assumed, not verified",
        "Lipschitz coefficients: sampled difference-quotient spot check only",
    ))

    def __post_init__(self):
        self.diffusion.validate()
        self.payoff.validate(self.diffusion.probe_grid(401))
        self.discount.validate()

    @property
    def domain(self) -> Interval:
        return self.diffusion.state_space

    def region(self, raw_pieces: Sequence[Interval]) -> StoppingRegion:
        return region_normalize(raw_pieces, self.domain)

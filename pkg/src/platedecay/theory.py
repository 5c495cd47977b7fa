"""Exact exponent arithmetic for the linear decay theory.

All quantities here are evaluated in exact rational arithmetic
(fractions.Fraction) so that boundary classifications (admissibility index
equal to 1, region boundaries in the 1/p-1/q square) carry no floating
error.  Exponents p, q enter only through their reciprocals; p = infinity
is encoded as a zero reciprocal.

Naming used throughout the package and in the CSV interface:
  d_pl   -- admissibility index (n/2)(1/p - 1/q) + n*max(1/2 - 1/p, 1/q - 1/2);
            the propagator maps L^p -> L^q only for d_pl <= 1.
  beta   -- mass-induced correction to the large-time decay exponent; zero
            between the lines 1/p + 3/q = 2 and 3/p + 1/q = 2, positive
            beyond them.
  gamma  -- exponent of the logarithmic factor, 1/2 exactly at the two
            exceptional pairs (1, 3) and (3/2, inf).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

RationalLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        if math.isinf(x):
            raise ValueError("pass infinity as the string 'inf'")
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def _reciprocal(exponent) -> Fraction:
    """1/p for p in [1, inf]; infinity (math.inf or 'inf') maps to 0."""
    if exponent in ("inf", "Inf", "INF") or (
        isinstance(exponent, float) and math.isinf(exponent)
    ):
        return ZERO
    p = _as_fraction(exponent)
    if p < 1:
        raise ValueError(f"Lebesgue exponent must satisfy p >= 1, got {p}")
    return 1 / p


class Admissibility(enum.Enum):
    STRICT_INTERIOR = "StrictInterior"
    BOUNDARY_ADMISSIBLE = "BoundaryAdmissible"
    INADMISSIBLE = "Inadmissible"


@dataclass(frozen=True)
class LebesguePair:
    """Reciprocal pair (1/p, 1/q) with p <= q, held as exact rationals."""

    p_inv: Fraction
    q_inv: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p_inv", Fraction(self.p_inv))
        object.__setattr__(self, "q_inv", Fraction(self.q_inv))
        if not (ZERO <= self.q_inv <= self.p_inv <= ONE):
            raise ValueError(
                f"need 0 <= 1/q <= 1/p <= 1, got 1/p={self.p_inv}, 1/q={self.q_inv}"
            )

    @classmethod
    def from_exponents(cls, p, q) -> "LebesguePair":
        return cls(_reciprocal(p), _reciprocal(q))

    @property
    def p(self):
        return math.inf if self.p_inv == 0 else 1 / self.p_inv

    @property
    def q(self):
        return math.inf if self.q_inv == 0 else 1 / self.q_inv

    def dual(self) -> "LebesguePair":
        """The pair (q', p') of conjugate exponents in swapped order."""
        return LebesguePair(1 - self.q_inv, 1 - self.p_inv)

    def __str__(self):
        return f"(p={self.p}, q={self.q})"


# The two exceptional pairs carrying a (log t)^(1/2) factor.
_LOG_PAIRS = (
    LebesguePair(Fraction(1), Fraction(1, 3)),
    LebesguePair(Fraction(2, 3), Fraction(0)),
)


@dataclass(frozen=True)
class TheoryPrediction:
    """All exponents the linear theory attaches to a pair and dimension."""

    pair: LebesguePair
    dimension: int
    d_pl: Fraction
    beta: Fraction
    gamma: Fraction
    large_time_exponent: Fraction
    small_time_exponent: Fraction
    admissibility: Admissibility
    # True only for the exceptional log pairs sitting exactly on the
    # d_pl = 1 boundary (n = 6), where the theory is silent.
    log_unknown: bool = False


@dataclass(frozen=True)
class CriticalExponents:
    alpha_c: Fraction
    alpha_tilde_c: Fraction
    sobolev_upper: Union[Fraction, float]  # (n+4)/(n-4), inf for n <= 4
    nonexistence_threshold: Optional[Fraction]  # (n+2m)/(n-2m), None if n <= 2m


def admissibility_index(pair: LebesguePair, n: int) -> Fraction:
    """d_pl: the exponent governing L^p -> L^q boundedness (bounded iff <= 1)."""
    diff = pair.p_inv - pair.q_inv
    return Fraction(n, 2) * diff + n * max(HALF - pair.p_inv, pair.q_inv - HALF)


def mass_correction(pair: LebesguePair) -> Fraction:
    """beta: large-time decay correction induced by the mass term.

    Nonnegative; vanishes between the lines 1/p + 3/q = 2 and
    3/p + 1/q = 2, grows linearly beyond them.  The two branch formulas
    agree on the line 1/p + 1/q = 1 and are exchanged by duality
    (p, q) -> (q', p').
    """
    if pair.p_inv + pair.q_inv >= 1:
        return max(pair.p_inv + 3 * pair.q_inv - 2, ZERO)
    return max(2 - (3 * pair.p_inv + pair.q_inv), ZERO)


def log_power(pair: LebesguePair) -> Fraction:
    """gamma: 1/2 exactly at (1, 3) and (3/2, inf), zero otherwise."""
    return HALF if pair in _LOG_PAIRS else ZERO


def classify(pair: LebesguePair, n: int) -> Admissibility:
    """Admissibility region of a pair for dimension n.

    Strict interior: d_pl < 1.  Boundary: d_pl = 1 with 1 < p <= 2 <= q < inf;
    the two exceptional log pairs are also reported as boundary-admissible
    when they land on d_pl = 1 (their estimate there is unresolved, flagged
    via TheoryPrediction.log_unknown).  Everything else is inadmissible.
    """
    d = admissibility_index(pair, n)
    if d < 1:
        return Admissibility.STRICT_INTERIOR
    if d == 1:
        open_band = HALF <= pair.p_inv < 1 and ZERO < pair.q_inv <= HALF
        if open_band or pair in _LOG_PAIRS:
            return Admissibility.BOUNDARY_ADMISSIBLE
    return Admissibility.INADMISSIBLE


def predict(pair: LebesguePair, n: int) -> TheoryPrediction:
    """Full exponent prediction; inadmissible pairs still carry exponents."""
    d = admissibility_index(pair, n)
    b = mass_correction(pair)
    g = log_power(pair)
    diff = pair.p_inv - pair.q_inv
    large = -Fraction(n, 4) * (diff - b)
    small = 1 - Fraction(n, 2) * diff
    adm = classify(pair, n)
    log_unknown = d == 1 and pair in _LOG_PAIRS
    return TheoryPrediction(pair, n, d, b, g, large, small, adm, log_unknown)


def nonsingular_small_time(q_inv, n: int) -> bool:
    """Whether the small-time L^1 -> L^q exponent 1 - (n/2)(1 - 1/q) is >= 0."""
    q_inv = Fraction(q_inv)
    if not ZERO <= q_inv <= ONE:
        raise ValueError("q_inv must lie in [0, 1]")
    return 1 - Fraction(n, 2) * (1 - q_inv) >= 0


def critical_exponents(n: int, m=Fraction(2)) -> CriticalExponents:
    """Critical powers for small-data global existence and nonexistence.

    m in [1, 2] is the Lebesgue index of the second datum used by the
    nonexistence threshold (n + 2m)/(n - 2m); the threshold is undefined
    (None) when n <= 2m.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    m = Fraction(m)
    if not 1 <= m <= 2:
        raise ValueError("m must lie in [1, 2]")
    alpha_c = 1 + Fraction(4, n)
    alpha_tilde = 2 + Fraction(2, n)
    sobolev: Union[Fraction, float]
    sobolev = math.inf if n <= 4 else Fraction(n + 4, n - 4)
    threshold = Fraction(n + 2 * m, n - 2 * m) if n > 2 * m else None
    return CriticalExponents(alpha_c, alpha_tilde, sobolev, threshold)


def exponent_table(
    dimensions: Iterable[int], step: Fraction = Fraction(1, 20)
) -> list[dict]:
    """Machine-readable exponent table over the rational (1/p, 1/q) grid.

    Rows cover every valid pair (1/p >= 1/q) on the grid with the given
    rational step, for each requested dimension.  Values are exact
    Fractions; the CLI renders them to CSV.
    """
    step = Fraction(step)
    if not 0 < step <= 1:
        raise ValueError("grid step must lie in (0, 1]")
    count = int(1 / step) + 1
    grid = [i * step for i in range(count)]
    rows = []
    for n in dimensions:
        for p_inv in grid:
            for q_inv in grid:
                if q_inv > p_inv:
                    continue
                pred = predict(LebesguePair(p_inv, q_inv), n)
                rows.append(
                    {
                        "n": n,
                        "p_inv": p_inv,
                        "q_inv": q_inv,
                        "d_pl": pred.d_pl,
                        "beta": pred.beta,
                        "gamma": pred.gamma,
                        "class": pred.admissibility.value,
                        "large_exp": pred.large_time_exponent,
                        "small_exp": pred.small_time_exponent,
                    }
                )
    return rows

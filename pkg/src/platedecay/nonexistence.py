"""Test-function method: scaled cutoffs, pairing functionals, exponent bookkeeping.

The method multiplies the equation by psi_tau(t, x) = eta(t/tau) phi(x/sqrt(tau))
with smooth compactly supported cutoffs and tracks powers of tau.  The
computable content is (a) the exact exponent window forcing the datum
multiplier to vanish, (b) the tau-scaling of the datum pairing against the
singular datum |x|^(-k), and (c) the Holder-type inequality between the two
sides of the weak formulation on sampled space-time fields.

All cutoff derivatives (second in time, bilaplacian in space) come from the
closed-form derivative chain of the shared smooth transition; finite
differences of fourth derivatives near the support edge are far too noisy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cutoffs import transition
from .spectral import GridGeometry

_SPHERE_AREA = {  # surface measure of the unit sphere, 2 pi^(n/2) / Gamma(n/2)
    n: 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) for n in range(1, 9)
}


# ---------------------------------------------------------------------------
# Cutoffs and their exact derivatives


def time_cutoff(t, order: int = 0):
    """eta(t): 1 on [0, 1/2], 0 on [1, inf); derivative orders 0..2."""
    t = np.asarray(t, dtype=float)
    return transition(2.0 * (1.0 - t), order) * (-2.0) ** order


def space_cutoff(rho, order: int = 0):
    """Radial profile phi(|x|): 1 on [0, 1/2], 0 on [1, inf); orders 0..4."""
    rho = np.asarray(np.abs(rho), dtype=float)
    return transition(2.0 * (1.0 - rho), order) * (-2.0) ** order


def bilaplacian_space_cutoff(rho, n: int):
    """Closed-form bilaplacian of the radial cutoff phi in dimension n.

    For radial g, Lap^2 g = g'''' + 2(n-1) g'''/rho
                          + (n-1)(n-3) (g''/rho^2 - g'/rho^3).
    The derivatives vanish identically off [1/2, 1], which keeps the
    rho -> 0 coordinate singularity out of play.
    """
    rho = np.asarray(np.abs(rho), dtype=float)
    out = np.zeros_like(rho)
    active = (rho > 0.45) & (rho < 1.0)
    if np.any(active):
        r = rho[active]
        g1 = space_cutoff(r, 1)
        g2 = space_cutoff(r, 2)
        g3 = space_cutoff(r, 3)
        g4 = space_cutoff(r, 4)
        out[active] = (
            g4
            + 2.0 * (n - 1) * g3 / r
            + (n - 1) * (n - 3) * (g2 / r**2 - g1 / r**3)
        )
    return out


@dataclass(frozen=True)
class TestFunctionPair:
    """The scaled test function psi_tau(t, x) = eta(t/tau) phi(x/sqrt(tau))."""

    tau: float

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")

    def psi(self, t, rho):
        return time_cutoff(np.asarray(t) / self.tau) * space_cutoff(
            np.asarray(rho) / math.sqrt(self.tau)
        )

    def operator_applied(self, t, rho, n: int):
        """(d_tt + Lap^2 + 1) psi_tau; both derivative terms scale as tau^-2."""
        ts = np.asarray(t) / self.tau
        rs = np.asarray(rho) / math.sqrt(self.tau)
        eta0 = time_cutoff(ts)
        phi0 = space_cutoff(rs)
        dtt = self.tau**-2 * time_cutoff(ts, 2) * phi0
        bilap = self.tau**-2 * eta0 * bilaplacian_space_cutoff(rs, n)
        return dtt + bilap + eta0 * phi0


def cutoff_power_constant(r_power: float, n: int, samples: int = 20001) -> float:
    """Fitted constant C_r with |Lap^2 phi| <= C_r phi^(1/r) on a fine grid.

    Finite for every r > 1 because the transition decays like exp(-1/s)
    while its derivatives only grow polynomially in 1/s.
    """
    rho = np.linspace(0.5, 1.0, samples)[1:-1]
    phi0 = space_cutoff(rho)
    positive = phi0 > 0
    ratio = np.abs(bilaplacian_space_cutoff(rho[positive], n)) / phi0[
        positive
    ] ** (1.0 / r_power)
    return float(np.max(ratio))


# ---------------------------------------------------------------------------
# Exponent bookkeeping


class NonexistenceOutcome(enum.Enum):
    FORCES_LAMBDA_ZERO = "ForcesLambdaZero"
    INCONCLUSIVE = "Inconclusive"
    HYPOTHESIS_VIOLATED = "HypothesisViolated"


@dataclass(frozen=True)
class NonexistenceVerdict:
    n: int
    m: Fraction
    alpha: Fraction
    window: Optional[tuple]  # (2(alpha+1)/(alpha-1), n/m), None if n <= 2m
    k: Optional[Fraction]  # chosen midpoint when the window is nonempty
    exponent: Optional[Fraction]  # -2 alpha' + 1 + k/2
    verdict: NonexistenceOutcome


def exponent_conditions(n: int, m, alpha) -> NonexistenceVerdict:
    """Exact window and verdict of the scaling argument.

    The datum multiplier is forced to zero when a singularity order k fits
    in (2(alpha+1)/(alpha-1), n/m): then the pairing grows like
    tau^((n-k)/2) while the functional side scales like
    tau^(-2 alpha' + 1 + k/2) with positive exponent.  The window is
    nonempty exactly when alpha exceeds (n + 2m)/(n - 2m); n <= 2m violates
    the hypotheses outright.
    """
    m = Fraction(m)
    alpha = Fraction(alpha)
    if not 1 <= m <= 2:
        raise ValueError("m must lie in [1, 2]")
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if n <= 2 * m:
        return NonexistenceVerdict(n, m, alpha, None, None, None,
                                   NonexistenceOutcome.HYPOTHESIS_VIOLATED)
    lo = 2 * (alpha + 1) / (alpha - 1)
    hi = Fraction(n) / m
    if lo >= hi:
        return NonexistenceVerdict(n, m, alpha, (lo, hi), None, None,
                                   NonexistenceOutcome.INCONCLUSIVE)
    k = (lo + hi) / 2
    alpha_conj = alpha / (alpha - 1)
    exponent = -2 * alpha_conj + 1 + k / 2
    outcome = (
        NonexistenceOutcome.FORCES_LAMBDA_ZERO
        if exponent > 0
        else NonexistenceOutcome.INCONCLUSIVE
    )
    return NonexistenceVerdict(n, m, alpha, (lo, hi), k, exponent, outcome)


def nonexistence_threshold(n: int, m) -> Optional[Fraction]:
    """(n + 2m)/(n - 2m) when n > 2m, else None."""
    m = Fraction(m)
    return Fraction(n + 2 * m, 1) / (n - 2 * m) if n > 2 * m else None


# ---------------------------------------------------------------------------
# Datum pairing


def datum_pairing(k: float, n: int, tau: float, nodes: int = 800) -> float:
    """int f phi_tau dx with f = |x|^(-k) on |x| <= 1, by radial quadrature.

    The integrable endpoint singularity rho^(n-1-k) is removed exactly by
    substituting rho = z^(1/(n-k)); across a tau sweep the value scales like
    tau^((n-k)/2).
    """
    if k >= n:
        raise ValueError("need k < n for an integrable datum")
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    top = math.sqrt(tau)
    power = n - k  # rho^(n-1-k) drho = d(rho^(n-k))/ (n-k)
    x, w = np.polynomial.legendre.leggauss(nodes)
    upper = top**power
    z = 0.5 * upper * (x + 1.0)
    wz = 0.5 * upper * w
    rho = z ** (1.0 / power)
    vals = space_cutoff(rho / top)
    radial = float(np.dot(vals, wz)) / power
    return _SPHERE_AREA[n] * radial


def pairing_scaling_exponent(k: float, n: int, taus: Sequence[float]) -> float:
    """Fitted log-log slope of the datum pairing across a tau sweep."""
    taus = np.asarray(sorted(taus), dtype=float)
    vals = np.array([datum_pairing(k, n, t) for t in taus])
    slope = np.polyfit(np.log(taus), np.log(vals), 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# Weak-formulation pairing on sampled fields


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Field u(t_i, x) sampled on a grid trajectory (from semilinear runs)."""

    times: np.ndarray
    values: np.ndarray  # shape (len(times), *grid shape)
    geometry: GridGeometry

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if values.shape != (times.size,) + self.geometry.shape:
            raise ValueError("values shape does not match times x grid")
        if times.size < 3 or np.any(np.diff(times) <= 0):
            raise ValueError("need at least 3 increasing sample times")


def weak_pairing(u: SpaceTimeField, tau: float, alpha: float) -> tuple:
    """Both sides of the weak formulation against psi_tau.

    Returns (lhs, I_tau) with
      lhs   = int int u (d_tt + Lap^2 + 1) psi_tau dx dt,
      I_tau = int int |u|^alpha psi_tau dx dt,
    space by Riemann sum on the grid, time by the trapezoid rule; psi_tau
    derivatives are analytic.  The sampled region must cover the support of
    psi_tau, i.e. times through tau and the ball |x| <= sqrt(tau).
    """
    pair = TestFunctionPair(tau)
    geom = u.geometry
    if u.times[0] > 0.0 or u.times[-1] < tau:
        raise ValueError("time samples must cover [0, tau]")
    if geom.half_width < math.sqrt(tau):
        raise ValueError("grid does not cover the support of psi_tau")
    rho = np.sqrt(geom.radius_squared())
    mask_t = u.times <= tau + 1e-12
    cell = geom.cell_volume
    lhs_slices, rhs_slices, kept_times = [], [], []
    for i in np.nonzero(mask_t)[0]:
        t = u.times[i]
        op = pair.operator_applied(t, rho, geom.dim)
        psi = pair.psi(t, rho)
        lhs_slices.append(float(np.sum(u.values[i] * op)) * cell)
        rhs_slices.append(float(np.sum(np.abs(u.values[i]) ** alpha * psi)) * cell)
        kept_times.append(t)
    kept_times = np.asarray(kept_times)
    lhs = float(np.trapezoid(lhs_slices, kept_times))
    i_tau = float(np.trapezoid(rhs_slices, kept_times))
    return lhs, i_tau


def holder_chain_ratio(u: SpaceTimeField, tau: float, alpha: float) -> float:
    """|lhs| / (tau^(-2 + (1 + n/2)/alpha') I_tau^(1/alpha)); bounded in tau."""
    lhs, i_tau = weak_pairing(u, tau, alpha)
    n = u.geometry.dim
    alpha_conj = alpha / (alpha - 1.0)
    scale = tau ** (-2.0 + (1.0 + n / 2.0) / alpha_conj)
    if i_tau <= 0:
        return 0.0
    return abs(lhs) / (scale * i_tau ** (1.0 / alpha))

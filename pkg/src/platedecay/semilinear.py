"""Duhamel-based solver for u_tt + Laplacian^2 u + u = |u|^alpha.

Time marching is an exponential integrator: the linear flow is the exact
per-mode rotation, the nonlinearity enters through variation of constants
inside each step.  Two quadrature modes are offered: an exponential
trapezoid (second order) and an interaction-picture Runge-Kutta built on
one midpoint time level (classical Simpson weights, fourth order).  With
the nonlinearity switched off both reduce to the exact linear propagator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import spectral
from .decaylab import DatumKind, DatumSpec, DecaySeries, effective_band, make_datum
from .spectral import EvolutionState, GridGeometry, SpectralField
from .theory import LebesguePair, log_power, predict


class RunStatus(enum.Enum):
    COMPLETED_GLOBAL = "CompletedGlobal"
    BLOWUP_DETECTED = "BlowupDetected"
    QUADRATURE_FAILURE = "QuadratureFailure"


class NonlinearQuadrature(enum.Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


# ---------------------------------------------------------------------------
# Spectral helpers


@lru_cache(maxsize=32)
def _dealias_mask(dim, points, half_width):
    """2/3-rule mask: zero the top third of the index range per axis."""
    keep = np.abs(np.fft.fftfreq(points) * points) <= points / 3.0
    mask = keep
    for _ in range(dim - 1):
        mask = np.logical_and.outer(mask, keep)
    mask = mask.astype(float)
    mask.setflags(write=False)
    return mask


def nonlinearity(fld: SpectralField, alpha: float, dealias: bool = True) -> SpectralField:
    """|u|^alpha evaluated pointwise on the grid, spectrally de-aliased."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    g = fld.geometry
    vals = np.abs(fld.values) ** alpha
    out = SpectralField.from_values(g, vals)
    if dealias:
        mask = _dealias_mask(g.dim, g.points, g.half_width)
        return SpectralField.from_coeffs(g, out.coeffs * mask)
    return out


class _Rotation:
    """Cached trig tables for the exact linear flow over a fixed increment."""

    def __init__(self, geometry: GridGeometry, dt: float):
        om = spectral.dispersion(geometry.xi_squared())
        self.cos = np.cos(dt * om)
        self.sin_over = np.sin(dt * om) / om
        self.minus_om_sin = -om * np.sin(dt * om)

    def full(self, uc, vc):
        return (
            self.cos * uc + self.sin_over * vc,
            self.minus_om_sin * uc + self.cos * vc,
        )

    def forcing(self, gc):
        """Action on a pure velocity forcing (0, g)."""
        return self.sin_over * gc, self.cos * gc


def _nl_coeffs(geometry, uc, alpha, mask, scale):
    """De-aliased spectrum of |u|^alpha from the spectrum of u."""
    if scale == 0.0:
        return np.zeros_like(uc)
    vals = SpectralField.from_coeffs(geometry, uc).values
    out = SpectralField.from_values(geometry, np.abs(vals) ** alpha).coeffs
    return scale * (out * mask)


def _step_arrays(geometry, uc, vc, alpha, rot_full, rot_half, quadrature, mask,
                 scale, dt):
    """One exponential-integrator step on raw coefficient arrays."""
    k1 = _nl_coeffs(geometry, uc, alpha, mask, scale)
    au, av = rot_full.full(uc, vc)
    if quadrature is NonlinearQuadrature.TRAPEZOID:
        f1u, f1v = rot_full.forcing(k1)
        k2 = _nl_coeffs(geometry, au + dt * f1u, alpha, mask, scale)
        # endpoint forcing (0, k2) needs no rotation and has no u component
        return au + 0.5 * dt * f1u, av + 0.5 * dt * (f1v + k2)
    # interaction-picture RK4 (Simpson weights, one midpoint time level)
    y2u, _ = rot_half.full(uc, vc + 0.5 * dt * k1)
    k2 = _nl_coeffs(geometry, y2u, alpha, mask, scale)
    # stage 3 argument: R(h/2) y_n + (h/2)(0, k2); the added forcing is pure
    # velocity, so the displacement the nonlinearity reads is unchanged
    y3u, _ = rot_half.full(uc, vc)
    k3 = _nl_coeffs(geometry, y3u, alpha, mask, scale)
    h3u, _ = rot_half.forcing(k3)
    y4u = au + dt * h3u
    k4 = _nl_coeffs(geometry, y4u, alpha, mask, scale)
    f1u, f1v = rot_full.forcing(k1)
    f23u, f23v = rot_half.forcing(k2 + k3)
    new_u = au + dt / 6.0 * (f1u + 2.0 * f23u)
    new_v = av + dt / 6.0 * (f1v + 2.0 * f23v + k4)
    return new_u, new_v


def duhamel_step(state: EvolutionState, dt: float, alpha: float,
                 quadrature=NonlinearQuadrature.SIMPSON,
                 nonlinearity_scale: float = 1.0) -> EvolutionState:
    """Advance the semilinear state by one step.

    Exact linear rotation plus variation-of-constants quadrature of the
    forcing |u|^alpha; nonlinearity_scale = 0 reproduces the linear
    propagator to roundoff (diagnostic mode).  Non-finite stage values
    raise a QuadratureFailure error.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    quadrature = NonlinearQuadrature(quadrature)
    g = state.geometry
    rot_full = _Rotation(g, dt)
    rot_half = _Rotation(g, 0.5 * dt)
    mask = _dealias_mask(g.dim, g.points, g.half_width)
    uc, vc = _step_arrays(g, state.u.coeffs, state.ut.coeffs, alpha, rot_full,
                          rot_half, quadrature, mask, nonlinearity_scale, dt)
    if not (np.all(np.isfinite(uc.view(float))) and np.all(np.isfinite(vc.view(float)))):
        raise FloatingPointError("non-finite stage value in Duhamel step")
    return EvolutionState(
        state.t + dt,
        SpectralField.from_coeffs(g, uc),
        SpectralField.from_coeffs(g, vc),
    )


# ---------------------------------------------------------------------------
# Full runs


@dataclass(frozen=True)
class SemilinearConfig:
    dimension: int
    points: int
    half_width: float
    alpha: float
    epsilon: float
    dt: float
    horizon: float
    u1: DatumSpec = field(default_factory=lambda: DatumSpec(
        DatumKind.SMOOTH_BUMP, {"radius": 1.0}))
    u0: Optional[DatumSpec] = None
    quadrature: NonlinearQuadrature = NonlinearQuadrature.SIMPSON
    # dense sampling: the mass term makes every norm oscillate at unit
    # frequency, and slope fits need many pseudo-random phases to average it
    q_invs: tuple = (Fraction(1, 2), Fraction(0))
    samples_per_decade: int = 150
    first_sample: float = 0.5
    blowup_factor: float = 1e6
    enforce_domain: bool = True
    nonlinearity_scale: float = 1.0

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1")
        if self.epsilon < 0 or self.dt <= 0 or self.horizon <= self.dt:
            raise ValueError("need epsilon >= 0 and 0 < dt < horizon")

    @property
    def geometry(self) -> GridGeometry:
        return GridGeometry(self.dimension, self.points, self.half_width)


@dataclass
class RunRecord:
    times: np.ndarray
    series: DecaySeries
    status: RunStatus
    weighted_norm_history: dict  # q_inv -> sup_t (1+t)^w(q) (log(e+t))^-gamma ||u||_q
    epsilon: float
    blowup_time: Optional[float] = None


def decay_weight(q_inv, n: int) -> float:
    """X(T)-norm weight w(q) = (n/4)(1 - 1/q) - (n/4) beta(1, q)."""
    pred = predict(LebesguePair(Fraction(1), Fraction(q_inv)), n)
    return -float(pred.large_time_exponent)


def _sample_indices(cfg: SemilinearConfig) -> np.ndarray:
    steps = int(round(cfg.horizon / cfg.dt))
    if abs(steps * cfg.dt - cfg.horizon) > 1e-9 * cfg.horizon:
        raise ValueError("dt must divide the horizon")
    first = max(cfg.first_sample, cfg.dt)
    decades = math.log10(cfg.horizon / first)
    count = max(2, int(decades * cfg.samples_per_decade) + 1)
    targets = np.geomspace(first, cfg.horizon, count)
    idx = np.unique(np.clip(np.round(targets / cfg.dt).astype(int), 1, steps))
    return idx


def run(cfg: SemilinearConfig) -> RunRecord:
    """Time-march to the horizon or blow-up, recording norms at geometric
    sample times (snapped to step multiples) and the weighted norm history."""
    g = cfg.geometry
    u1 = make_datum(cfg.u1, g)
    if cfg.enforce_domain:
        spectral.check_wraparound(g, cfg.u1.x_support(g),
                                  effective_band(u1, cfg.horizon), cfg.horizon)
    uc = np.zeros(g.shape, dtype=complex)
    if cfg.u0 is not None:
        uc = cfg.epsilon * make_datum(cfg.u0, g).coeffs
    vc = cfg.epsilon * u1.coeffs
    initial_scale = max(
        spectral.lp_norm(SpectralField.from_coeffs(g, uc), 0, refine=1),
        spectral.lp_norm(SpectralField.from_coeffs(g, vc), 0, refine=1),
        1e-300,
    )
    threshold = cfg.blowup_factor * initial_scale
    sup_proxy_measure = (2.0 * g.half_width) ** (-g.dim)

    rot_full = _Rotation(g, cfg.dt)
    rot_half = _Rotation(g, 0.5 * cfg.dt)
    mask = _dealias_mask(g.dim, g.points, g.half_width)
    steps = int(round(cfg.horizon / cfg.dt))
    sample_idx = set(_sample_indices(cfg).tolist())

    times, norm_rows = [], []
    status = RunStatus.COMPLETED_GLOBAL
    blowup_time = None
    for step in range(1, steps + 1):
        uc, vc = _step_arrays(g, uc, vc, cfg.alpha, rot_full, rot_half,
                              cfg.quadrature, mask, cfg.nonlinearity_scale,
                              cfg.dt)
        t = step * cfg.dt
        proxy = float(np.sum(np.abs(uc))) * sup_proxy_measure
        if not math.isfinite(proxy):
            status = RunStatus.QUADRATURE_FAILURE
            blowup_time = t
            break
        if proxy > threshold:
            status = RunStatus.BLOWUP_DETECTED
            blowup_time = t
            break
        if step in sample_idx:
            fld = SpectralField.from_coeffs(g, uc)
            times.append(t)
            norm_rows.append([spectral.lp_norm(fld, q) for q in cfg.q_invs])

    times = np.asarray(times)
    norms = {
        Fraction(q): np.array([row[i] for row in norm_rows])
        for i, q in enumerate(cfg.q_invs)
    }
    datum_norms = {Fraction(1): spectral.lp_norm(u1, 1)}
    series = DecaySeries(times, norms, datum_norms)
    weighted = {}
    for q in cfg.q_invs:
        w = decay_weight(q, g.dim)
        gam = float(log_power(LebesguePair(Fraction(1), Fraction(q))))
        factor = (1.0 + times) ** w / np.log(math.e + times) ** gam
        weighted[Fraction(q)] = float(np.max(factor * norms[Fraction(q)])) if times.size else 0.0
    return RunRecord(times, series, status, weighted, cfg.epsilon, blowup_time)


def find_epsilon0(make_config, lo: float, hi: float, iters: int = 7,
                  growth_bound: float = 3.0):
    """Empirical smallness threshold by bisection on the datum amplitude.

    make_config(epsilon) must build a SemilinearConfig.  An amplitude is
    accepted when the run completes and its weighted norm history stays
    bounded (late-window weighted sup at most growth_bound times the early
    one).  Returns (largest accepted epsilon, its RunRecord).
    """

    def acceptable(eps):
        cfg = make_config(eps)
        rec = run(cfg)
        if rec.status is not RunStatus.COMPLETED_GLOBAL:
            return False, rec
        t = rec.times
        half = t[-1] / 2.0
        for q, track in rec.series.norms.items():
            weighted = (1.0 + t) ** decay_weight(q, cfg.dimension) * track
            early = float(np.max(weighted[t <= half]))
            late = float(np.max(weighted[t > half]))
            if late > growth_bound * max(early, 1e-300):
                return False, rec
        return True, rec

    ok_lo, rec_lo = acceptable(lo)
    if not ok_lo:
        raise RuntimeError(f"even epsilon = {lo:g} is not accepted")
    ok_hi, rec_hi = acceptable(hi)
    if ok_hi:
        return hi, rec_hi
    best, best_rec = lo, rec_lo
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        ok, rec = acceptable(mid)
        if ok:
            best, best_rec = mid, rec
            lo = mid
        else:
            hi = mid
    return best, best_rec


# ---------------------------------------------------------------------------
# Fixed-point diagnostics


def contraction_diagnostic(cfg: SemilinearConfig, iterations: int = 4,
                           time_steps: int = 32) -> list:
    """Successive distance ratios of Picard iterates of the Duhamel map.

    Starting from the linear trajectory, each iterate applies
    u -> u_lin + int_0^t K(t - s) * |u(s)|^alpha ds on a shared time grid
    (composite trapezoid in s).  Returned are the ratios
    d_{j+1}/d_j of successive X(T)-style distances; for small data these
    are below 1 and shrink with the horizon.  Ratios are truncated once a
    distance underflows to zero.
    """
    if cfg.horizon > 1.0:
        raise ValueError("contraction diagnostic is meant for horizons <= 1")
    g = cfg.geometry
    taus = np.linspace(0.0, cfg.horizon, time_steps + 1)
    u1c = cfg.epsilon * make_datum(cfg.u1, g).coeffs
    u0c = cfg.epsilon * make_datum(cfg.u0, g).coeffs if cfg.u0 is not None \
        else np.zeros(g.shape, dtype=complex)
    om = spectral.dispersion(g.xi_squared())
    mask = _dealias_mask(g.dim, g.points, g.half_width)

    lin = [np.cos(t * om) * u0c + np.sin(t * om) / om * u1c for t in taus]

    def duhamel(traj):
        """Nonlinear part of the Duhamel map along the whole trajectory."""
        forcings = [
            _nl_coeffs(g, ucoef, cfg.alpha, mask, cfg.nonlinearity_scale)
            for ucoef in traj
        ]
        out = [np.zeros_like(u0c)]
        h = taus[1] - taus[0]
        for i in range(1, len(taus)):
            acc = np.zeros_like(u0c)
            for j in range(i + 1):
                wgt = 0.5 * h if j in (0, i) else h
                lag = taus[i] - taus[j]
                acc += wgt * (np.sin(lag * om) / om) * forcings[j]
            out.append(acc)
        return out

    def distance(nl_a, nl_b):
        worst = 0.0
        for i in range(len(taus)):
            fld = SpectralField.from_coeffs(g, nl_a[i] - nl_b[i])
            for q in cfg.q_invs:
                w = decay_weight(q, g.dim)
                val = (1.0 + taus[i]) ** w * spectral.lp_norm(fld, q, refine=1)
                worst = max(worst, val)
        return worst

    zero = [np.zeros_like(u0c) for _ in taus]
    nl_prev = zero  # u^(0) = u_lin has zero nonlinear part
    traj = lin
    distances = []
    for _ in range(iterations + 1):
        nl_next = duhamel(traj)
        distances.append(distance(nl_next, nl_prev))
        nl_prev = nl_next
        traj = [lin[i] + nl_next[i] for i in range(len(taus))]
    ratios = []
    for d_prev, d_next in zip(distances[:-1], distances[1:]):
        if d_prev <= 0.0:
            break
        ratios.append(d_next / d_prev)
    return ratios


# ---------------------------------------------------------------------------
# Auxiliary convolution integral


@dataclass(frozen=True)
class AuxiliaryIntegral:
    value: float
    envelope: float
    branch: str

    @property
    def ratio(self) -> float:
        return self.value / self.envelope


def auxiliary_integral(nu: float, mu: float, t: float, exponential: bool = False,
                       c: float = 1.0, nodes: int = 400) -> AuxiliaryIntegral:
    """int_0^t (t-s)^nu (1+s)^mu ds (optionally with exp(-c(t-s))) together
    with its predicted envelope.

    Envelope branches: (1+t)^nu for mu < -1, (1+t)^nu log(e+t) for mu = -1,
    (1+t)^(1+nu+mu) for mu > -1; the exponential variant is bounded by
    (1+t)^mu.  The endpoint singularity (t-s)^nu is removed exactly by the
    substitution t - s = z^(1/(1+nu)).
    """
    if nu <= -1:
        raise ValueError("nu must exceed -1")
    if t <= 0:
        raise ValueError("t must be positive")
    p = 1.0 / (1.0 + nu)
    x, w = np.polynomial.legendre.leggauss(nodes)
    upper = t ** (1.0 + nu)
    z = 0.5 * upper * (x + 1.0)
    wz = 0.5 * upper * w
    lag = z**p  # = t - s
    vals = (1.0 + t - lag) ** mu
    if exponential:
        vals = vals * np.exp(-c * lag)
    value = float(np.dot(vals, wz)) * p
    if exponential:
        envelope, branch = (1.0 + t) ** mu, "exponential"
    elif mu < -1.0:
        envelope, branch = (1.0 + t) ** nu, "mu<-1"
    elif mu == -1.0:
        envelope, branch = (1.0 + t) ** nu * math.log(math.e + t), "mu=-1"
    else:
        envelope, branch = (1.0 + t) ** (1.0 + nu + mu), "mu>-1"
    return AuxiliaryIntegral(value, envelope, branch)

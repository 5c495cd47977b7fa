"""Independent radial-kernel oracle: Bessel representation and stationary phase.

For radial data given by a compactly supported spectral profile f_hat(r) the
action of the propagator kernel can be written as a one-dimensional
oscillatory integral against a Bessel function,

    K(t) * f (x) = (2 pi)^(-n/2) |x|^(1 - n/2)
                   int_0^inf  sin(t w(r)) / w(r) * f_hat(r)
                              * J_{(n-2)/2}(|x| r) * r^(n/2)  dr,

with w(r) = sqrt(1 + r^4).  Transforms follow the non-unitary convention
f_hat(xi) = int f(x) exp(-i xi . x) dx used by the FFT pipeline, hence the
(2 pi)^(-n/2) prefactor; this path never touches a grid and serves as the
cross-check oracle for the spectral propagator.

The quadrature is deliberately plain: panels sized so that each sees at most
pi/4 of phase change, Gauss-Legendre nodes inside every panel.  At desk scale
(t <= 1e4) this is affordable and easy to trust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .spectral import dispersion

_SERIES_ASYMPTOTIC_SWITCH = 12.0


class QuadratureBudgetError(RuntimeError):
    """Raised when the oscillatory quadrature panel budget is exceeded."""


# ---------------------------------------------------------------------------
# Bessel functions


def _bessel_series(nu: float, z: np.ndarray) -> np.ndarray:
    """Ascending series, reliable for z below the asymptotic switch point."""
    zh = z / 2.0
    term = zh**nu / math.gamma(nu + 1.0)
    total = term.copy()
    z2 = -(zh * zh)
    for k in range(1, 200):
        term = term * z2 / (k * (nu + k))
        total += term
        if np.max(np.abs(term)) < 1e-17 * max(np.max(np.abs(total)), 1e-300):
            break
    return total


def _bessel_asymptotic(nu: float, z: np.ndarray) -> np.ndarray:
    """Large-argument expansion J_nu ~ sqrt(2/(pi z)) (P cos chi - Q sin chi).

    Terms are accumulated until they stop decreasing (the expansion is
    asymptotic); for z >= 12 and moderate nu the smallest term is far below
    double precision.
    """
    mu = 4.0 * nu * nu
    inv = 1.0 / z
    p_sum = np.ones_like(z)
    q_sum = np.zeros_like(z)
    c = 1.0
    term = np.ones_like(z)
    prev = np.inf
    for m in range(1, 40):
        c *= (mu - (2 * m - 1) ** 2) / (8.0 * m)
        term = c * inv**m
        size = np.max(np.abs(term))
        if size >= prev or size < 1e-18:
            break
        prev = size
        sign = (-1.0) ** (m // 2)
        if m % 2 == 0:
            p_sum += sign * term
        else:
            q_sum += sign * term
    chi = z - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * (p_sum * np.cos(chi) - q_sum * np.sin(chi))


def bessel_j(nu: float, z) -> np.ndarray:
    """Bessel function of the first kind, nu >= -1/2, z >= 0.

    Half-integer orders +-1/2 use their closed forms at every argument;
    otherwise the ascending series is used below z = 12 and the corrected
    large-argument expansion above.  Relative accuracy ~1e-10 away from
    zeros of J_nu.
    """
    if nu < -0.5:
        raise ValueError("order must satisfy nu >= -1/2")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(z < 0):
        raise ValueError("argument must be nonnegative")
    out = np.empty_like(z)
    if nu == 0.5:
        nz = z > 0
        out[~nz] = 0.0
        out[nz] = np.sqrt(2.0 / (math.pi * z[nz])) * np.sin(z[nz])
    elif nu == -0.5:
        nz = z > 0
        out[~nz] = np.inf
        out[nz] = np.sqrt(2.0 / (math.pi * z[nz])) * np.cos(z[nz])
    else:
        small = z < _SERIES_ASYMPTOTIC_SWITCH
        if np.any(small):
            out[small] = _bessel_series(nu, z[small])
        if np.any(~small):
            out[~small] = _bessel_asymptotic(nu, z[~small])
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Radial profiles


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial spectral datum f_hat sampled on nodes, supported away from 0.

    values must vanish at (and implicitly beyond) the support endpoints;
    evaluation between nodes is by cubic spline, zero outside the support.
    """

    nodes: np.ndarray
    values: np.ndarray
    support: tuple

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 8:
            raise ValueError("need matching 1-d nodes/values with >= 8 samples")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be increasing and strictly positive")
        lo, hi = self.support
        if not 0 < lo < hi:
            raise ValueError("support must satisfy 0 < r_lo < r_hi")
        scale = np.max(np.abs(values)) or 1.0
        edge = max(abs(values[0]), abs(values[-1]))
        if edge > 1e-9 * scale:
            raise ValueError("profile must vanish at the support endpoints")

    @classmethod
    def from_function(cls, fn, r_lo: float, r_hi: float, num: int = 4097):
        nodes = np.linspace(r_lo, r_hi, num)
        return cls(nodes, np.asarray(fn(nodes), dtype=float), (r_lo, r_hi))

    @cached_property
    def _spline(self):
        return CubicSpline(self.nodes, self.values)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        lo, hi = self.support
        inside = (r >= lo) & (r <= hi)
        out = np.zeros_like(r)
        if np.any(inside):
            out[inside] = self._spline(r[inside])
        return out

    def reduced_amplitude(self, r, n: int) -> np.ndarray:
        """g(r) = f_hat(r) r^((n-1)/2) / w(r), the stationary-phase amplitude."""
        r = np.asarray(r, dtype=float)
        return self(r) * r ** ((n - 1) / 2.0) / dispersion(r * r)


# ---------------------------------------------------------------------------
# Oscillatory quadrature


@lru_cache(maxsize=8)
def _gauss_legendre(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


def _phase_panels(r_lo: float, r_hi: float, rate_fn, max_panels: int,
                  chunks: int = 16, max_phase: float = math.pi / 4.0):
    """Panel edges over [r_lo, r_hi] sized by the local phase derivative.

    The interval is cut into chunks; inside each chunk panels are uniform
    with width max_phase / (local max rate), so every panel sees at most
    max_phase of phase change.
    """
    edges_parts = []
    cuts = np.linspace(r_lo, r_hi, chunks + 1)
    total = 0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        rate = float(np.max(rate_fn(np.linspace(lo, hi, 9))))
        width = max_phase / max(rate, 1e-12)
        count = max(1, int(math.ceil((hi - lo) / width)))
        total += count
        if total > max_panels:
            raise QuadratureBudgetError(
                f"oscillatory quadrature needs more than {max_panels} panels "
                f"on [{r_lo:g}, {r_hi:g}]"
            )
        edges_parts.append(np.linspace(lo, hi, count + 1)[:-1])
    edges_parts.append(np.array([r_hi]))
    return np.concatenate(edges_parts)


def _panel_integrate(integrand, edges: np.ndarray, nodes_per_panel: int = 8) -> float:
    gx, gw = _gauss_legendre(nodes_per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    wts = (half[:, None] * gw[None, :]).ravel()
    return float(np.dot(integrand(pts), wts))


def radial_convolution(profile: RadialProfile, t: float, x_abs: float, n: int,
                       max_panels: int = 2_000_000) -> float:
    """Kernel action K(t) * f at radius |x| = x_abs via the Bessel integral.

    Adaptive phase-tied panels with Gauss-Legendre nodes; raises
    QuadratureBudgetError rather than silently truncating when the panel
    budget is exceeded.
    """
    if t < 0 or x_abs <= 0:
        raise ValueError("need t >= 0 and x_abs > 0")
    lo, hi = profile.support
    nu = (n - 2) / 2.0

    def rate(r):
        om = dispersion(r * r)
        return t * 2.0 * r**3 / om + x_abs

    def integrand(r):
        om = dispersion(r * r)
        return (np.sin(t * om) / om) * profile(r) * bessel_j(nu, x_abs * r) * r ** (n / 2.0)

    edges = _phase_panels(lo, hi, rate, max_panels)
    raw = _panel_integrate(integrand, edges)
    return (2.0 * math.pi) ** (-n / 2.0) * x_abs ** (1.0 - n / 2.0) * raw


def phase_branch_integrals(profile: RadialProfile, t: float, x_abs: float, n: int,
                           max_panels: int = 2_000_000) -> tuple:
    """The two oscillatory branches (I_plus, I_minus) of the kernel integral.

    I_pm = int sin(t w(r) +- (|x| r - (n-1) pi/4)) g(r) dr with the reduced
    amplitude g.  The aligned branch I_minus carries a stationary point and
    decays like t^(-1/2); I_plus has no stationary point and decays like
    t^(-1).  Used by the decay-separation diagnostics.
    """
    lo, hi = profile.support
    shift = (n - 1) * math.pi / 4.0
    results = []
    for sign in (+1.0, -1.0):

        def rate(r, s=sign):
            om = dispersion(r * r)
            return np.abs(t * 2.0 * r**3 / om + s * x_abs) + 1.0

        def integrand(r, s=sign):
            om = dispersion(r * r)
            return np.sin(t * om + s * (x_abs * r - shift)) * profile.reduced_amplitude(r, n)

        edges = _phase_panels(lo, hi, rate, max_panels, chunks=64)
        results.append(_panel_integrate(integrand, edges))
    return tuple(results)


# ---------------------------------------------------------------------------
# Stationary phase


@dataclass(frozen=True)
class StationaryData:
    """Stationary radius r0 of the aligned phase h(r) = w(r) - (|x|/t) r."""

    r0: float
    h_r0: float  # w(r0) - (|x|/t) r0, without the dimensional pi/(4t) shift
    x_over_t: float


def _group_speed(r):
    """2 r^3 / w(r): radial derivative of the dispersion relation."""
    return 2.0 * r**3 / dispersion(r * r)


def _phase_curvature(r):
    """h''(r) = 2 r^2 (3 + r^4) / w(r)^3, strictly positive for r > 0."""
    return 2.0 * r**2 * (3.0 + r**4) / dispersion(r * r) ** 3


def stationary_point(x_over_t: float) -> StationaryData:
    """Unique root of 2 r^3 / w(r) = |x|/t, by safeguarded Newton.

    The left side is strictly increasing from 0 to infinity, so the root
    exists and is unique; Newton falls back to bisection whenever a step
    leaves the current bracket.  Residual is driven below 1e-12.
    """
    v = float(x_over_t)
    if not v > 0:
        raise ValueError("x_over_t must be positive")
    lo, hi = 0.0, max(1.0, v)
    while _group_speed(hi) < v:
        hi *= 2.0
    r = max((v / 2.0) ** (1.0 / 3.0), v / 2.0)
    r = min(max(r, lo), hi)
    for _ in range(100):
        f = _group_speed(r) - v
        if f > 0:
            hi = r
        else:
            lo = r
        step = f / _phase_curvature(r)
        r_new = r - step
        if not lo < r_new < hi:
            r_new = 0.5 * (lo + hi)
        if abs(r_new - r) < 1e-16 * max(1.0, r):
            r = r_new
            break
        r = r_new
    residual = abs(_group_speed(r) - v)
    if residual > 1e-12 * max(1.0, v):
        raise RuntimeError(f"stationary point did not converge, residual {residual:g}")
    return StationaryData(r, dispersion(r * r) - v * r, v)


def stationary_points(x_over_t: np.ndarray) -> np.ndarray:
    """Vectorized stationary radii (bisection; used for cheap phase scans)."""
    v = np.asarray(x_over_t, dtype=float)
    lo = np.zeros_like(v)
    hi = np.maximum(1.0, v)
    grow = _group_speed(hi) < v
    while np.any(grow):
        hi[grow] *= 2.0
        grow = _group_speed(hi) < v
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        high = _group_speed(mid) > v
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class StationaryPhaseValue:
    value: float
    r0: float
    amplitude: float
    phase: float
    sine: float
    in_support: bool


def stationary_phase_details(profile: RadialProfile, t: float, x_abs: float,
                             n: int) -> StationaryPhaseValue:
    """Leading-order stationary-phase approximation of K(t) * f at |x|.

    value = (2 pi)^(-n/2) |x|^((1-n)/2) g(r0) (t h''(r0))^(-1/2) sin(Theta)
    with Theta = t (w(r0) - (|x|/t) r0) + n pi/4.  When r0 falls outside the
    profile support there is no stationary contribution and the value is 0
    with in_support=False.
    """
    if t <= 0 or x_abs <= 0:
        raise ValueError("need t > 0 and x_abs > 0")
    sp = stationary_point(x_abs / t)
    lo, hi = profile.support
    inside = lo < sp.r0 < hi
    phase = t * sp.h_r0 + (n - 1) * math.pi / 4.0 + math.pi / 4.0
    sine = math.sin(phase)
    amp = 0.0
    if inside:
        g0 = float(profile.reduced_amplitude(sp.r0, n))
        amp = (
            (2.0 * math.pi) ** (-n / 2.0)
            * x_abs ** ((1.0 - n) / 2.0)
            * g0
            / math.sqrt(t * _phase_curvature(sp.r0))
        )
    return StationaryPhaseValue(amp * sine, sp.r0, amp, phase, sine, inside)


def stationary_phase_value(profile: RadialProfile, t: float, x_abs: float,
                           n: int) -> float:
    return stationary_phase_details(profile, t, x_abs, n).value


# ---------------------------------------------------------------------------
# Oscillatory-integral bound diagnostic


def vdc_bound_check(phase_derivative_min: float, interval: tuple, phase_fn,
                    min_nodes: int = 4001) -> float:
    """Evaluate G = int exp(i h(y)) dy and return |G| * lambda.

    The first-derivative bound says |G| <= C / lambda for monotone convex or
    concave phases with |h'| >= lambda, so the returned product must stay
    bounded as lambda grows.  The caller promises the hypotheses; a
    nonpositive lambda (degenerate phase) is rejected.
    """
    lam = float(phase_derivative_min)
    if lam <= 0:
        raise ValueError("phase derivative bound must be positive")
    beta, gamma_ = interval
    if not gamma_ > beta:
        raise ValueError("empty interval")
    coarse = phase_fn(np.linspace(beta, gamma_, 257))
    variation = float(np.sum(np.abs(np.diff(coarse))))
    count = max(min_nodes, int(60 * variation / (2 * math.pi)))
    if count % 2 == 0:
        count += 1
    y = np.linspace(beta, gamma_, count)
    f = np.exp(1j * phase_fn(y))
    h = (gamma_ - beta) / (count - 1)
    weights = np.ones(count)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    g_val = np.dot(weights, f) * h / 3.0
    return float(abs(g_val)) * lam


# ---------------------------------------------------------------------------
# Optimality probe


def annulus_feasibility_threshold() -> float:
    """Smallest a for which the annulus rule b = sqrt(2) a^3/(4+a^2) yields
    b > a; equals sqrt(4/(sqrt(2)-1))."""
    return math.sqrt(4.0 / (math.sqrt(2.0) - 1.0))


def choose_annulus(a: float) -> tuple:
    """Extreme admissible annulus (a, b) with b = sqrt(2) a^3 / (4 + a^2).

    The choice keeps the stationary phase value bounded away from zero on
    the moving annulus a t < |x| < b t.  Requires a above the feasibility
    threshold so that b > a.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    b = math.sqrt(2.0) * a**3 / (4.0 + a * a)
    if b <= a:
        raise ValueError(
            f"annulus is empty: need sqrt(2) a^3/(4+a^2) > a, i.e. "
            f"a > {annulus_feasibility_threshold():.6f}, got a = {a:g}"
        )
    return a, b


@dataclass(frozen=True)
class OptimalityPoint:
    t: float
    x_star: float
    value: float
    scaled: float  # value * t^(n/2)
    sine: float


def optimality_sequence(profile: RadialProfile, a: float, b: float, t_grid,
                        n: int, x_samples: int = 12,
                        sine_threshold: float = 0.5,
                        max_panels: int = 2_000_000) -> list:
    """Lower-bound probe: times where the kernel is provably large on the
    moving annulus.

    For each candidate t the annulus a t < |x| < b t is scanned; t is kept
    when the aligned-phase sine at the maximizing x is at least the
    threshold, and the annulus max of |K * f| (locally refined over one
    phase wavelength) is recorded together with value * t^(n/2).
    """
    results = []
    for t in np.asarray(t_grid, dtype=float):
        vs = np.linspace(a, b, x_samples + 2)[1:-1]
        xs = vs * t
        vals = np.array(
            [abs(radial_convolution(profile, t, x, n, max_panels)) for x in xs]
        )
        idx = int(np.argmax(vals))
        # refine over one phase wavelength 2 pi / r0 around the coarse max
        r0 = stationary_point(vs[idx]).r0
        wavelength = 2.0 * math.pi / r0
        lo = max(a * t, xs[idx] - 0.6 * wavelength)
        hi = min(b * t, xs[idx] + 0.6 * wavelength)
        xs_fine = np.linspace(lo, hi, 9)
        vals_fine = np.array(
            [abs(radial_convolution(profile, t, x, n, max_panels)) for x in xs_fine]
        )
        jdx = int(np.argmax(vals_fine))
        x_star = float(xs_fine[jdx])
        best = float(vals_fine[jdx])
        det = stationary_phase_details(profile, t, x_star, n)
        if det.sine >= sine_threshold:
            results.append(
                OptimalityPoint(float(t), x_star, best, best * t ** (n / 2.0),
                                det.sine)
            )
    if not results:
        raise RuntimeError(
            "no candidate time satisfied the sine selection; refine the t grid"
        )
    return results

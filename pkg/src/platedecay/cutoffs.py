"""Smooth cutoff machinery shared across the toolkit.

Every cutoff here derives from a single C-infinity transition built on the
classical exp(-1/s) bump.  Writing the transition as a logistic sigmoid
composed with g(s) = 1/(1-s) - 1/s keeps all derivatives up to fourth order
in closed form; the test-function functionals need a bilaplacian of the
spatial cutoff and finite differences of fourth derivatives are far too
noisy near the support edge.

Conventions:
  transition(s):  0 for s <= 0, 1 for s >= 1, strictly increasing between.
  chi(rho):       radial low-pass, 1 on [0, 1], 0 on [2, inf).
  annulus_bump:   chi(rho) - chi(2 rho), supported on [1/2, 2]; its dyadic
                  dilations sum to 1 away from the origin.
"""

from __future__ import annotations

import numpy as np

# Outside this band the transition differs from {0, 1} by less than
# exp(-99); clamping avoids overflow in the 1/s, 1/(1-s) poles.
_EDGE = 1e-2


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def transition(s, order: int = 0):
    """C-infinity step S(s): 0 for s <= 0, 1 for s >= 1.

    S(s) = sigma(g(s)) with sigma the logistic function and
    g(s) = 1/(1-s) - 1/s, equivalent to the usual
    exp(-1/s) / (exp(-1/s) + exp(-1/(1-s))) partition.

    order selects the derivative (0 <= order <= 4), evaluated in closed
    form via Faa di Bruno.  Outside (0, 1) all derivatives vanish.
    """
    if not 0 <= order <= 4:
        raise ValueError("transition supports derivative orders 0..4")
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    out = np.zeros_like(s)
    if order == 0:
        out[s >= 1.0 - _EDGE] = 1.0
    inside = (s > _EDGE) & (s < 1.0 - _EDGE)
    if np.any(inside):
        si = s[inside]
        u = 1.0 / (1.0 - si)
        v = 1.0 / si
        sig = _sigmoid(u - v)
        if order == 0:
            out[inside] = sig
        else:
            sp = sig * (1.0 - sig)  # sigma'
            g1 = u * u + v * v
            if order == 1:
                out[inside] = sp * g1
            else:
                s2 = sp * (1.0 - 2.0 * sig)  # sigma''
                g2 = 2.0 * u**3 - 2.0 * v**3
                if order == 2:
                    out[inside] = s2 * g1**2 + sp * g2
                else:
                    s3 = sp * (1.0 - 6.0 * sig + 6.0 * sig**2)  # sigma'''
                    g3 = 6.0 * u**4 + 6.0 * v**4
                    if order == 3:
                        out[inside] = s3 * g1**3 + 3.0 * s2 * g1 * g2 + sp * g3
                    else:
                        s4 = sp * (1.0 - 2.0 * sig) * (1.0 - 12.0 * sig + 12.0 * sig**2)
                        g4 = 24.0 * u**5 - 24.0 * v**5
                        out[inside] = (
                            s4 * g1**4
                            + 6.0 * s3 * g1**2 * g2
                            + s2 * (3.0 * g2**2 + 4.0 * g1 * g3)
                            + sp * g4
                        )
    return out[0] if scalar else out


def chi(rho):
    """Radial low-pass cutoff: 1 on [0, 1], 0 on [2, inf), smooth between."""
    return transition(2.0 - np.asarray(rho, dtype=float))


def annulus_bump(rho):
    """Dyadic annulus bump supported on [1/2, 2] with unit dyadic partition.

    annulus_bump(rho) = chi(rho) - chi(2 rho); summing dilations by powers
    of two telescopes to 1 for every rho > 0.
    """
    rho = np.asarray(rho, dtype=float)
    return chi(rho) - chi(2.0 * rho)


def plateau_bump(r, lo: float, plateau_lo: float, plateau_hi: float, hi: float):
    """Smooth bump rising on [lo, plateau_lo], equal to 1 on the plateau,
    falling to 0 on [plateau_hi, hi].  Used for compactly supported radial
    spectral profiles.
    """
    if not lo < plateau_lo <= plateau_hi < hi:
        raise ValueError("plateau_bump requires lo < plateau_lo <= plateau_hi < hi")
    r = np.asarray(r, dtype=float)
    up = transition((r - lo) / (plateau_lo - lo))
    down = transition((hi - r) / (hi - plateau_hi))
    return up * down

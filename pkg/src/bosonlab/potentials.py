"""Hartree potential via Newton's theorem, and the canonical rescaling.

For a radial density u^2 the Coulomb convolution reduces to

    V_u(r) = 4*pi * [ (1/r) int_0^r s^2 u(s)^2 ds + int_r^inf s u(s)^2 ds ]

which is a pair of cumulative sums on the grid, O(n) total.  The shifted
potential is Phi_u = V_u(0) - V_u; it is nonnegative and non-decreasing.

Quadrature detail: the kernel 1/max(r, s) has a derivative jump at s = r,
so plain trapezoid sums are only O(h^2) with a large constant.  The
Euler-Maclaurin correction for that kink is the local term
-(pi/3) h^2 u(r)^2, applied to V at every node.  V(0) picks up the
endpoint correction +4*pi*(h^2/12)*u(0)^2, with u(0) evaluated from the
sine series (the grid itself has no node at the origin).

The canonical rescaling u -> mu^(3/2) u(mu .) with mu = 1/(V_u(0) - lambda)
normalizes V(0) - lambda = 1, which is the form in which the halfspace
boundary condition carries the coefficient (Phi_u - 1).  Derivation: under
u_mu = mu^(3/2) u(mu .), both the eigenvalue and V(0) scale by mu, so
requiring mu*V(0) - mu*lambda = 1 forces mu = 1/(V(0) - lambda).  Mass is
invariant along the family (L2-critical scaling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

from .errors import RescaleImpossible
from .radial import RadialGrid, RadialProfile, mass


@dataclass(frozen=True, eq=False)
class PotentialPair:
    """V_u, its value at the origin, and Phi_u = V0 - V."""

    V: RadialProfile
    V0: float
    Phi: RadialProfile

    @property
    def grid(self) -> RadialGrid:
        return self.V.grid


def value_at_origin(u: RadialProfile) -> float:
    """u(0) from the sine-series representation of r*u(r)."""
    g = u.grid
    coef = (2.0 / (g.n + 1)) * 0.5 * dst(g.r * u.values, type=1)
    return float(np.sum(coef * g.rho))


def newton_potential(u: RadialProfile) -> PotentialPair:
    g = u.grid
    q2 = u.values**2
    inner = np.cumsum(g.r**2 * q2) * g.h          # int_0^r s^2 u^2 ds
    outer_total = np.sum(g.r * q2) * g.h          # int_0^rmax s u^2 ds
    outer = outer_total - np.cumsum(g.r * q2) * g.h
    V = 4.0 * np.pi * (inner / g.r + outer) - (np.pi / 3.0) * g.h**2 * q2
    u0 = value_at_origin(u)
    V0 = 4.0 * np.pi * outer_total + 4.0 * np.pi * (g.h**2 / 12.0) * u0**2
    Vp = RadialProfile(g, V)
    return PotentialPair(Vp, V0, RadialProfile(g, V0 - V))


def newton_potential_direct(u: RadialProfile) -> PotentialPair:
    """O(n^2) double-quadrature oracle for newton_potential.

    Evaluates V(r_i) = 4*pi*sum_j s_j^2 u_j^2 h / max(r_i, s_j) from the
    max-kernel directly, with the same kink and endpoint corrections, so
    the two routes must agree to rounding.
    """
    g = u.grid
    q2 = u.values**2
    kernel = 1.0 / np.maximum.outer(g.r, g.r)
    V = 4.0 * np.pi * kernel @ (g.r**2 * q2 * g.h) - (np.pi / 3.0) * g.h**2 * q2
    u0 = value_at_origin(u)
    V0 = 4.0 * np.pi * np.sum(g.r * q2 * g.h) + 4.0 * np.pi * (g.h**2 / 12.0) * u0**2
    Vp = RadialProfile(g, V)
    return PotentialPair(Vp, V0, RadialProfile(g, V0 - V))


def potential_tail(pair: PotentialPair, r):
    """Far-field continuation V(r) = mass(u)/r for r beyond the grid."""
    m = float(pair.V.values[-1] * pair.grid.r[-1])
    return m / np.asarray(r, dtype=float)


def resample_scaled(u: RadialProfile, mu: float) -> RadialProfile:
    """Evaluate mu^(3/2) u(mu r) on u's own grid via the sine series.

    Points mu*r_j beyond the last node are set to zero (the profiles of
    interest decay like r^-4, so the truncated tail is negligible).
    """
    g = u.grid
    coef = (2.0 / (g.n + 1)) * 0.5 * dst(g.r * u.values, type=1)
    x = mu * g.r
    inside = x <= g.r[-1]
    vals = np.zeros(g.n)
    xs = x[inside]
    # sine-series evaluation at off-grid points
    vals[inside] = (np.sin(np.outer(xs, g.rho)) @ coef) / xs
    return RadialProfile(g, mu**1.5 * vals)


def canonical_rescale(u: RadialProfile, lam: float) -> tuple[RadialProfile, float]:
    """Rescale a solution with eigenvalue lam so that V(0) - lambda = 1."""
    pair = newton_potential(u)
    if pair.V0 <= lam:
        raise RescaleImpossible(
            f"V(0) = {pair.V0:.6g} <= lambda = {lam:.6g}; not a ground-state-like input"
        )
    mu = 1.0 / (pair.V0 - lam)
    return resample_scaled(u, mu), mu


def rescale_defect(u: RadialProfile) -> float:
    """|V_u(0) - lambda - 1| for the eigenvalue lam = V_u(0) - 1 implied by
    the canonical normalization, measured through the equation residual.

    A canonically rescaled near-solution satisfies the equation with
    lam = V(0) - 1 to discretization accuracy; anything else (wrong
    amplitude, wrong scale) leaves an O(1) residual.
    """
    from .ground_state import residual  # local import, avoids a cycle

    pair = newton_potential(u)
    lam = pair.V0 - 1.0
    if lam <= 0:
        return np.inf
    return residual(u, lam)

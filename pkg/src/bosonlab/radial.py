"""Radial grids, the 3D radial Fourier transform, and sector operators.

A radial function f(|x|) on R^3 is sampled at the interior nodes r_j = j*h
of a uniform grid truncated at r_max.  The product r*f(r) vanishes at both
ends of [0, r_max], which makes the type-I discrete sine transform the
natural spectral basis: the 3D radial Fourier transform

    F(rho) = (4*pi/rho) * int_0^inf r*sin(rho*r)*f(r) dr

becomes an exact involution on the grid, and the multiplier rho of the
operator sqrt(-Laplacian) is diagonal in that basis.

Spherical-harmonic sectors l >= 1 carry the same multiplier through the
spherical Bessel transform of order l.  Two discrete realizations are used:

* l = 1: dense quadrature of the completeness integral on the uniform
  frequency grid rho_k = k*pi/r_max.  This shares its quadrature with the
  l = 0 sine route, so discretization errors cancel against profiles
  produced by the sine-basis solver (important for the translation mode).
* l >= 2: spectral calculus in the Dirichlet basis j_l(z_k r / r_max),
  where z_k runs over the positive zeros of j_l.  On this basis the
  multiplier is exactly diagonal (z_k / r_max), which keeps the operator
  positive semidefinite by construction.  The uniform-frequency quadrature
  loses discrete completeness near the origin for l >= 2 and produces
  spurious low modes; the Dirichlet basis does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import dst
from scipy.optimize import brentq
from scipy.special import spherical_jn

from .errors import GridMismatch, QuadratureUnstable

SYMMETRY_TOL = 1e-8


def _frozen_array(a):
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid with its dual frequency grid.

    Interior nodes r_j = j*h, j = 1..n, h = r_max/(n+1).  Quadrature
    weights w_j = 4*pi*r_j^2*h approximate the radial volume integral
    int f * 4*pi*r^2 dr.  Dual nodes rho_k = k*pi/r_max.
    """

    n: int
    r_max: float
    h: float = field(init=False)
    r: np.ndarray = field(init=False, repr=False, compare=False)
    rho: np.ndarray = field(init=False, repr=False, compare=False)
    w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("grid needs at least 4 nodes")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        h = self.r_max / (self.n + 1)
        j = np.arange(1, self.n + 1, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", _frozen_array(j * h))
        object.__setattr__(self, "rho", _frozen_array(j * np.pi / self.r_max))
        object.__setattr__(self, "w", _frozen_array(4.0 * np.pi * (j * h) ** 2 * h))

    @property
    def rho_max(self):
        return self.n * np.pi / self.r_max


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Values of a radial function at the grid nodes."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(
                f"profile length {v.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("profile contains non-finite entries")
        object.__setattr__(self, "values", _frozen_array(v))

    def same_grid(self, other):
        if self.grid != other.grid:
            raise GridMismatch("profiles live on different grids")


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Values of the radial Fourier transform at the dual nodes rho_k."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError("spectral profile length does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectral profile contains non-finite entries")
        object.__setattr__(self, "values", _frozen_array(v))


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """Dense matrix of an operator restricted to spherical-harmonic sector l.

    The matrix acts on node values and is symmetric with respect to the
    grid weights w_j.  ``kind`` is "sqrt_laplacian" or "L_plus".  For
    l >= 2 the Dirichlet-basis data used to assemble the matrix is kept
    so that eigensolves can run in coefficient space, where the kinetic
    part is exactly diagonal.
    """

    ell: int
    grid: RadialGrid
    kind: str
    matrix: np.ndarray
    basis: np.ndarray | None = field(default=None, repr=False, compare=False)
    basis_norms: np.ndarray | None = field(default=None, repr=False, compare=False)
    basis_mult: np.ndarray | None = field(default=None, repr=False, compare=False)
    # For kind "L_plus": the local multiplication part (1 - V_Q) and the
    # weighted exchange kernel, kept so eigensolves can rebuild the operator
    # in the Dirichlet coefficient basis for l >= 2.
    local_diag: np.ndarray | None = field(default=None, repr=False, compare=False)
    exchange: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        defect = weighted_symmetry_defect(self.matrix, self.grid)
        if defect > SYMMETRY_TOL:
            raise QuadratureUnstable(
                f"sector l={self.ell} symmetry defect {defect:.2e} exceeds "
                f"{SYMMETRY_TOL:.0e} (r_max/n mismatch?)"
            )

    def apply(self, f: RadialProfile) -> RadialProfile:
        if f.grid != self.grid:
            raise GridMismatch("profile grid does not match operator grid")
        return RadialProfile(self.grid, self.matrix @ f.values)


def weighted_symmetry_defect(matrix, grid):
    """Relative asymmetry of S = W^(1/2) M W^(-1/2), W = diag(grid.w).

    A w-symmetric operator has S = S^T exactly; quadrature assembled with
    mismatched weights shows up here at O(1).
    """
    sq = np.sqrt(grid.w)
    S = (matrix * sq[:, None]) / sq[None, :]
    return float(np.max(np.abs(S - S.T)) / np.max(np.abs(S)))


# ---------------------------------------------------------------------------
# transforms


def forward_transform(f: RadialProfile) -> SpectralProfile:
    g = f.grid
    s = 0.5 * dst(g.r * f.values, type=1)
    return SpectralProfile(g, 4.0 * np.pi * g.h * s / g.rho)


def inverse_transform(F: SpectralProfile) -> RadialProfile:
    g = F.grid
    drho = np.pi / g.r_max
    s = 0.5 * dst(g.rho * F.values, type=1)
    return RadialProfile(g, drho / (2.0 * np.pi**2) * s / g.r)


def apply_half_laplacian(f: RadialProfile) -> RadialProfile:
    """sqrt(-Laplacian) via the diagonal multiplier rho in the sine basis."""
    g = f.grid
    F = forward_transform(f)
    return inverse_transform(SpectralProfile(g, g.rho * F.values))


def inner_product(f: RadialProfile, g: RadialProfile) -> float:
    f.same_grid(g)
    return float(np.sum(f.grid.w * f.values * g.values))


def mass(f: RadialProfile) -> float:
    """Discrete L2 mass int |f|^2 4 pi r^2 dr."""
    return inner_product(f, f)


def norm(f: RadialProfile) -> float:
    return float(np.sqrt(mass(f)))


# ---------------------------------------------------------------------------
# sector operators


@lru_cache(maxsize=32)
def _bessel_zeros(ell: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of the spherical Bessel function j_l."""
    if ell == 0:
        return np.pi * np.arange(1, count + 1)
    fn = lambda x: spherical_jn(ell, x)
    hi = (count + 0.5 * ell + 2) * np.pi
    xs = np.linspace(ell + 1e-6, hi, 40 * (count + 10))
    vals = spherical_jn(ell, xs)
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0][:count]
    if len(idx) < count:
        raise RuntimeError("bracketing scan found too few Bessel zeros")
    zeros = np.array([brentq(fn, xs[i], xs[i + 1]) for i in idx])
    zeros.setflags(write=False)
    return zeros


def _sine_matrix(n):
    j = np.arange(1, n + 1)
    return np.sin(np.pi * np.outer(j, j) / (n + 1))


def _sector_matrix_l0(grid):
    S = _sine_matrix(grid.n)
    core = (2.0 / (grid.n + 1)) * (S * grid.rho[None, :]) @ S
    return (core * grid.r[None, :]) / grid.r[:, None]


def _sector_matrix_l1(grid):
    drho = np.pi / grid.r_max
    J = spherical_jn(1, np.outer(grid.rho, grid.r))
    left = (J * (drho * grid.rho**3)[:, None]).T
    return (2.0 / np.pi) * left @ (J * (grid.h * grid.r**2)[None, :])


def _dirichlet_basis(ell, grid):
    z = _bessel_zeros(ell, grid.n)
    B = spherical_jn(ell, np.outer(grid.r, z / grid.r_max))
    norms = np.einsum("j,jk,jk->k", grid.w, B, B)
    return z, B, norms


def sector_operator_matrix(ell: int, grid: RadialGrid) -> SectorOperator:
    """sqrt(-Laplacian) restricted to sector l as a dense matrix.

    l = 0 reproduces apply_half_laplacian exactly.  l = 1 uses the
    uniform-frequency spherical Bessel quadrature.  l >= 2 uses the
    Dirichlet j_l basis with the exactly diagonal multiplier z_k/r_max;
    the basis data rides along on the returned operator.
    """
    if ell < 0:
        raise ValueError("sector index must be nonnegative")
    if ell == 0:
        return SectorOperator(0, grid, "sqrt_laplacian", _sector_matrix_l0(grid))
    if ell == 1:
        return SectorOperator(1, grid, "sqrt_laplacian", _sector_matrix_l1(grid))
    z, B, norms = _dirichlet_basis(ell, grid)
    analysis = (B * grid.w[:, None]).T / norms[:, None]
    matrix = B @ ((z / grid.r_max)[:, None] * analysis)
    return SectorOperator(
        ell, grid, "sqrt_laplacian", matrix,
        basis=B, basis_norms=norms, basis_mult=z / grid.r_max,
    )

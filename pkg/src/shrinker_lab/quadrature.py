"""Quadrature rules and closed-form moments on model shrinkers.

Level sets {b = r} of a model are round spheres of the flat factor (times the
compact factor, which is folded into the weights), so the rules below are
tensor products of uniform angular grids with Gauss-Legendre nodes:

* uniform grids in the torus angles are exact for trigonometric polynomials
  of frequency below the grid size, which covers every integrand in the
  verification suite;
* Gauss-Legendre handles the remaining flat radial-type variables, where the
  integrands are polynomial or smooth rational.

Sphere coordinates use z_j = sqrt(u_j) e^{i phi_j}: the surface measure of
the radius-R flat sphere becomes R^{2m-1} 2^{1-m} du dphi over the simplex
{u_j >= 0, sum u_j = 1} times the torus, which is flat in u, so polynomial
moments integrate exactly.  The same parametrization yields the closed-form
moments used by the closed-form evaluation paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .models import ModelShrinker

__all__ = [
    "LevelSetQuadrature",
    "BallQuadrature",
    "level_set_quadrature",
    "ball_quadrature",
    "shell_quadrature",
    "weighted_space_quadrature",
    "sphere_moment",
    "ball_moment",
    "unit_sphere_area",
    "unit_ball_volume",
    "volume_area",
    "raw_level_area",
    "verify_volume_identity",
]


# -- closed-form moments -----------------------------------------------------


def unit_sphere_area(m: int) -> float:
    """Area of the unit sphere S^{2m-1} in C^m."""
    return 2.0 * math.pi**m / math.factorial(m - 1)


def unit_ball_volume(m: int) -> float:
    """Volume of the unit ball in C^m = R^{2m}."""
    return math.pi**m / math.factorial(m)


def sphere_moment(m: int, alpha: tuple[int, ...], radius: float) -> float:
    """Integral of |z^alpha|^2 over the radius-R sphere in C^m.

    Monomial pairs z^alpha conj(z)^beta with alpha != beta integrate to zero
    by the torus action, so these diagonal moments determine every |u|^2
    level integral.
    """
    k = sum(alpha)
    angular = (
        2.0 ** (1 - m)
        * (2.0 * math.pi) ** m
        * math.prod(math.factorial(a) for a in alpha)
        / math.factorial(k + m - 1)
    )
    return radius ** (2 * k + 2 * m - 1) * angular


def ball_moment(m: int, alpha: tuple[int, ...], radius: float) -> float:
    """Integral of |z^alpha|^2 over the radius-R ball in C^m."""
    k = sum(alpha)
    return sphere_moment(m, alpha, radius) * radius / (2 * k + 2 * m)


# -- direction grids on the flat unit sphere ---------------------------------


def _gl(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


@lru_cache(maxsize=64)
def _unit_sphere_rule(m: int, n_u: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (K, m) and weights (K,) on the unit sphere of C^m."""
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * math.pi / n_phi
    if m == 1:
        nodes = np.exp(1j * phis).reshape(-1, 1)
        weights = np.full(n_phi, w_phi)
        return nodes, weights
    if m == 2:
        u, wu = _gl(n_u, 0.0, 1.0)
        uu, p1, p2 = np.meshgrid(u, phis, phis, indexing="ij")
        ww = np.broadcast_to(wu[:, None, None], uu.shape)
        z1 = np.sqrt(uu) * np.exp(1j * p1)
        z2 = np.sqrt(1.0 - uu) * np.exp(1j * p2)
        nodes = np.stack([z1.ravel(), z2.ravel()], axis=-1)
        weights = (0.5 * ww * w_phi**2).ravel()
        return nodes, weights
    if m == 3:
        # Simplex {u1 + u2 + u3 = 1} via u1 = x1, u2 = (1-x1) x2.
        x1, w1 = _gl(n_u, 0.0, 1.0)
        x2, w2 = _gl(n_u, 0.0, 1.0)
        xx1, xx2, p1, p2, p3 = np.meshgrid(x1, x2, phis, phis, phis, indexing="ij")
        jac = 1.0 - xx1
        u1 = xx1
        u2 = (1.0 - xx1) * xx2
        u3 = np.clip(1.0 - u1 - u2, 0.0, None)
        ww = np.broadcast_to((w1[:, None] * w2[None, :])[:, :, None, None, None], xx1.shape)
        nodes = np.stack(
            [
                (np.sqrt(u1) * np.exp(1j * p1)).ravel(),
                (np.sqrt(u2) * np.exp(1j * p2)).ravel(),
                (np.sqrt(u3) * np.exp(1j * p3)).ravel(),
            ],
            axis=-1,
        )
        weights = (0.25 * ww * jac * w_phi**3).ravel()
        return nodes, weights
    raise NotImplementedError(f"no sphere rule for flat complex dimension {m}")


def _level_counts(m: int, resolution: int) -> tuple[int, int]:
    if m == 1:
        return 0, max(8, resolution)
    if m == 2:
        return max(6, resolution // 8), max(16, resolution // 8)
    return max(4, resolution // 16), max(12, resolution // 16)


def _ball_counts(m: int, resolution: int) -> tuple[int, int, int]:
    n_rad = max(8, resolution // 2)
    if m == 1:
        return n_rad, 0, max(8, resolution // 4)
    if m == 2:
        return n_rad, max(4, resolution // 32), max(16, resolution // 16)
    return n_rad, max(4, resolution // 32), max(12, resolution // 16)


@dataclass(frozen=True)
class LevelSetQuadrature:
    """Surface rule for {b = r}: complex flat nodes with surface weights."""

    r: float
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int


@dataclass(frozen=True)
class BallQuadrature:
    """Volume rule for {b < r} (or a shell) with flat volume weights."""

    r: float
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int


@lru_cache(maxsize=128)
def level_set_quadrature(model: ModelShrinker, r: float, resolution: int) -> LevelSetQuadrature:
    """Quadrature on the level set {b = r}; weights sum to its surface area."""
    model.require_regular(r)
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    rho = model.flat_radius(r)
    n_u, n_phi = _level_counts(model.flat_m, resolution)
    dirs, w = _unit_sphere_rule(model.flat_m, n_u, n_phi)
    nodes = rho * dirs
    weights = model.compact_area * rho ** (2 * model.flat_m - 1) * w
    return LevelSetQuadrature(r=r, nodes=nodes, weights=weights, resolution=resolution)


@lru_cache(maxsize=48)
def ball_quadrature(model: ModelShrinker, r: float, resolution: int) -> BallQuadrature:
    """Quadrature on the sublevel set {b < r}; weights sum to its volume."""
    model.require_regular(r)
    rho = model.flat_radius(r)
    return _radial_shell(model, 0.0, rho, r, resolution)


@lru_cache(maxsize=48)
def shell_quadrature(
    model: ModelShrinker, r_lo: float, r_hi: float, resolution: int
) -> BallQuadrature:
    """Quadrature on {r_lo < b < r_hi}."""
    model.require_regular(r_lo)
    model.require_regular(r_hi)
    if r_hi <= r_lo:
        raise ValueError(f"empty shell: {r_lo} >= {r_hi}")
    return _radial_shell(model, model.flat_radius(r_lo), model.flat_radius(r_hi), r_hi, resolution)


def _radial_shell(
    model: ModelShrinker, s_lo: float, s_hi: float, r: float, resolution: int
) -> BallQuadrature:
    m = model.flat_m
    n_rad, n_u, n_phi = _ball_counts(m, resolution)
    dirs, w_dir = _unit_sphere_rule(m, n_u, n_phi)
    s, w_s = _gl(n_rad, s_lo, s_hi)
    nodes = s[:, None, None] * dirs[None, :, :]
    weights = (w_s * s ** (2 * m - 1))[:, None] * w_dir[None, :] * model.compact_area
    return BallQuadrature(
        r=r,
        nodes=nodes.reshape(-1, m),
        weights=weights.ravel(),
        resolution=resolution,
    )


@lru_cache(maxsize=8)
def weighted_space_quadrature(
    model: ModelShrinker, resolution: int = 256, radial_cut: float = 42.0
) -> BallQuadrature:
    """Quadrature for integrals against the weighted measure e^{-f} dv over M.

    The weights already include e^{-f}; the radial cut loses a tail of order
    e^{-radial_cut^2/4}, far below every tolerance in use.
    """
    m = model.flat_m
    n_rad = max(64, resolution)
    _, n_u, n_phi = _ball_counts(m, resolution)
    dirs, w_dir = _unit_sphere_rule(m, n_u, n_phi)
    s, w_s = _gl(n_rad, 0.0, radial_cut)
    radial = w_s * s ** (2 * m - 1) * np.exp(-0.25 * s**2 - model.f_min)
    nodes = s[:, None, None] * dirs[None, :, :]
    weights = radial[:, None] * w_dir[None, :] * model.compact_area
    return BallQuadrature(
        r=math.inf, nodes=nodes.reshape(-1, m), weights=weights.ravel(), resolution=resolution
    )


# -- volumes, areas and the divergence identity -------------------------------


def volume_area(model: ModelShrinker, r: float) -> tuple[float, float]:
    """Closed-form V(r) = Vol({b < r}) and A(r) = V'(r).

    A(r) is the coarea integral of 1/|grad b| over {b = r}, which differs
    from the raw surface area whenever |grad b| < 1; see raw_level_area.
    """
    model.require_regular(r)
    m = model.flat_m
    rho_sq = r * r - 4.0 * model.f_min
    vol = model.compact_area * unit_ball_volume(m) * rho_sq**m
    area = model.compact_area * unit_ball_volume(m) * m * rho_sq ** (m - 1) * 2.0 * r
    return vol, area


def raw_level_area(model: ModelShrinker, r: float) -> float:
    """Geometric surface area of {b = r}."""
    rho = model.flat_radius(r)
    return model.compact_area * unit_sphere_area(model.flat_m) * rho ** (2 * model.flat_m - 1)


def verify_volume_identity(model: ModelShrinker, r: float, resolution: int = 128) -> float:
    """Residual of n V(r) - r V'(r) = 2 int_{b<r} S - 2 int_{b=r} S/|grad f|.

    Both sides are evaluated with quadrature; the relative residual
    |LHS - RHS| / (1 + |LHS|) is returned.  The two sides cancel to machine
    zero on the flat model, so the aggregation runs in extended precision to
    keep the cancellation noise below the reporting tolerance.
    """
    level = level_set_quadrature(model, r, resolution)
    ball = ball_quadrature(model, r, resolution)
    vol = np.sum(ball.weights, dtype=np.longdouble)
    level_mass = np.sum(level.weights, dtype=np.longdouble)
    rho = model.flat_radius(r)
    # coarea: V'(r) = int_{b=r} 1/|grad b|, with |grad b| = rho/r on the level set
    area_coarea = level_mass * (r / rho)
    lhs = model.n * vol - r * area_coarea
    s = model.s_const
    # |grad f| = rho/2 on the level set
    rhs = 2.0 * s * vol - 2.0 * s * level_mass * (2.0 / rho)
    return float(abs(lhs - rhs) / (1.0 + abs(lhs)))

"""Vertical splittings ``G = W * V``, projections, cylinders and intrinsic cones.

A splitting is fixed by a unit horizontal direction ``nu``: ``V`` is the
one-parameter subgroup ``{(s nu, 0)}`` and ``W`` the normal subgroup
``{(x, t) : <nu, x> = 0}``.  Every ``p`` factors uniquely as
``p = pi_W(p) * pi_V(p)`` with

    pi_V(p) = (x_par, 0),  pi_W(p) = (x_perp, t - 1/2 <B x_perp, x_par>),

where ``x_par = h(p) nu`` and ``h(p) = <nu, x>`` is the height.

Functions in this module take and return points in the *ambient*
coordinates of ``split.spec``; the formulas above are basis-free.  The
adapted basis (``M nu = e1``) is used by the graph modules, which describe
``W`` by the coordinates ``w = (x~_2, ..., x~_m1, t)`` of ``x~ = M x``;
:func:`to_w` and :func:`from_w` convert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .group import GroupSpec, Point, bracket, inf_norm, inverse, multiply, rotate_basis

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Splitting:
    spec: GroupSpec
    nu: np.ndarray
    M: np.ndarray
    rotated_spec: GroupSpec

    @property
    def wdim(self) -> int:
        return self.spec.n - 1


@dataclass(frozen=True, eq=False)
class Cone:
    """Open cone ``C^sign(vertex, alpha)``; ``alpha = inf`` is the full aperture."""

    vertex: Point
    alpha: float  # or an array of apertures, one per batched vertex
    sign: str = "+"

    def __post_init__(self):
        if not np.all(np.asarray(self.alpha) > 0):
            raise ValidationError(f"cone aperture must be > 0, got {self.alpha}")
        if self.sign not in ("+", "-", "both"):
            raise ValidationError(f"cone sign must be '+', '-' or 'both', got {self.sign!r}")


def _householder_to_e1(nu: np.ndarray) -> np.ndarray:
    m = nu.shape[0]
    e1 = np.zeros(m)
    e1[0] = 1.0
    if np.linalg.norm(nu - e1) <= UNIT_TOL:
        return np.eye(m)
    u = nu - e1
    u /= np.linalg.norm(u)
    return np.eye(m) - 2.0 * np.outer(u, u)


def make_splitting(spec: GroupSpec, nu) -> Splitting:
    """Splitting along the unit horizontal direction ``nu``.

    ``M`` is the Householder reflection exchanging ``nu`` and ``e1`` (the
    identity when ``nu = e1``).
    """
    nu = np.array(nu, dtype=float).reshape(-1)
    if nu.shape != (spec.m1,):
        raise ValidationError(f"nu must have {spec.m1} components, got {nu.shape[0]}")
    if abs(np.linalg.norm(nu) - 1.0) > UNIT_TOL:
        raise ValidationError(f"nu must be a unit vector (|nu| = {np.linalg.norm(nu)!r})")
    M = _householder_to_e1(nu)
    M.setflags(write=False)
    nu.setflags(write=False)
    return Splitting(spec=spec, nu=nu, M=M, rotated_spec=rotate_basis(spec, M))


def height(split: Splitting, p: Point):
    return p.x @ split.nu


def _parts(split: Splitting, p: Point):
    h = height(split, p)
    x_par = np.multiply.outer(h, split.nu)
    return h, x_par, p.x - x_par


def project_V(split: Splitting, p: Point) -> Point:
    h, x_par, _ = _parts(split, p)
    return Point(x_par, np.zeros_like(p.t))


def project_W(split: Splitting, p: Point) -> Point:
    _, x_par, x_perp = _parts(split, p)
    return Point(x_perp, p.t - 0.5 * bracket(split.spec, x_perp, x_par))


def cyl_norm(split: Splitting, p: Point):
    """``max{||pi_W(p)||_inf, |h(p)|}``."""
    return np.maximum(inf_norm(split.spec, project_W(split, p)), np.abs(height(split, p)))


def in_cylinder(split: Splitting, center: Point, r: float, p: Point):
    if not r > 0:
        raise ValidationError(f"cylinder radius must be > 0, got {r}")
    return cyl_norm(split, multiply(split.spec, inverse(center), p)) < r


def cone_margin(split: Splitting, cone: Cone, p: Point):
    """``alpha |h| - ||pi_W||`` for ``u = vertex^-1 * p`` (positive inside)."""
    u = multiply(split.spec, inverse(cone.vertex), p)
    h = height(split, u)
    w = inf_norm(split.spec, project_W(split, u))
    alpha = np.asarray(cone.alpha, dtype=float)
    with np.errstate(invalid="ignore"):
        m = alpha * np.abs(h) - w
    return np.where(np.isinf(alpha), np.where(h != 0, np.inf, -np.inf), m)


def in_cone(split: Splitting, cone: Cone, p: Point):
    """Strict membership ``||pi_W(u)|| < alpha |h(u)|`` with the sign of ``h(u)``."""
    u = multiply(split.spec, inverse(cone.vertex), p)
    h = height(split, u)
    alpha = np.asarray(cone.alpha, dtype=float)
    with np.errstate(invalid="ignore"):
        inside = inf_norm(split.spec, project_W(split, u)) < alpha * np.abs(h)
    inside = np.where(np.isinf(alpha), h != 0, inside)
    if cone.sign == "+":
        inside = inside & (h > 0)
    elif cone.sign == "-":
        inside = inside & (h < 0)
    return inside


def cone_gamma(alpha: float, beta: float, spec: GroupSpec) -> float:
    """Aperture ``gamma`` with ``C(p, beta) in C(0, gamma)`` for ``p in C(0, alpha)``."""
    if np.any(np.asarray(alpha) < 0) or np.any(np.asarray(beta) < 0):
        raise ValidationError("apertures must be nonnegative")
    g = np.maximum(np.maximum(alpha, beta),
                   0.5 * spec.eps2 * np.sqrt((alpha * beta + 2 * beta) * spec.bound_C))
    return float(g) if np.ndim(g) == 0 else g


def cone_inversion_aperture(alpha: float, spec: GroupSpec) -> float:
    """Aperture ``alpha + eps2 sqrt(alpha C)`` of the inverted negative cone."""
    if not np.all(np.asarray(alpha) > 0):
        raise ValidationError(f"aperture must be > 0, got {alpha}")
    a = alpha + spec.eps2 * np.sqrt(alpha * spec.bound_C)
    return float(a) if np.ndim(a) == 0 else a


def axis_point(split: Splitting, s) -> Point:
    """The point ``s nu`` of ``V`` (batched in ``s``)."""
    s = np.asarray(s, dtype=float)
    return Point(np.multiply.outer(s, split.nu), np.zeros(s.shape + (split.spec.m2,)))


# --- adapted coordinates on W -------------------------------------------------


def to_w(split: Splitting, p: Point) -> np.ndarray:
    """Coordinates ``(x~_2..x~_m1, t)`` of ``pi_W(p)`` in the adapted basis."""
    q = project_W(split, p)
    xr = q.x @ split.M.T
    return np.concatenate([xr[..., 1:], q.t], axis=-1)


def from_w(split: Splitting, w) -> Point:
    """Ambient point of ``W`` with adapted coordinates ``w``."""
    w = np.asarray(w, dtype=float)
    m1 = split.spec.m1
    if w.shape[-1] != split.wdim:
        raise ValidationError(f"w must have {split.wdim} coordinates, got {w.shape[-1]}")
    xr = np.concatenate([np.zeros(w.shape[:-1] + (1,)), w[..., : m1 - 1]], axis=-1)
    return Point(xr @ split.M, w[..., m1 - 1:])

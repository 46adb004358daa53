"""Sampled intrinsic graphs: intrinsic gradient, area, normal and excess.

A :class:`SampledGraph` stores ``phi`` at the nodes of a lattice over a box in
adapted ``W``-coordinates ``w = (w_x, w_t)``, ``w_x`` in R^(m1-1), ``w_t`` in
R^m2.

Flowing the graph point ``Phi(w)`` along the horizontal field ``X_k``
(``k = 2..m1`` in the adapted basis) moves its ``W``-projection on the
straight line

    w + h (e_k, c_k),   c_kj = 1/2 (B~^j w_x)_k + phi(w) B~^j[k, 1],

so the intrinsic gradient is the first-order operator

    grad_k phi = d phi / d w_{x,k} + sum_j c_kj  d phi / d w_{t,j}.

:func:`phi_gradient_closed` evaluates it with central differences of the
node values; :func:`phi_gradient_fd` instead differentiates the multilinear
interpolant along the flow computed with the actual group law.

All integrals use the node-centred midpoint rule over *interior* nodes (the
outermost ring of nodes only feeds difference stencils).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import splitting as sp
from .errors import CoverageError, ValidationError
from .grid import Grid
from .group import Point, multiply
from .ilip import graph_gap, graph_map

FORMS = ("half-square", "one-minus-square")


@dataclass(frozen=True, eq=False)
class SampledGraph:
    split: sp.Splitting
    grid: Grid
    values: np.ndarray  # shape grid.shape

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != tuple(self.grid.shape):
            v = v.reshape(self.grid.shape)
        if self.grid.dim != self.split.wdim:
            raise ValidationError(
                f"grid has {self.grid.dim} axes but W has dimension {self.split.wdim}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("graph values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def m1(self) -> int:
        return self.split.spec.m1

    @property
    def box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.lo, self.grid.hi

    @property
    def spacing(self) -> np.ndarray:
        return self.grid.spacing

    def with_values(self, values) -> "SampledGraph":
        return SampledGraph(self.split, self.grid, np.asarray(values, dtype=float))

    def dilated(self, lam: float) -> "SampledGraph":
        """Graph of ``delta_lam(E)``: ``w_x -> lam w_x``, ``w_t -> lam^2 w_t``, ``phi -> lam phi``."""
        if not lam > 0:
            raise ValidationError("dilation factor must be > 0")
        k = self.m1 - 1
        scale = np.concatenate([np.full(k, lam), np.full(self.grid.dim - k, lam * lam)])
        grid = Grid(self.grid.lo * scale, self.grid.hi * scale, self.grid.shape)
        return SampledGraph(self.split, grid, lam * self.values)


def from_function(split: sp.Splitting, grid: Grid, f) -> SampledGraph:
    """Sample ``f(W)`` (``W`` of shape ``(N, n-1)``) at the grid nodes."""
    return SampledGraph(split, grid, np.asarray(f(grid.nodes()), dtype=float).reshape(grid.shape))


# --- intrinsic gradient ---------------------------------------------------


def _flow_coefficients(split: sp.Splitting, wx, phi):
    """``c[..., k, j]`` of the projected flow, for ``k = 2..m1``."""
    Bt = split.rotated_spec.B
    Bs = Bt[:, 1:, 1:]  # (m2, m1-1, m1-1)
    b1 = Bt[:, 1:, 0]  # (m2, m1-1)
    Bw = np.einsum("jkl,...l->...kj", Bs, wx)
    return 0.5 * Bw + np.asarray(phi)[..., None, None] * b1.T


def phi_independent(split: sp.Splitting, tol: float = 1e-14) -> bool:
    """True when the intrinsic gradient has no zeroth-order ``phi`` term (``B~ e1 = 0``).

    ``tol`` is relative to the largest entry of ``B`` and absorbs the rounding
    of the basis change.
    """
    Bt = split.rotated_spec.B
    return bool(np.all(np.abs(Bt[:, 1:, 0]) <= tol * np.max(np.abs(Bt))))


def node_derivatives(graph: SampledGraph) -> np.ndarray:
    """Partial derivatives of ``phi`` at every node, shape ``grid.shape + (n-1,)``.

    Second-order central differences inside, first-order one-sided on the
    boundary ring.
    """
    d = np.gradient(graph.values, *graph.spacing, edge_order=1)
    if graph.grid.dim == 1:
        d = [d]
    return np.stack(d, axis=-1)


def gradient_field(graph: SampledGraph) -> np.ndarray:
    """Intrinsic gradient at every node, shape ``grid.shape + (m1-1,)``."""
    m1 = graph.m1
    D = node_derivatives(graph)
    W = graph.grid.node_array()
    c = _flow_coefficients(graph.split, W[..., : m1 - 1], graph.values)
    return D[..., : m1 - 1] + np.einsum("...kj,...j->...k", c, D[..., m1 - 1:])


def _interpolator(graph: SampledGraph, values=None):
    v = graph.values if values is None else values
    return RegularGridInterpolator(graph.grid.axes(), v, method="linear", bounds_error=True)


def _check_inside(graph: SampledGraph, pts: np.ndarray, what: str):
    lo, hi = graph.box
    bad = np.any((pts < lo) | (pts > hi), axis=-1)
    if np.any(bad):
        i = int(np.flatnonzero(bad.reshape(-1))[0])
        raise ValidationError(
            f"{what} leaves the graph box at {pts.reshape(-1, pts.shape[-1])[i].tolist()}")


def phi_gradient_closed(graph: SampledGraph, w) -> np.ndarray:
    """Intrinsic gradient at ``w`` from central differences of the node values.

    Off-node points use multilinear interpolation of the nodal derivative
    fields.
    """
    w = np.asarray(w, dtype=float)
    pts = np.atleast_2d(w)
    _check_inside(graph, pts, "evaluation point")
    m1 = graph.m1
    D = node_derivatives(graph)
    dvals = np.stack([_interpolator(graph, D[..., a])(pts) for a in range(graph.grid.dim)],
                     axis=-1)
    phi = _interpolator(graph)(pts)
    c = _flow_coefficients(graph.split, pts[:, : m1 - 1], phi)
    g = dvals[:, : m1 - 1] + np.einsum("nkj,nj->nk", c, dvals[:, m1 - 1:])
    return g[0] if w.ndim == 1 else g


def phi_gradient_fd(graph: SampledGraph, w, h: float) -> np.ndarray:
    """Central difference of ``phi o pi_W`` along the flow of each ``X_k`` through ``Phi(w)``."""
    if not h > 0:
        raise ValidationError("step h must be > 0")
    w = np.asarray(w, dtype=float)
    pts = np.atleast_2d(w)
    _check_inside(graph, pts, "evaluation point")
    split = graph.split
    interp = _interpolator(graph)
    phi = interp(pts)
    base = graph_map(split, pts, phi)
    m1 = graph.m1
    out = np.empty((pts.shape[0], m1 - 1))
    for k in range(1, m1):
        e = split.M[k]  # ambient direction of the adapted basis vector e_{k+1}
        vals = []
        for sgn, label in ((1.0, "+"), (-1.0, "-")):
            step = Point(np.broadcast_to(sgn * h * e, base.x.shape), np.zeros_like(base.t))
            q = sp.to_w(split, multiply(split.spec, base, step))
            lo, hi = graph.box
            bad = np.any((q < lo) | (q > hi), axis=-1)
            if np.any(bad):
                i = int(np.flatnonzero(bad)[0])
                raise ValidationError(
                    f"flow neighbour {label}h along X_{k + 1} from w={pts[i].tolist()} "
                    f"leaves the graph box (at {q[i].tolist()})")
            vals.append(interp(q))
        out[:, k - 1] = (vals[0] - vals[1]) / (2.0 * h)
    return out[0] if w.ndim == 1 else out


def normal(graph: SampledGraph, w) -> np.ndarray:
    """Horizontal unit normal ``(1, -grad phi) / sqrt(1 + |grad phi|^2)`` in the adapted basis."""
    g = np.atleast_2d(phi_gradient_closed(graph, w))
    n = np.concatenate([np.ones((g.shape[0], 1)), -g], axis=1)
    n /= np.sqrt(1.0 + np.sum(g * g, axis=1))[:, None]
    return n[0] if np.ndim(w) == 1 else n


# --- quadrature -------------------------------------------------------------


def _interior(graph: SampledGraph):
    if min(graph.grid.shape) < 3:
        raise ValidationError("grid needs at least 3 nodes per axis to have an interior")
    return tuple(slice(1, -1) for _ in graph.grid.shape)


def interior_region(graph: SampledGraph) -> tuple[np.ndarray, np.ndarray]:
    """Box covered by the cells of the interior nodes."""
    h = graph.spacing
    return graph.grid.lo + 0.5 * h, graph.grid.hi - 0.5 * h


def interior_volume(graph: SampledGraph) -> float:
    lo, hi = interior_region(graph)
    return float(np.prod(hi - lo))


def _area_density(G):
    return np.sqrt(1.0 + np.sum(G * G, axis=-1))


def area(graph: SampledGraph, region=None) -> float:
    """``int_region sqrt(1 + |grad phi|^2)`` by the midpoint rule.

    ``region = (lo, hi)`` must lie in the interior cells' box; cells cut by
    its faces are weighted by their overlap.  ``None`` means the whole
    interior.
    """
    sl = _interior(graph)
    dens = _area_density(gradient_field(graph))[sl]
    vol = graph.grid.cell_volume
    if region is None:
        return float(np.sum(dens) * vol)
    rlo = np.asarray(region[0], dtype=float)
    rhi = np.asarray(region[1], dtype=float)
    ilo, ihi = interior_region(graph)
    tol = 1e-12 * np.maximum(1.0, np.abs(ihi - ilo))
    if np.any(rlo < ilo - tol) or np.any(rhi > ihi + tol) or np.any(rhi < rlo):
        raise ValidationError(
            f"region {rlo.tolist()}..{rhi.tolist()} escapes the interior box "
            f"{ilo.tolist()}..{ihi.tolist()}")
    weight = np.ones(())
    for a, ax in enumerate(graph.grid.axes()):
        h = graph.spacing[a]
        c = ax[1:-1]
        ov = np.clip(np.minimum(c + h / 2, rhi[a]) - np.maximum(c - h / 2, rlo[a]), 0.0, None) / h
        weight = np.multiply.outer(weight, ov)
    return float(np.sum(dens * weight) * vol)


def _shadow_box(graph: SampledGraph, p: Point, r: float):
    """Box containing every ``w`` with ``||pi_W(p^-1 * w)|| < r``."""
    split = graph.split
    m1, e = graph.m1, split.spec.eps2
    wp = sp.to_w(split, p)
    hp = float(sp.height(split, p))
    Bt = split.rotated_spec.B
    wpx = np.concatenate([[0.0], wp[: m1 - 1]])
    grad = 0.5 * (Bt @ wpx)[:, 1:] + hp * Bt[:, 1:, 0]  # (m2, m1-1)
    rad = np.concatenate([np.full(m1 - 1, r), r * np.linalg.norm(grad, axis=1) + r * r / e**2])
    return wp - rad, wp + rad


def cylinder_mask(graph: SampledGraph, p: Point, r: float, check: bool = True) -> np.ndarray:
    """Interior nodes whose graph point lies in ``C_r(p)``.

    Raises
    ------
    CoverageError
        If the shadow of the cylinder on ``W`` is not covered by the interior
        cells, so part of the graph inside ``C_r(p)`` would be missed.
    """
    if not r > 0:
        raise ValidationError("radius must be > 0")
    if check:
        slo, shi = _shadow_box(graph, p, r)
        ilo, ihi = interior_region(graph)
        if np.any(slo < ilo) or np.any(shi > ihi):
            raise CoverageError(
                f"graph does not cover the shadow of C_{r:g}(p): needs "
                f"{slo.tolist()}..{shi.tolist()}, interior is {ilo.tolist()}..{ihi.tolist()}")
    sl = _interior(graph)
    split = graph.split
    W = graph.grid.node_array()[sl]
    phi = graph.values[sl]
    wp = sp.to_w(split, p)
    hp = float(sp.height(split, p))
    gap = graph_gap(split, wp, hp, W)
    return (gap < r) & (np.abs(phi - hp) < r)


def _excess_integrand(G, form: str):
    s2 = np.sum(G * G, axis=-1)
    root = np.sqrt(1.0 + s2)
    if form == "half-square":
        # (1 - <nu_E, nu>) sqrt(1 + |G|^2) = sqrt(1 + |G|^2) - 1, written stably
        return s2 / (root + 1.0)
    if form == "one-minus-square":
        return s2 / root
    raise ValidationError(f"form must be one of {FORMS}, got {form!r}")


def excess_graph(graph: SampledGraph, p: Point, r: float, form: str = "half-square") -> float:
    """Cylindrical excess of the graph in ``C_r(p)`` with respect to ``nu``.

    ``r^(1-Q) * int g dmu`` over ``{w : Phi(w) in C_r(p)}``, with
    ``g = 1 - <nu_E, nu>`` (half-square, the canonical form) or
    ``1 - <nu_E, nu>^2`` (one-minus-square).
    """
    mask = cylinder_mask(graph, p, r)
    G = gradient_field(graph)[_interior(graph)]
    val = np.sum(_excess_integrand(G, form)[mask]) * graph.grid.cell_volume
    return float(val * r ** (1 - graph.split.spec.Q))


def unit_disk_volume(split: sp.Splitting) -> float:
    """Lebesgue measure of ``D_1 = {w in W : ||w||_inf < 1}``."""
    m1, m2, e = split.spec.m1, split.spec.m2, split.spec.eps2

    def ball(k, rad):
        return math.pi ** (k / 2) / math.gamma(k / 2 + 1) * rad**k

    return ball(m1 - 1, 1.0) * ball(m2, 1.0 / e**2)


def excess_measure_check(graph: SampledGraph) -> tuple[float, float]:
    """``(area over C_1 - |D_1|, e(0, 1))`` for the graph through the origin's cylinder.

    Requires ``sup |phi| < 1`` on the shadow so that the graph part inside
    ``C_1`` is the graph over ``D_1``.
    """
    zero = Point.zero(graph.split.spec)
    mask = cylinder_mask(graph, zero, 1.0)
    sl = _interior(graph)
    if np.any(np.abs(graph.values[sl][mask]) >= 1.0):
        raise ValidationError("excess-measure identity needs sup|phi| < 1 over the unit shadow")
    G = gradient_field(graph)[sl]
    lhs = np.sum(_area_density(G)[mask]) * graph.grid.cell_volume - unit_disk_volume(graph.split)
    rhs = excess_graph(graph, zero, 1.0, "half-square")
    return float(lhs), float(rhs)


@dataclass
class ExcessReport:
    center: Point
    radii: list
    excess: list  # canonical (half-square) values
    excess_sq: list = field(default_factory=list)  # one-minus-square values
    form: str = "half-square"
    bound_ok: list = field(default_factory=list)  # cross-scale bound vs the next radius

    def rows(self):
        for i, r in enumerate(self.radii):
            yield r, self.excess[i], self.excess_sq[i]


"""Discrete intrinsic-area minimisation and excess diagnostics.

The discrete energy of a sampled graph is its intrinsic area over the
interior nodes,

    E(phi) = vol * sum_i sqrt(1 + |G_i|^2),
    G_ik = D_k phi_i + sum_j (1/2 (B~^j w_x,i)_k + phi_i B~^j[k, 1]) D_tj phi_i,

with ``D`` the central differences.  The exact derivative is assembled by
reverse accumulation through the stencil, including the ``phi_i`` inside the
flow coefficients.  Boundary-ring nodes are data, not unknowns: their
gradient entries are zero and the descent keeps them fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import graphs as gr
from .errors import CoverageError, LineSearchError, ValidationError
from .group import DEFAULT_SEED, Point
from .ilip import graph_map


@dataclass
class MinimizeOptions:
    max_iters: int = 2000
    step0: float = 1.0
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    grad_tol: float = 1e-8
    seed: int = DEFAULT_SEED
    max_shrinks: int = 60

    def __post_init__(self):
        if not (self.max_iters > 0 and self.step0 > 0 and self.grad_tol > 0):
            raise ValidationError("max_iters, step0 and grad_tol must be positive")
        if not (0 < self.armijo_c < 1 and 0 < self.armijo_shrink < 1):
            raise ValidationError("armijo_c and armijo_shrink must lie in (0, 1)")


@dataclass
class DiagnosticReport:
    epsilon: float
    radii: list
    points: np.ndarray  # candidate W-points
    flagged: np.ndarray  # bool per candidate: swept excess <= epsilon
    excess_table: np.ndarray  # (candidates, radii), half-square form
    energy_lhs: float
    excess_rhs: float
    ratio: float | None = None


@dataclass
class Trace:
    rows: list = field(default_factory=list)  # (iter, energy, grad_norm, step)

    def energies(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])


def _interior_mask(shape) -> np.ndarray:
    m = np.zeros(shape, dtype=bool)
    m[tuple(slice(1, -1) for _ in shape)] = True
    return m


def _stencil(graph: gr.SampledGraph):
    """Interior intrinsic gradient plus the pieces its derivative needs."""
    m1 = graph.m1
    sl = gr._interior(graph)
    h = graph.spacing
    v = graph.values
    d = graph.grid.dim
    D = np.empty(tuple(s - 2 for s in v.shape) + (d,))
    for a in range(d):
        up = [slice(1, -1)] * d
        dn = [slice(1, -1)] * d
        up[a] = slice(2, None)
        dn[a] = slice(None, -2)
        D[..., a] = (v[tuple(up)] - v[tuple(dn)]) / (2.0 * h[a])
    W = graph.grid.node_array()[sl]
    c = gr._flow_coefficients(graph.split, W[..., : m1 - 1], v[sl])  # (..., k, j)
    G = D[..., : m1 - 1] + np.einsum("...kj,...j->...k", c, D[..., m1 - 1:])
    return G, D, c


def discrete_energy(graph: gr.SampledGraph) -> float:
    """Intrinsic area of the graph over its interior nodes."""
    G, _, _ = _stencil(graph)
    return float(np.sum(np.sqrt(1.0 + np.sum(G * G, axis=-1))) * graph.grid.cell_volume)


def energy_gradient(graph: gr.SampledGraph) -> np.ndarray:
    """Exact derivative of :func:`discrete_energy` w.r.t. the interior node values.

    Entries on the boundary ring are zero (those nodes are fixed data).
    """
    m1 = graph.m1
    d = graph.grid.dim
    h = graph.spacing
    G, D, c = _stencil(graph)
    vol = graph.grid.cell_volume
    g = G / np.sqrt(1.0 + np.sum(G * G, axis=-1))[..., None]  # dE/dG per node, / vol
    # coefficient multiplying each central difference D_a at each interior node
    A = np.empty_like(D)
    A[..., : m1 - 1] = g
    A[..., m1 - 1:] = np.einsum("...k,...kj->...j", g, c)
    grad = np.zeros(graph.values.shape)
    for a in range(d):
        coef = A[..., a] / (2.0 * h[a])
        up = [slice(1, -1)] * d
        dn = [slice(1, -1)] * d
        up[a] = slice(2, None)
        dn[a] = slice(None, -2)
        grad[tuple(up)] += coef
        grad[tuple(dn)] -= coef
    # phi_i appears in its own flow coefficients through phi_i B~^j[k, 1]
    b1 = graph.split.rotated_spec.B[:, 1:, 0]  # (m2, m1-1)
    local = np.einsum("...k,jk,...j->...", g, b1, D[..., m1 - 1:])
    grad[gr._interior(graph)] += local
    grad *= vol
    grad[~_interior_mask(grad.shape)] = 0.0
    return grad


def grad_norm(graph: gr.SampledGraph, grad: np.ndarray) -> float:
    """Sup-norm of the gradient density (gradient / cell volume)."""
    return float(np.max(np.abs(grad)) / graph.grid.cell_volume)


def minimize(graph0: gr.SampledGraph, boundary=None, opts: MinimizeOptions | None = None):
    """Projected gradient descent on :func:`discrete_energy` with the ring frozen.

    Each iteration tries a Barzilai-Borwein step (``opts.step0`` at the
    start) and backtracks until the Armijo condition holds, so accepted
    energies never increase.

    Parameters
    ----------
    graph0 : SampledGraph
        Initial graph; its ring values are replaced by ``boundary`` if given.
    boundary : array, optional
        Node array of the grid shape; only its boundary-ring entries are used.

    Returns
    -------
    (SampledGraph, Trace)

    Raises
    ------
    LineSearchError
        If ``opts.max_shrinks`` backtracking steps do not produce descent.
    """
    opts = opts or MinimizeOptions()
    v = np.array(graph0.values, dtype=float)
    ring = ~_interior_mask(v.shape)
    if boundary is not None:
        b = np.asarray(boundary, dtype=float).reshape(v.shape)
        if not np.all(np.isfinite(b[ring])):
            raise ValidationError("boundary values must be finite")
        v[ring] = b[ring]
    graph = graph0.with_values(v)
    vol = graph.grid.cell_volume
    E = discrete_energy(graph)
    g = energy_gradient(graph)
    trace = Trace()
    gn = grad_norm(graph, g)
    trace.rows.append((0, E, gn, 0.0))
    # step is measured in units of the gradient density (gradient / vol)
    step = opts.step0
    prev = None
    for it in range(1, opts.max_iters + 1):
        if gn <= opts.grad_tol:
            break
        gd = g / vol
        if prev is not None:
            s_vec = v - prev[0]
            y_vec = gd - prev[1]
            sy = float(np.sum(s_vec * y_vec))
            if sy > 0:
                step = float(np.sum(s_vec * s_vec)) / sy
            else:
                step = opts.step0
        gg = float(np.sum(gd * g))
        t = step
        for _ in range(opts.max_shrinks):
            vn = v - t * gd
            En = discrete_energy(graph.with_values(vn))
            if En <= E - opts.armijo_c * t * gg:
                break
            t *= opts.armijo_shrink
        else:
            raise LineSearchError(
                f"no Armijo step after {opts.max_shrinks} shrinks at iteration {it} "
                f"(energy {E!r}, grad-norm {gn!r})",
                state={"iter": it, "energy": E, "grad_norm": gn, "values": v.copy()})
        if En > E:  # Armijo guarantees this cannot happen; keep the invariant explicit
            raise LineSearchError(f"energy increased at iteration {it}", state={"iter": it})
        prev = (v, gd)
        v = vn
        graph = graph.with_values(v)
        E = En
        g = energy_gradient(graph)
        gn = grad_norm(graph, g)
        trace.rows.append((it, E, gn, t))
    return graph, trace


def affine_boundary(graph: gr.SampledGraph, coeffs, offset: float = 0.0) -> np.ndarray:
    """Node array of the affine function ``offset + coeffs . w``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (graph.grid.dim,):
        raise ValidationError(f"affine boundary needs {graph.grid.dim} coefficients")
    return (offset + graph.grid.nodes() @ coeffs).reshape(graph.grid.shape)


def excess_decay_report(graph: gr.SampledGraph, p: Point, radii) -> gr.ExcessReport:
    """Excess at each radius (both forms) with the cross-scale bound checked row by row.

    Coverage is checked at the largest radius first.
    """
    radii = sorted(float(r) for r in radii)
    if not radii:
        raise ValidationError("need at least one radius")
    gr.cylinder_mask(graph, p, radii[-1])  # raises CoverageError
    half = [gr.excess_graph(graph, p, r, "half-square") for r in radii]
    sq = [gr.excess_graph(graph, p, r, "one-minus-square") for r in radii]
    Q = graph.split.spec.Q
    ok = []
    for i in range(len(radii)):
        good = True
        for j in range(i + 1, len(radii)):
            bound = (radii[j] / radii[i]) ** (Q - 1) * half[j]
            good &= half[i] <= bound * (1 + 1e-6) + 1e-300
        ok.append(bool(good))
    return gr.ExcessReport(center=p, radii=radii, excess=half, excess_sq=sq, bound_ok=ok)


def default_radii(r_max: float, count: int = 4) -> list:
    """Geometric radii ``r_max / 2^k`` down to ``r_max / 8``."""
    return [r_max / 2.0**k for k in range(count - 1, -1, -1)]


def lipschitz_approx_diagnostic(graph: gr.SampledGraph, epsilon: float, radii,
                                stride: int = 1) -> DiagnosticReport:
    """Flag graph points with small excess at every radius, and the energy ratio.

    Candidates are interior nodes (every ``stride``-th along each axis) whose
    cylinders at the largest radius are covered by the graph.  ``energy_lhs``
    is ``int |grad phi|^2`` over the unit disk of ``W`` and ``excess_rhs``
    the excess at the origin for the largest radius.
    """
    if epsilon < 0:
        raise ValidationError("epsilon must be >= 0")
    radii = sorted(float(r) for r in radii)
    split = graph.split
    zero = Point.zero(split.spec)
    mask1 = gr.cylinder_mask(graph, zero, 1.0)  # raises CoverageError
    G = gr.gradient_field(graph)[gr._interior(graph)]
    energy_lhs = float(np.sum(np.sum(G * G, axis=-1)[mask1]) * graph.grid.cell_volume)
    excess_rhs = gr.excess_graph(graph, zero, radii[-1])
    sl = gr._interior(graph)
    W = graph.grid.node_array()[sl]
    phi = graph.values[sl]
    pick = tuple(slice(None, None, stride) for _ in range(graph.grid.dim))
    W = W[pick].reshape(-1, graph.grid.dim)
    phi = phi[pick].reshape(-1)
    pts, table = [], []
    for w, f in zip(W, phi):
        p = graph_map(split, w, f)
        try:
            gr.cylinder_mask(graph, p, radii[-1])
        except CoverageError:
            continue
        pts.append(w)
        table.append([gr.excess_graph(graph, p, r) for r in radii])
    table = np.array(table).reshape(len(pts), len(radii))
    flagged = np.max(table, axis=1) <= epsilon if len(pts) else np.zeros(0, dtype=bool)
    ratio = energy_lhs / excess_rhs if excess_rhs > 0 else None
    return DiagnosticReport(epsilon=float(epsilon), radii=radii,
                            points=np.array(pts).reshape(-1, graph.grid.dim), flagged=flagged,
                            excess_table=table, energy_lhs=energy_lhs, excess_rhs=excess_rhs,
                            ratio=ratio)

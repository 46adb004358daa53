"""Intrinsic Lipschitz functions on ``W`` and their cone-based extension.

A function ``phi`` on ``A`` in ``W`` has the intrinsic graph
``Phi(w) = w * phi(w) nu``.  Points of ``W`` are given by their adapted
coordinates ``w = (x~_2, ..., x~_m1, t)`` (see :mod:`carnotlab.splitting`), so
``W`` is identified with R^(n-1).

In these coordinates the horizontal part of ``Phi(w')^-1 * Phi(w)`` projected
to ``W`` is ``d_x = w_x - w'_x`` and its vertical part is

    d_t - 1/2 <B~ w'_x, w_x> - phi(w') <B~ e1, d_x>,

independent of ``phi(w)``: sliding along ``V`` does not move the ``W``
projection.  Every quantity below is built from this closed form, written
antisymmetrically so that it vanishes exactly for ``w = w'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import splitting as sp
from .errors import ValidationError
from .grid import Grid
from .group import Point, inf_norm, inverse, multiply

PAIR_CHUNK = 500_000


@dataclass(frozen=True, eq=False)
class SampleSet:
    split: sp.Splitting
    w: np.ndarray  # (N, n-1)
    values: np.ndarray  # (N,)

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.w, dtype=float))
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if w.shape[1] != self.split.wdim:
            raise ValidationError(f"sample coordinates must have {self.split.wdim} columns")
        if w.shape[0] != v.shape[0]:
            raise ValidationError("one value per sample point is required")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
            raise ValidationError("samples must be finite")
        _, inv = np.unique(w, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        for k in np.flatnonzero(np.bincount(inv) > 1):
            vals = v[inv == k]
            if np.any(vals != vals[0]):
                raise ValidationError(
                    f"duplicate sample point {w[inv == k][0].tolist()} with conflicting values")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.w.shape[0]


@dataclass
class ExtensionField:
    grid: Grid | None
    points: np.ndarray  # (K, n-1) evaluation points (grid nodes when grid is set)
    psi: np.ndarray
    L_in: float
    alpha: float
    beta: float
    gamma: float
    lip_bound: float

    def constants(self) -> dict:
        return {"L": self.L_in, "alpha": self.alpha, "beta": self.beta,
                "gamma": self.gamma, "lip_bound": self.lip_bound}


def _blocks(split: sp.Splitting):
    Bt = split.rotated_spec.B
    Bs = Bt[:, 1:, 1:]
    k, l = np.triu_indices(Bs.shape[1], k=1)
    return k, l, Bs[:, k, l].T, Bt[:, 1:, 0]


def graph_gap(split: sp.Splitting, w_from, phi_from, w_to):
    """``||pi_W(Phi(w_from)^-1 * w_to)||_inf`` (broadcasting over leading axes).

    The bilinear term is summed over ``k < l`` as
    ``B~[k, l] (a_k b_l - a_l b_k)``, which is exactly zero when the two points
    coincide.
    """
    m1 = split.spec.m1
    k, l, Bu, b1 = _blocks(split)
    w_from = np.asarray(w_from, dtype=float)
    w_to = np.asarray(w_to, dtype=float)
    phi_from = np.asarray(phi_from, dtype=float)
    ax, at = w_to[..., : m1 - 1], w_to[..., m1 - 1:]
    bx, bt = w_from[..., : m1 - 1], w_from[..., m1 - 1:]
    dx = ax - bx
    wedge = ax[..., k] * bx[..., l] - ax[..., l] * bx[..., k]
    s_ba = wedge @ Bu  # <B~ b, a>
    tw = (at - bt) - 0.5 * s_ba - phi_from[..., None] * (dx @ b1.T)
    hx = np.sqrt(np.sum(dx * dx, axis=-1))
    vt = split.spec.eps2 * np.sqrt(np.sqrt(np.sum(tw * tw, axis=-1)))
    return np.maximum(hx, vt)


def graph_map(split: sp.Splitting, w, s) -> Point:
    """The point ``w * s nu`` (ambient coordinates)."""
    return multiply(split.spec, sp.from_w(split, w), sp.axis_point(split, s))


def lip_constant_estimate(samples: SampleSet) -> float:
    """Largest pairwise quotient ``|phi(w) - phi(w')| / ||pi_W(Phi(w')^-1 Phi(w))||``."""
    if len(samples) < 2:
        raise ValidationError("need at least two samples")
    return pairwise_lipschitz(samples.split, samples.w, samples.values)


def pairwise_lipschitz(split: sp.Splitting, w, values) -> float:
    """Max quotient over all ordered pairs, evaluated in row blocks."""
    w = np.asarray(w, dtype=float)
    values = np.asarray(values, dtype=float)
    n = w.shape[0]
    rows = max(1, PAIR_CHUNK // max(n, 1))
    best = 0.0
    for a in range(0, n, rows):
        gap = graph_gap(split, w[None, :, :], values[None, :], w[a:a + rows, None, :])
        dv = np.abs(values[a:a + rows, None] - values[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(dv == 0, 0.0, dv / gap)
        best = max(best, float(q.max()))
    return best


def is_intrinsic_lipschitz(samples: SampleSet, L: float) -> bool:
    """No graph point lies in the open cone ``C(Phi(w'), 1/L)`` of another."""
    if not L > 0:
        raise ValidationError(f"L must be > 0, got {L}")
    alpha = 1.0 / L
    gap = graph_gap(samples.split, samples.w[None, :, :], samples.values[None, :],
                    samples.w[:, None, :])
    dv = np.abs(samples.values[:, None] - samples.values[None, :])
    return not bool(np.any(gap < alpha * dv))


def min_cone_entry(split: sp.Splitting, vertex: Point, alpha: float, w):
    """``inf {s : w * s nu in C+(vertex, alpha)}``.

    With ``u = vertex^-1 * w`` the ``W``-projection of ``u * s nu`` does not
    depend on ``s`` and its height is ``s - h(vertex)``, so the cone is
    entered exactly past ``h(vertex) + ||pi_W(u)|| / alpha``; the value is
    always finite.
    """
    if not alpha > 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    u = multiply(split.spec, inverse(vertex), sp.from_w(split, w))
    g = inf_norm(split.spec, sp.project_W(split, u))
    return sp.height(split, vertex) + g / alpha


def extension_constants(L: float, spec) -> tuple[float, float, float, float]:
    """``(alpha, beta, gamma, c_bound)`` of the cone-based extension."""
    if not L > 0:
        raise ValidationError(f"L must be > 0, got {L}")
    e, C = spec.eps2, spec.bound_C
    alpha = 1.0 / L
    beta = alpha**2 / (alpha + 2.0) * 4.0 / (4.0 + C * e * e)
    gamma = 0.25 * (np.sqrt(e * e * C + 4.0 * beta) - e * np.sqrt(C)) ** 2
    c_bound = (1.0 / gamma) / max(L, L**4)
    return float(alpha), float(beta), float(gamma), float(c_bound)


def extension_values(samples: SampleSet, L: float, points, chunk: int = 4096) -> np.ndarray:
    """``psi`` at arbitrary ``W``-points: lowest cone entry over the samples, capped at sup|phi|."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    vals = samples.values
    cap = float(np.max(np.abs(vals)))
    if np.all(vals == vals[0]):
        # L = 0: the cones fill everything but V, psi is the constant
        return np.full(points.shape[0], vals[0])
    alpha = 1.0 / L
    out = np.empty(points.shape[0])
    for a in range(0, points.shape[0], chunk):
        gap = graph_gap(samples.split, samples.w[None, :, :], vals[None, :],
                        points[a:a + chunk, None, :])
        # fixed sample order: the min is independent of how nodes are chunked
        out[a:a + chunk] = np.min(vals[None, :] + gap / alpha, axis=1)
    # the lower cap is never active: every entry is >= min phi >= -cap
    return np.clip(out, -cap, cap)


def extend(samples: SampleSet, L: float, grid: Grid | None = None, points=None) -> ExtensionField:
    """Extend ``phi`` from the sample set to a lattice (or to given points).

    Raises
    ------
    ValidationError
        For an empty sample set, ``L`` outside (0, 1), or samples that are not
        intrinsic ``L``-Lipschitz.
    """
    if len(samples) == 0:
        raise ValidationError("empty sample set")
    if not 0 < L < 1:
        raise ValidationError(f"L must lie in (0, 1), got {L}")
    if len(samples) > 1 and not is_intrinsic_lipschitz(samples, L):
        raise ValidationError(
            f"samples are not intrinsic {L}-Lipschitz "
            f"(estimate {lip_constant_estimate(samples):.6g})")
    if (grid is None) == (points is None):
        raise ValidationError("give exactly one of grid or points")
    pts = grid.nodes() if grid is not None else np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != samples.split.wdim:
        raise ValidationError(f"evaluation points must have {samples.split.wdim} coordinates")
    alpha, beta, gamma, _ = extension_constants(L, samples.split.spec)
    psi = extension_values(samples, L, pts)
    return ExtensionField(grid=grid, points=pts, psi=psi, L_in=float(L), alpha=alpha,
                          beta=beta, gamma=gamma, lip_bound=1.0 / gamma)

"""Seeded randomized invariant suites.

Each suite draws its samples from a generator seeded by ``(seed, suite, group)``
so results do not depend on execution order or on how many worker threads
run the suites.  A suite returns a :class:`SuiteResult` with the number of
samples, the number of violations, the worst observed margin (positive means
the property holds with room to spare) and the index of the first violating
sample, which together with the seed reproduces a failure.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classify as cl
from . import group as gc
from . import splitting as sp
from .errors import ValidationError

INTERIOR_MARGIN = 1e-9
SCAN_STEPS = 41
CHUNK = 4096  # rotations drawn per batch; fixes the RNG stream independent of threads


@dataclass
class SuiteResult:
    suite: str
    group: str
    samples: int
    violations: int
    worst_margin: float
    first_violation: int | None = None

    def line(self) -> str:
        status = "ok" if self.violations == 0 else "FAIL"
        first = "-" if self.first_violation is None else str(self.first_violation)
        return (f"{self.suite:<18} {self.group:<6} samples={self.samples:<8d} "
                f"violations={self.violations:<4d} worst_margin={self.worst_margin:.6e} "
                f"first={first} {status}")


def _rng(seed: int, suite: str, group: str) -> np.random.Generator:
    tag = zlib.crc32(f"{suite}/{group}".encode())
    return np.random.default_rng([seed, tag])


def _result(suite, group, margins, tol=0.0) -> SuiteResult:
    margins = np.asarray(margins, dtype=float)
    bad = margins < -tol
    first = int(np.argmax(bad)) if bad.any() else None
    worst = float(margins.min()) if margins.size else float("inf")
    return SuiteResult(suite, group, int(margins.size), int(bad.sum()), worst, first)


def _random_split(spec, rng):
    nu = rng.standard_normal(spec.m1)
    return sp.make_splitting(spec, nu / np.linalg.norm(nu))


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def sample_cone_points(split, rng, alpha, size, sign=1.0) -> gc.Point:
    """Points of ``C^sign(0, alpha)`` at relative depth >= INTERIOR_MARGIN.

    A random ``w`` in ``W`` is dilated so that ``||w|| = alpha |h| (1 - m)`` with
    ``m`` log-uniform in ``[1e-9, 1)``; many samples sit right at the boundary.
    """
    spec = split.spec
    h = sign * _log_uniform(rng, 1e-3, 1e3, size)
    w = sp.from_w(split, rng.standard_normal((size, split.wdim))
                  * _log_uniform(rng, 1e-2, 1e2, size)[:, None])
    nw = gc.inf_norm(spec, w)
    m = np.minimum(_log_uniform(rng, INTERIOR_MARGIN, 1.0, size), 1.0 - 1e-12)
    lam = alpha * np.abs(h) * (1.0 - m) / np.where(nw > 0, nw, 1.0)
    w = gc.Point(lam[:, None] * w.x, (lam**2)[:, None] * w.t)
    return gc.multiply(spec, w, sp.axis_point(split, h))


def _signed_margin(split, vertex, p, alpha, sign):
    """Relative cone margin, -1 when the sign constraint fails."""
    u = gc.multiply(split.spec, gc.inverse(vertex), p)
    h = sp.height(split, u)
    nw = gc.inf_norm(split.spec, sp.project_W(split, u))
    inside = sp.in_cone(split, sp.Cone(vertex, alpha, "+" if sign > 0 else "-"), p)
    rel = (alpha * np.abs(h) - nw) / np.maximum(alpha * np.abs(h), 1e-300)
    # in_cone is authoritative; the relative depth is reported for diagnostics
    return np.where(inside, np.maximum(rel, 0.0), np.minimum(rel, -1e-300))


# --- suites -----------------------------------------------------------------


def suite_triangle(spec, seed, samples):
    rng = _rng(seed, "triangle", spec.name)
    margins = []
    chunk = 100_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        p, q, r = (gc.random_points(spec, rng, k) for _ in range(3))
        lhs = gc.distance(spec, p, q)
        rhs = gc.distance(spec, p, r) + gc.distance(spec, r, q)
        margins.append((rhs - lhs) / np.maximum(rhs, 1e-300))
        done += k
    return _result("triangle", spec.name, np.concatenate(margins), tol=1e-12)


def suite_sandwich(spec, seed, samples):
    """``B_{r/2} in C_r in B_{2r}``, i.e. ``||p||_C <= 2||p||`` and ``||p|| <= 2||p||_C``."""
    rng = _rng(seed, "sandwich", spec.name)
    split = _random_split(spec, rng)
    p = gc.random_points(spec, rng, samples)
    n = gc.inf_norm(spec, p)
    c = sp.cyl_norm(split, p)
    m = np.minimum(2 * n - c, 2 * c - n) / np.maximum(n, 1e-300)
    return _result("sandwich", spec.name, m, tol=1e-12)


def suite_projections(spec, seed, samples):
    """``|h(p)| <= ||p||``, ``||pi_W(p)|| <= 2||p||`` and ``p = pi_W(p) * pi_V(p)``."""
    rng = _rng(seed, "projections", spec.name)
    split = _random_split(spec, rng)
    p = gc.random_points(spec, rng, samples)
    n = gc.inf_norm(spec, p)
    m1 = (n - np.abs(sp.height(split, p))) / n
    m2 = (2 * n - gc.inf_norm(spec, sp.project_W(split, p))) / n
    rec = gc.multiply(spec, sp.project_W(split, p), sp.project_V(split, p))
    scale = 1.0 + np.max(np.abs(p.as_vector()), axis=-1)
    err = np.max(np.abs(rec.as_vector() - p.as_vector()), axis=-1) / scale
    m3 = (1e-13 - err) / 1e-13
    return _result("projections", spec.name, np.minimum(np.minimum(m1, m2), m3), tol=1e-12)


def _random_orthogonal(rng, n, m):
    return np.linalg.qr(rng.standard_normal((n, m, m)))[0]


def suite_rotation(spec, seed, samples):
    """Operator norms of each ``B^j`` are preserved by ``B -> M B M^T``."""
    rng = _rng(seed, "rotation", spec.name)
    margins = np.empty(samples)
    base = np.linalg.norm(spec.B, 2, axis=(-2, -1))
    for lo in range(0, samples, CHUNK):
        M = _random_orthogonal(rng, min(CHUNK, samples - lo), spec.m1)
        rot = np.linalg.norm(gc.rotated_tuple(spec.B, M), 2, axis=(-2, -1))
        d = np.max(np.abs(rot - base), axis=-1)
        margins[lo:lo + len(M)] = (1e-12 - d) / 1e-12
    return _result("rotation", spec.name, margins)


def suite_cone_i(spec, seed, samples):
    """Every ``q`` lies in ``C+(p * s nu, alpha)`` for some ``s = s0 - 2^k``."""
    rng = _rng(seed, "cone_i", spec.name)
    split = _random_split(spec, rng)
    alpha = _log_uniform(rng, 1e-2, 1e2, samples)
    p = gc.random_points(spec, rng, samples)
    q = gc.random_points(spec, rng, samples)
    s0 = rng.normal(0.0, 10.0, samples)
    best = np.full(samples, -1.0)
    found = np.zeros(samples, dtype=bool)
    for k in range(SCAN_STEPS):
        vertex = gc.multiply(spec, p, sp.axis_point(split, s0 - 2.0**k))
        rel = _signed_margin(split, vertex, q, alpha, +1.0)
        hit = (rel > INTERIOR_MARGIN) & ~found
        best = np.where(hit, rel, best)
        found |= hit
    return _result("cone_i", spec.name, best)


def suite_cone_ii(spec, seed, samples):
    """``C-(0, alpha) in iota(C+(0, alpha + eps2 sqrt(alpha C))))``."""
    rng = _rng(seed, "cone_ii", spec.name)
    split = _random_split(spec, rng)
    alpha = _log_uniform(rng, 1e-2, 1e2, samples)
    p = sample_cone_points(split, rng, alpha, samples, sign=-1.0)
    a2 = sp.cone_inversion_aperture(alpha, spec)
    m = _signed_margin(split, gc.Point.zero(spec), gc.inverse(p), a2, +1.0)
    return _result("cone_ii", spec.name, m)


def suite_cone_iii(spec, seed, samples):
    """``p in C(0, alpha)``, ``q in C(p, beta)`` imply ``q in C(0, gamma)`` (both signs)."""
    rng = _rng(seed, "cone_iii", spec.name)
    split = _random_split(spec, rng)
    alpha = _log_uniform(rng, 1e-2, 1e2, samples)
    beta = _log_uniform(rng, 1e-2, 1e2, samples)
    margins = np.empty(samples)
    for sg in (1.0, -1.0):
        idx = slice(0, samples // 2) if sg > 0 else slice(samples // 2, samples)
        a, b = alpha[idx], beta[idx]
        p = sample_cone_points(split, rng, a, len(a), sign=sg)
        d = sample_cone_points(split, rng, b, len(b), sign=sg)
        q = gc.multiply(spec, p, d)
        g = sp.cone_gamma(a, b, spec)
        margins[idx] = _signed_margin(split, gc.Point.zero(spec), q, g, sg)
    return _result("cone_iii", spec.name, margins)


def random_b_tuple(rng: np.random.Generator, max_m1: int = 6, max_m2: int = 2) -> gc.GroupSpec:
    """Random valid B-tuple mixing generic, sparse-integer and planted rank-2 pencils."""
    while True:
        m1 = int(rng.integers(2, max_m1 + 1))
        m2 = int(rng.integers(1, max_m2 + 1))
        if m2 > m1 * (m1 - 1) // 2:
            continue
        kind = int(rng.integers(0, 3))
        B = np.zeros((m2, m1, m1))
        for j in range(m2):
            if kind == 0:
                A = rng.standard_normal((m1, m1))
            else:
                A = rng.integers(-2, 3, (m1, m1)).astype(float)
                if kind == 1:
                    A *= rng.random((m1, m1)) < 0.4
            B[j] = np.triu(A, 1) - np.triu(A, 1).T
        if kind == 2:
            # plant lam = (1, mu) with lam . B of rank 2
            u = rng.integers(-2, 3, m1).astype(float)
            v = rng.integers(-2, 3, m1).astype(float)
            R = np.outer(u, v) - np.outer(v, u)
            mu = float(rng.integers(-2, 3)) if m2 == 2 else 0.0
            B[0] = R - (mu * B[1] if m2 == 2 else 0.0)
        try:
            return gc.make_group_spec(m1, m2, B, name="random")
        except ValidationError:
            continue


def suite_plentiful_oracle(seed, samples, n_subspaces=2000):
    """Exact pencil verdict vs brute-force hyperplane oracle on random tuples."""
    rng = _rng(seed, "plentiful_oracle", "random")
    margins = np.empty(samples)
    for i in range(samples):
        spec = random_b_tuple(rng)
        exact = cl.is_plentiful(spec).plentiful
        oracle, _ = cl.plentiful_bruteforce_oracle(spec, n_subspaces, seed=seed + i)
        oracle = "yes" if oracle == "yes-evidence" else "no"
        margins[i] = 1.0 if exact == oracle else -1.0
    return _result("plentiful_oracle", "random", margins)


def suite_witness(spec, seed, samples):
    """A 'no' verdict's witness v is confirmed by the hyperplane oracle."""
    rep = cl.is_plentiful(spec, seed=seed)
    if rep.plentiful != "no":
        return _result("witness", spec.name, [])
    A = np.tensordot(rep.witness_lambda, spec.B, axes=1)
    r = np.linalg.matrix_rank(A, tol=cl.RANK_TOL * np.linalg.norm(A, 2))
    verdict, _ = cl.plentiful_bruteforce_oracle(spec, v=rep.witness_v)
    return _result("witness", spec.name, [1.0 if (r == 2 and verdict == "no") else -1.0])


def suite_htype_covariance(spec, seed, samples):
    """The H-type verdict is unchanged by orthogonal changes of horizontal basis."""
    rng = _rng(seed, "htype_cov", spec.name)
    base = cl.is_h_type(spec)[0]
    margins = np.empty(samples)
    for lo in range(0, samples, CHUNK):
        M = _random_orthogonal(rng, min(CHUNK, samples - lo), spec.m1)
        ok = cl.h_type_residuals(gc.rotated_tuple(spec.B, M)) <= cl.HTYPE_TOL
        margins[lo:lo + len(M)] = np.where(ok == base, 1.0, -1.0)
    return _result("htype_cov", spec.name, margins)


def suite_catalog(seed, samples):
    margins = []
    for e in cl.builtin_catalog():
        rep = cl.is_plentiful(e.spec, seed=seed)
        margins.append(1.0 if (rep.plentiful, rep.htype) ==
                       (e.expected_plentiful, e.expected_htype) else -1.0)
    return _result("catalog", "all", margins)


DEFAULT_COUNTS = {
    "triangle": 1_000_000,
    "sandwich": 100_000,
    "projections": 100_000,
    "rotation": 100,
    "cone_i": 10_000,
    "cone_ii": 10_000,
    "cone_iii": 10_000,
    "witness": 1,
    "htype_cov": 20,
}

PER_GROUP = {
    "triangle": suite_triangle,
    "sandwich": suite_sandwich,
    "projections": suite_projections,
    "rotation": suite_rotation,
    "cone_i": suite_cone_i,
    "cone_ii": suite_cone_ii,
    "cone_iii": suite_cone_iii,
    "witness": suite_witness,
    "htype_cov": suite_htype_covariance,
}

GLOBAL = {
    "catalog": (suite_catalog, 1),
    "plentiful_oracle": (suite_plentiful_oracle, 200),
}

SUITES = tuple(PER_GROUP) + tuple(GLOBAL)


def run_suites(seed: int = gc.DEFAULT_SEED, samples: int | None = None, threads: int = 1,
               suites=None, groups=None) -> list[SuiteResult]:
    """Run the selected suites over the catalog groups.

    ``samples`` (if given) replaces every per-suite default count.  Results
    come back in a fixed order regardless of ``threads``.
    """
    suites = list(SUITES if suites is None else suites)
    for s in suites:
        if s not in SUITES:
            raise ValidationError(f"unknown suite {s!r} (available: {', '.join(SUITES)})")
    catalog = [e.spec for e in cl.builtin_catalog()]
    if groups is not None:
        catalog = [cl.builtin(g) for g in groups]
    jobs = []
    for s in suites:
        if s in PER_GROUP:
            n = DEFAULT_COUNTS[s] if samples is None else samples
            for spec in catalog:
                jobs.append((PER_GROUP[s], (spec, seed, n)))
        else:
            fn, n = GLOBAL[s]
            jobs.append((fn, (seed, n if samples is None else min(samples, n))))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(fn, *a) for fn, a in jobs]
            return [f.result() for f in futures]
    return [fn(*a) for fn, a in jobs]


def summary_text(results, seed: int) -> str:
    lines = [f"carnotlab check seed={seed}"]
    lines += [r.line() for r in results]
    total = sum(r.violations for r in results)
    lines.append(f"total_violations={total}")
    return "\n".join(lines) + "\n"

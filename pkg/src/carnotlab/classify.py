"""Structural classification of step-2 stratified algebras.

A group is *plentiful* when every hyperplane of the first layer still
brackets onto the whole second layer.  Dualising, a hyperplane ``v^perp``
fails iff some nonzero functional ``lam`` on V2 kills all brackets on it, i.e.
the skew form ``A(lam) = sum_j lam_j B^j`` vanishes on ``v^perp``.  A nonzero
skew form vanishes on a hyperplane exactly when it has rank 2, and then every
unit ``v`` in its image is a witness.  So

    plentiful  <=>  no nonzero lam makes A(lam) a rank-2 matrix.

For ``m2 <= 2`` this is decided exactly from the 4x4 principal Pfaffians of
the pencil (rank <= 2 iff all of them vanish), in rational arithmetic.
For ``m2 >= 3`` the verdict is certified-numeric: a witness is searched by
multi-start minimisation of ``sigma_3(A(lam))``, and a "yes" is only issued
when a covering net of the lambda-sphere proves ``sigma_3 > 0`` everywhere.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .errors import ParseError, ValidationError
from .group import DEFAULT_SEED, GroupSpec, make_group_spec

RANK_TOL = 1e-9
POLISH_ITERS = 60
HTYPE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LieSpec:
    m1: int
    m2: int
    c: np.ndarray  # c[j, i, k]: coefficient of T_j in [X_i, X_k]
    name: str = ""


@dataclass
class ClassificationReport:
    plentiful: str  # "yes" | "no" | "uncertain"
    htype: str  # "yes" | "no"
    mode: str  # "exact" | "certified-numeric"
    min_pencil_rank: int
    witness_lambda: np.ndarray | None = None
    witness_v: np.ndarray | None = None
    htype_violation: tuple | None = None
    htype_residual: float = 0.0
    min_sigma3_ratio: float | None = None
    certificate: dict = field(default_factory=dict)
    group: str = ""

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else [float(v) for v in a]

        return {
            "group": self.group,
            "plentiful": self.plentiful,
            "htype": self.htype,
            "mode": self.mode,
            "min_pencil_rank": self.min_pencil_rank,
            "witness_lambda": arr(self.witness_lambda),
            "witness_v": arr(self.witness_v),
            "htype_violation": None if self.htype_violation is None else list(self.htype_violation),
            "htype_residual": self.htype_residual,
            "min_sigma3_ratio": self.min_sigma3_ratio,
            "certificate": self.certificate,
        }


# ---------------------------------------------------------------------------
# parsing / conversion


def _json_loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None


def lie_spec_from_brackets(m1: int, m2: int, brackets, name: str = "") -> LieSpec:
    """Build a :class:`LieSpec` from 1-based ``(i, k, j, value)`` entries."""
    if not isinstance(m1, int) or not isinstance(m2, int) or m1 < 2 or m2 < 1:
        raise ValidationError(f"need integers m1 >= 2, m2 >= 1 (got {m1!r}, {m2!r})")
    c = np.zeros((m2, m1, m1))
    seen = {}
    for n, entry in enumerate(brackets):
        try:
            i, k, j, value = entry
            i, k, j = int(i), int(k), int(j)
            value = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"bracket entry {n} must be [i, k, j, value], got {entry!r}") from None
        if not (1 <= i <= m1 and 1 <= k <= m1 and 1 <= j <= m2):
            raise ValidationError(f"bracket entry {n} has an index out of range: {entry!r}")
        if i == k:
            if value != 0.0:
                raise ValidationError(f"bracket entry {n}: [X_{i}, X_{i}] must vanish")
            continue
        key, sign = ((i, k, j), 1.0) if i < k else ((k, i, j), -1.0)
        v = sign * value
        if key in seen and seen[key] != v:
            raise ValidationError(
                f"inconsistent duplicate for [X_{key[0]}, X_{key[1]}] on T_{j}: "
                f"{seen[key]} vs {v}"
            )
        seen[key] = v
    for (i, k, j), v in seen.items():
        c[j - 1, i - 1, k - 1] = v
        c[j - 1, k - 1, i - 1] = -v
    flat = c.reshape(m2, -1)
    s = np.linalg.svd(flat, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise ValidationError("brackets do not generate V2 (structure matrices are dependent)")
    c.setflags(write=False)
    return LieSpec(m1=m1, m2=m2, c=c, name=name)


def parse_lie_spec(text: str) -> LieSpec:
    """Parse a JSON Lie-spec: ``{"m1":..,"m2":..,"brackets":[[i,k,j,v],..]}``.

    Indices are 1-based.  Antisymmetric partners are filled in; entries given
    in both orders must agree.
    """
    data = _json_loads(text)
    if not isinstance(data, dict):
        raise ParseError("top-level value must be an object")
    for key in ("m1", "m2", "brackets"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    return lie_spec_from_brackets(data["m1"], data["m2"], data["brackets"], data.get("name", ""))


def to_group_spec(ls: LieSpec, eps2: float | None = None) -> GroupSpec:
    # (B^j)_{ki} = c[j][i][k]
    B = np.transpose(ls.c, (0, 2, 1))
    return make_group_spec(ls.m1, ls.m2, B, eps2=eps2, name=ls.name)


def lie_spec_of(spec: GroupSpec) -> LieSpec:
    c = np.transpose(spec.B, (0, 2, 1)).copy()
    return LieSpec(spec.m1, spec.m2, c, spec.name)


# ---------------------------------------------------------------------------
# plentifulness


def _pencil(B: np.ndarray, lam) -> np.ndarray:
    return np.tensordot(np.asarray(lam, dtype=float), B, axes=1)


def _image_unit_vector(A: np.ndarray) -> np.ndarray:
    U, _, _ = np.linalg.svd(A)
    v = U[:, 0]
    return v / np.linalg.norm(v)


def _numeric_rank(A: np.ndarray) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        coef = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] -= coef * bc
        a = _poly_trim(a)
    return a


def _poly_gcd(a, b):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _pfaffian_quadratics(B: np.ndarray):
    """Coefficients (c0, c1, c2) of Pf_S(lam1 B1 + lam2 B2) in lam1^2, lam1 lam2, lam2^2.

    One triple per 4-subset S of indices, computed in exact rationals from the
    binary64 entries.
    """
    m2, m1, _ = B.shape
    F = [[[Fraction(float(B[j, a, b])) for b in range(m1)] for a in range(m1)] for j in range(m2)]
    out = []
    for i, j, k, l in itertools.combinations(range(m1), 4):
        def entry(a, b):
            return [F[r][a][b] for r in range(m2)] + [Fraction(0)] * (2 - m2)

        pairs = [((i, j), (k, l), 1), ((i, k), (j, l), -1), ((i, l), (j, k), 1)]
        c = [Fraction(0)] * 3
        for (a, b), (d, e), sgn in pairs:
            u, w = entry(a, b), entry(d, e)
            c[0] += sgn * u[0] * w[0]
            c[1] += sgn * (u[0] * w[1] + u[1] * w[0])
            c[2] += sgn * u[1] * w[1]
        out.append(tuple(c))
    return out


def _exact_plentiful(spec: GroupSpec) -> ClassificationReport:
    B = spec.B
    m1, m2 = spec.m1, spec.m2
    if m1 < 4:
        # every skew matrix of size <= 3 has rank <= 2
        lam = np.eye(m2)[0]
        return ClassificationReport("no", "", "exact", _numeric_rank(B[0]),
                                    witness_lambda=lam, witness_v=_image_unit_vector(B[0]))
    quads = [q for q in _pfaffian_quadratics(B) if any(c != 0 for c in q)]
    roots = []  # projective points (lam1, lam2) as floats
    if m2 == 1:
        if not quads:
            roots.append((1.0, 0.0))
    else:
        if not quads:
            roots.append((1.0, 0.0))
        else:
            # point at infinity lam = (0, 1)
            if all(q[2] == 0 for q in quads):
                roots.append((0.0, 1.0))
            # affine chart lam = (1, s): c0 + c1 s + c2 s^2
            g = []
            for q in quads:
                g = _poly_gcd(g, list(q)) if g else _poly_trim(list(q))
            g = _poly_trim(g)
            if len(g) == 2:
                roots.append((1.0, float(-g[0] / g[1])))
            elif len(g) == 3:
                a, b, c = g[2], g[1], g[0]
                disc = b * b - 4 * a * c
                if disc == 0:
                    roots.append((1.0, float(-b / (2 * a))))
                elif disc > 0:
                    sq = float(disc) ** 0.5
                    for sgn in (1.0, -1.0):
                        roots.append((1.0, (-float(b) + sgn * sq) / (2 * float(a))))
    if roots:
        lam = np.array(roots[0][:m2], dtype=float)
        lam /= np.linalg.norm(lam)
        A = _pencil(B, lam)
        return ClassificationReport("no", "", "exact", _numeric_rank(A),
                                    witness_lambda=lam, witness_v=_image_unit_vector(A),
                                    certificate={"pfaffian_minors": len(quads)})
    # plentiful: report the smallest rank seen among a few pencil members
    probes = [np.eye(m2)[r] for r in range(m2)]
    if m2 == 2:
        probes.append(np.array([1.0, 1.0]) / np.sqrt(2))
        probes.append(np.array([1.0, -1.0]) / np.sqrt(2))
    min_rank = min(_numeric_rank(_pencil(B, lam)) for lam in probes)
    return ClassificationReport("yes", "", "exact", min_rank,
                                certificate={"pfaffian_minors": len(quads)})


def _sphere_net(m2: int, k: int) -> tuple[np.ndarray, float]:
    """Radially projected cube-surface grid and its covering radius on S^{m2-1}."""
    ticks = -1.0 + (np.arange(k) + 0.5) * (2.0 / k)
    pts = []
    for axis in range(m2):
        for sign in (-1.0, 1.0):
            grids = np.meshgrid(*([ticks] * (m2 - 1)), indexing="ij")
            face = np.zeros((grids[0].size if m2 > 1 else 1, m2))
            others = [a for a in range(m2) if a != axis]
            for g, a in zip(grids, others):
                face[:, a] = g.ravel()
            face[:, axis] = sign
            pts.append(face)
    P = np.concatenate(pts)
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    delta = (1.0 / k) * np.sqrt(m2 - 1)
    return P, delta


def _sigma3_ratio(B, lam):
    lam = np.asarray(lam, dtype=float)
    nl = np.linalg.norm(lam)
    if nl == 0:
        return 1.0
    s = np.linalg.svd(_pencil(B, lam / nl), compute_uv=False)
    return s[2] / s[0] if s[0] > 0 else 1.0


def _numeric_plentiful(spec: GroupSpec, seed: int = DEFAULT_SEED, restarts: int = 16,
                       max_net: int = 64) -> ClassificationReport:
    B = spec.B
    m2 = spec.m2
    rng = np.random.default_rng(seed)
    # starts: best points of a coarse net plus seeded random directions
    P0, _ = _sphere_net(m2, 4)
    s0 = np.linalg.svd(np.tensordot(P0, B, axes=1), compute_uv=False)
    order = np.argsort(s0[:, 2] / s0[:, 0], kind="stable")
    starts = np.concatenate([P0[order[: restarts // 2]],
                             rng.standard_normal((restarts - restarts // 2, m2))])
    best_val, best_lam = np.inf, None
    for x0 in starts:  # fixed order: reproducible witness
        res = minimize(lambda l: _sigma3_ratio(B, l), x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 300 * m2})
        if res.fun < best_val:
            best_val, best_lam = float(res.fun), res.x / np.linalg.norm(res.x)
        if best_val < RANK_TOL:
            break
    if best_val < RANK_TOL:
        A = _pencil(B, best_lam)
        return ClassificationReport("no", "", "certified-numeric", _numeric_rank(A),
                                    witness_lambda=best_lam, witness_v=_image_unit_vector(A),
                                    min_sigma3_ratio=best_val)
    # sigma_3 is Lipschitz in lam with constant sqrt(sum_j ||B^j||_op^2)
    lip = float(np.sqrt(sum(np.linalg.norm(Bj, 2) ** 2 for Bj in B)))
    k = 4
    cert = {}
    while k <= max_net:
        P, delta = _sphere_net(m2, k)
        s = np.linalg.svd(np.tensordot(P, B, axes=1), compute_uv=False)
        lower = float(s[:, 2].min()) - lip * float(delta) - 1e-12 * lip
        cert = {"net_points": int(len(P)), "covering_radius": float(delta),
                "min_sigma3_on_net": float(s[:, 2].min()), "lipschitz": lip,
                "sigma3_lower_bound": lower}
        if lower > 0:
            ranks = [int(np.sum(row > RANK_TOL * row[0])) for row in s]
            return ClassificationReport("yes", "", "certified-numeric", min(ranks),
                                        min_sigma3_ratio=best_val, certificate=cert)
        k *= 2
    return ClassificationReport("uncertain", "", "certified-numeric",
                                _numeric_rank(_pencil(B, best_lam)),
                                min_sigma3_ratio=best_val, certificate=cert)


def is_plentiful(spec: GroupSpec, seed: int = DEFAULT_SEED) -> ClassificationReport:
    """Decide plentifulness; exact for ``m2 <= 2`` (or ``m1 <= 3``)."""
    if spec.m2 <= 2 or spec.m1 < 4:
        rep = _exact_plentiful(spec)
    else:
        rep = _numeric_plentiful(spec, seed=seed)
    ok, ij, res = is_h_type(spec)
    rep.htype = "yes" if ok else "no"
    rep.htype_violation = None if ok else ij
    rep.htype_residual = res
    rep.group = spec.name
    return rep


def _hyperplane_bases(V: np.ndarray) -> np.ndarray:
    """Orthonormal bases (rows) of ``v^perp`` for a stack of unit vectors."""
    V = np.atleast_2d(V)
    m1 = V.shape[1]
    stacked = np.concatenate([V[:, :, None], np.broadcast_to(np.eye(m1), (len(V), m1, m1))], axis=2)
    Q, _ = np.linalg.qr(stacked)
    return np.transpose(Q[:, :, 1:m1], (0, 2, 1))


def _commutator_matrices(spec: GroupSpec, V: np.ndarray) -> np.ndarray:
    U = _hyperplane_bases(V)
    G = np.einsum("jab,ncb,nda->njcd", spec.B, U, U)  # G[n,j,c,d] = u_d . B^j u_c
    iu = np.triu_indices(U.shape[1], k=1)
    return G[:, :, iu[0], iu[1]]


def commutator_matrix(spec: GroupSpec, v) -> np.ndarray:
    """``m2 x (m1-1)(m1-2)/2`` matrix of ``<B^j u_a, u_b>`` over a basis of v^perp."""
    v = np.asarray(v, dtype=float)
    return _commutator_matrices(spec, (v / np.linalg.norm(v))[None])[0]


def _tuple_scale(spec: GroupSpec) -> float:
    return float(max(np.linalg.norm(Bj, 2) for Bj in spec.B))


def _commutator_ranks(K: np.ndarray, scale: float) -> np.ndarray:
    """Row ranks of a stack of commutator matrices; singular values are
    compared against the size of the B-tuple, not of K itself, so a K that
    vanishes up to rounding counts as rank 0."""
    if K.shape[-1] == 0:
        return np.zeros(K.shape[0], dtype=int)
    s = np.linalg.svd(K, compute_uv=False)
    return np.sum(s > RANK_TOL * scale, axis=-1)


def _witness_residual(spec: GroupSpec, Z: np.ndarray) -> np.ndarray:
    """Batched residual of ``(v, lam)``: ``A(lam)`` restricted to ``v^perp``
    (upper triangle of ``P A P``) plus the normalisations ``|v| = |lam| = 1``."""
    m1 = spec.m1
    v, lam = Z[:, :m1], Z[:, m1:]
    nv2 = np.sum(v * v, axis=1)
    P = np.eye(m1) - v[:, :, None] * v[:, None, :] / nv2[:, None, None]
    R = P @ np.einsum("nj,jab->nab", lam, spec.B) @ P
    iu = np.triu_indices(m1, 1)
    return np.concatenate([R[:, iu[0], iu[1]], (nv2 - 1.0)[:, None],
                           (np.sum(lam * lam, axis=1) - 1.0)[:, None]], axis=1)


def _polish_witnesses(spec: GroupSpec, V0: np.ndarray, K0: np.ndarray,
                      iters: int = POLISH_ITERS) -> np.ndarray:
    """Batched Levenberg-Marquardt on :func:`_witness_residual` from each start.

    ``lam`` starts at the best pencil direction for the sampled ``v`` (the
    smallest left singular vector of its commutator matrix).  Jacobians are
    central differences; the problem has zero residual at a witness, so
    Gauss-Newton steps converge there from a nearby start.
    """
    m1, m2 = spec.m1, spec.m2
    if K0.shape[-1]:
        U, _, _ = np.linalg.svd(K0)
        lam0 = U[:, :, -1]
    else:
        lam0 = np.tile(np.eye(m2)[0], (V0.shape[0], 1))
    Z = np.concatenate([V0, lam0], axis=1)
    nz = Z.shape[1]
    mu = np.full(Z.shape[0], 1e-3)
    r = _witness_residual(spec, Z)
    cost = np.sum(r * r, axis=1)
    eye = np.eye(nz)
    for _ in range(iters):
        J = np.empty(r.shape + (nz,))
        for k in range(nz):
            dz = np.zeros(nz)
            dz[k] = 1e-7
            J[:, :, k] = (_witness_residual(spec, Z + dz) - _witness_residual(spec, Z - dz)) / 2e-7
        JtJ = np.einsum("nrk,nrl->nkl", J, J)
        g = np.einsum("nrk,nr->nk", J, r)
        step = np.linalg.solve(JtJ + mu[:, None, None] * eye, -g[:, :, None])[:, :, 0]
        Zn = Z + step
        rn = _witness_residual(spec, Zn)
        cn = np.sum(rn * rn, axis=1)
        ok = cn < cost
        Z[ok], r[ok], cost[ok] = Zn[ok], rn[ok], cn[ok]
        mu = np.clip(np.where(ok, mu / 3.0, mu * 4.0), 1e-12, 1e12)
        if np.all(cost < 1e-28):
            break
    V = Z[:, :m1]
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def plentiful_bruteforce_oracle(spec: GroupSpec, n_subspaces: int = 2000,
                                seed: int = DEFAULT_SEED, v=None, polish: int = 128):
    """Test the definition directly on sampled hyperplanes ``v^perp``.

    Returns ``("no", v)`` for the first hyperplane whose commutators fail to
    span R^m2, else ``("yes-evidence", None)``.  ``v`` may be given to test a
    single hyperplane.  Because failing hyperplanes usually form a null set,
    the ``polish`` best-scoring samples are refined by a local least-squares
    search on the defining condition before declaring yes-evidence.
    """
    m1, m2 = spec.m1, spec.m2
    scale = _tuple_scale(spec)
    if v is not None:
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        rank = _commutator_ranks(commutator_matrix(spec, v)[None], scale)[0]
        return ("no", v) if rank < m2 else ("yes-evidence", None)
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((n_subspaces, m1))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    K = _commutator_matrices(spec, V)
    ranks = _commutator_ranks(K, scale)
    bad = np.flatnonzero(ranks < m2)
    if bad.size:
        return "no", V[bad[0]]
    s = np.linalg.svd(K, compute_uv=False)
    scores = s[:, m2 - 1] / scale
    pick = np.argsort(scores, kind="stable")[:polish]
    Vp = _polish_witnesses(spec, V[pick], K[pick])
    bad = np.flatnonzero(_commutator_ranks(_commutator_matrices(spec, Vp), scale) < m2)
    if bad.size:
        return "no", Vp[bad[0]]
    return "yes-evidence", None


# ---------------------------------------------------------------------------
# H-type


def h_type_residuals(B: np.ndarray) -> np.ndarray:
    """Max-abs residual of ``B^i B^j + B^j B^i + 2 delta_ij I`` over all pairs.

    ``B`` may be a stack ``(..., m2, m1, m1)``; returns one value per tuple.
    """
    m2, m1 = B.shape[-3], B.shape[-1]
    P = np.einsum("...iab,...jbc->...ijac", B, B)
    R = P + np.swapaxes(P, -3, -4) + 2.0 * np.einsum("ij,ac->ijac", np.eye(m2), np.eye(m1))
    return np.max(np.abs(R), axis=(-4, -3, -2, -1))


def is_h_type(spec: GroupSpec, tol: float = HTYPE_TOL):
    """Check ``B^i B^j + B^j B^i = -2 delta_ij I`` for all ``i <= j``.

    Returns ``(ok, (i, j) or None, residual)`` with the max-abs residual of
    the first violated pair (or of all pairs when ``ok``).
    """
    B = spec.B
    I = np.eye(spec.m1)
    worst = 0.0
    for i in range(spec.m2):
        for j in range(i, spec.m2):
            R = B[i] @ B[j] + B[j] @ B[i] + (2.0 * I if i == j else 0.0)
            r = float(np.max(np.abs(R)))
            if r > tol:
                return False, (i, j), r
            worst = max(worst, r)
    return True, None, worst


# ---------------------------------------------------------------------------
# catalog


def _heisenberg_B(n: int) -> np.ndarray:
    B = np.zeros((1, 2 * n, 2 * n))
    for a in range(n):
        B[0, 2 * a + 1, 2 * a] = 1.0
        B[0, 2 * a, 2 * a + 1] = -1.0
    return B


def _quaternion_B() -> np.ndarray:
    # left multiplication by i, j, k on H = R^4 with basis (1, i, j, k)
    Li = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    Lj = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    Lk = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    return np.array([Li, Lj, Lk], dtype=float)


G752_BRACKETS = [(1, 2, 1, 1.0), (3, 4, 1, 1.0), (1, 5, 2, 1.0), (2, 3, 2, 1.0)]
F32_BRACKETS = [(1, 2, 1, 1.0), (1, 3, 2, 1.0), (2, 3, 3, 1.0)]


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    spec: GroupSpec
    expected_plentiful: str
    expected_htype: str


_CATALOG = None


def builtin_catalog() -> list[CatalogEntry]:
    """Reference groups with their expected classification."""
    global _CATALOG
    if _CATALOG is None:
        entries = []
        for n in (1, 2, 3):
            spec = make_group_spec(2 * n, 1, _heisenberg_B(n), name=f"h{n}")
            entries.append(CatalogEntry(spec, "no" if n == 1 else "yes", "yes"))
        g752 = to_group_spec(lie_spec_from_brackets(5, 2, G752_BRACKETS, "g752"))
        entries.append(CatalogEntry(g752, "yes", "no"))
        f32 = to_group_spec(lie_spec_from_brackets(3, 3, F32_BRACKETS, "f32"))
        entries.append(CatalogEntry(f32, "no", "no"))
        quat = make_group_spec(4, 3, _quaternion_B(), name="quat")
        entries.append(CatalogEntry(quat, "yes", "yes"))
        _CATALOG = entries
    return list(_CATALOG)


def builtin(name: str) -> GroupSpec:
    for e in builtin_catalog():
        if e.spec.name == name:
            return e.spec
    names = ", ".join(e.spec.name for e in builtin_catalog())
    raise ValidationError(f"unknown builtin group {name!r} (available: {names})")

"""Step-2 Carnot groups in exponential coordinates.

A group is encoded by an ``m2``-tuple of skew-symmetric ``m1 x m1`` matrices
``B``; points are pairs ``(x, t)`` with ``x`` in R^m1 and ``t`` in R^m2 and the
product is

    (x, t) * (xi, tau) = (x + xi, t + tau + 1/2 <B x, xi>),

where ``<B x, xi>_j = xi . B^j x``.  With this convention the commutator of the
basis fields satisfies ``[X_i, X_k]_j = B^j[k, i]``.

Every operation broadcasts over leading batch dimensions: a :class:`Point` may
hold arrays of shape ``(..., m1)`` and ``(..., m2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SKEW_TOL = 0.0
ORTHO_TOL = 1e-12
DEFAULT_SEED = 0


@dataclass(frozen=True, eq=False)
class Point:
    """Group element (or batch of elements) in exponential coordinates."""

    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))

    @classmethod
    def zero(cls, spec: "GroupSpec") -> "Point":
        return cls(np.zeros(spec.m1), np.zeros(spec.m2))

    @classmethod
    def from_vector(cls, v, m1: int) -> "Point":
        v = np.asarray(v, dtype=float)
        return cls(v[..., :m1], v[..., m1:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.t], axis=-1)

    def __getitem__(self, idx) -> "Point":
        return Point(self.x[idx], self.t[idx])

    def __len__(self):
        return self.x.shape[0]

    def __repr__(self):
        return f"Point(x={self.x!r}, t={self.t!r})"


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """Validated description of a step-2 Carnot group.

    Build instances with :func:`make_group_spec`; the constructor itself does
    not validate.
    """

    name: str
    m1: int
    m2: int
    B: np.ndarray = field(repr=False)
    eps2: float
    bound_C: float

    @property
    def Q(self) -> int:
        return self.m1 + 2 * self.m2

    @property
    def n(self) -> int:
        return self.m1 + self.m2

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "m1": self.m1,
            "m2": self.m2,
            "B": self.B.tolist(),
            "eps2": self.eps2,
        }


def _check_skew_tuple(B: np.ndarray) -> None:
    m2, m1, _ = B.shape
    for j in range(m2):
        S = B[j] + B[j].T
        bad = np.argwhere(np.abs(S) > SKEW_TOL)
        if bad.size:
            a, b = bad[0]
            raise ValidationError(
                f"B[{j}] is not skew-symmetric: B[{j}][{a},{b}]={B[j][a, b]!r} "
                f"but B[{j}][{b},{a}]={B[j][b, a]!r}"
            )
    flat = B.reshape(m2, m1 * m1)
    s = np.linalg.svd(flat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise ValidationError("the B-tuple is linearly dependent (V2 is not generated)")


def _op_norm_bound(B: np.ndarray, restarts: int = 24, seed: int = DEFAULT_SEED,
                   max_iter: int = 500) -> float:
    """sup over unit lambda of ||sum_j lambda_j B^j||_op, by block ascent.

    Given lambda the inner sup over unit (x, xi) is the top singular value;
    given (x, xi) the best lambda is the normalised bracket vector.
    """
    m2 = B.shape[0]
    if m2 == 1:
        return float(np.linalg.norm(B[0], 2))
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        lam = rng.standard_normal(m2)
        lam /= np.linalg.norm(lam)
        val = -1.0
        for _ in range(max_iter):
            A = np.tensordot(lam, B, axes=1)
            U, S, Vt = np.linalg.svd(A)
            x, xi = Vt[0], U[:, 0]
            b = np.einsum("jab,b,a->j", B, x, xi)
            nb = np.linalg.norm(b)
            if nb == 0.0:
                break
            lam = b / nb
            if nb - val <= 1e-15 * max(nb, 1.0):
                val = nb
                break
            val = nb
        best = max(best, val, float(np.linalg.norm(np.tensordot(lam, B, axes=1), 2)))
    return best


def default_eps2(bound_C: float) -> float:
    """min{0.9, 2/sqrt(C)}: sufficient for the triangle inequality of d_inf."""
    if bound_C <= 0:
        return 0.9
    return min(0.9, 2.0 / np.sqrt(bound_C))


def make_group_spec(m1: int, m2: int, B, eps2: float | None = None, name: str = "",
                    check_trials: int = 20000, seed: int = DEFAULT_SEED) -> GroupSpec:
    """Validate a B-tuple and return a :class:`GroupSpec`.

    ``bound_C`` is computed by :func:`bound_constant`.  When ``eps2`` is given
    it must lie in (0, 1] and pass a seeded randomized triangle-inequality
    check with ``check_trials`` triples; otherwise the default
    ``min{0.9, 2/sqrt(C)}`` is used.
    """
    if m1 < 2 or m2 < 1:
        raise ValidationError(f"need m1 >= 2 and m2 >= 1, got m1={m1}, m2={m2}")
    B = np.array(B, dtype=float)
    if B.ndim == 2:
        B = B[None]
    if B.shape != (m2, m1, m1):
        raise ValidationError(f"B must have shape ({m2}, {m1}, {m1}), got {B.shape}")
    if not np.all(np.isfinite(B)):
        raise ValidationError("B has non-finite entries")
    _check_skew_tuple(B)
    B.setflags(write=False)
    C = float(_op_norm_bound(B))
    spec = GroupSpec(name=name, m1=m1, m2=m2, B=B, eps2=default_eps2(C), bound_C=C)
    if eps2 is not None:
        eps2 = float(eps2)
        if not 0.0 < eps2 <= 1.0:
            raise ValidationError(f"eps2 must lie in (0, 1], got {eps2}")
        spec = GroupSpec(name=name, m1=m1, m2=m2, B=B, eps2=eps2, bound_C=C)
        calibrate_epsilon2(spec, trials=check_trials, seed=seed, eps2=eps2)
    return spec


def _check_dims(spec: GroupSpec, *points: Point) -> None:
    for p in points:
        if p.x.shape[-1] != spec.m1 or p.t.shape[-1] != spec.m2:
            raise ValidationError(
                f"point dimensions ({p.x.shape[-1]}, {p.t.shape[-1]}) do not match "
                f"group ({spec.m1}, {spec.m2})"
            )


def bracket(spec: GroupSpec, x, xi) -> np.ndarray:
    """The vector ``<B x, xi>`` in R^m2 (batched)."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if x.shape[-1] != spec.m1 or xi.shape[-1] != spec.m1:
        raise ValidationError("bracket: horizontal dimension mismatch")
    return np.einsum("jab,...b,...a->...j", spec.B, x, xi)


def multiply(spec: GroupSpec, p: Point, q: Point) -> Point:
    _check_dims(spec, p, q)
    return Point(p.x + q.x, p.t + q.t + 0.5 * bracket(spec, p.x, q.x))


def inverse(p: Point) -> Point:
    return Point(-p.x, -p.t)


def dilate(lam: float, p: Point) -> Point:
    if lam < 0:
        raise ValidationError(f"dilation factor must be >= 0, got {lam}")
    return Point(lam * p.x, lam * lam * p.t)


def inf_norm(spec: GroupSpec, p: Point):
    """max{|x|, eps2 * sqrt|t|}."""
    hx = np.linalg.norm(p.x, axis=-1)
    vt = spec.eps2 * np.sqrt(np.linalg.norm(p.t, axis=-1))
    return np.maximum(hx, vt)


def distance(spec: GroupSpec, p: Point, q: Point):
    return inf_norm(spec, multiply(spec, inverse(q), p))


def bound_constant(spec: GroupSpec, restarts: int = 24, seed: int = DEFAULT_SEED) -> float:
    """Smallest C with ``|<Bx, xi>| <= C |x| |xi|``.

    Equals the sup over unit x of the top singular value of the ``m1 x m2``
    matrix ``[B^1 x, ..., B^m2 x]``, computed by multi-start block ascent.
    """
    return _op_norm_bound(spec.B, restarts=restarts, seed=seed)


def random_points(spec: GroupSpec, rng: np.random.Generator, size: int,
                  spread: float = 2.0) -> Point:
    """Points with log-uniform horizontal and vertical scales.

    Mixing scales independently puts mass near both the horizontal and the
    vertical branch of the norm, which is where inequalities get tight.
    """
    x = rng.standard_normal((size, spec.m1))
    t = rng.standard_normal((size, spec.m2))
    x *= np.exp(rng.uniform(-spread, spread, size))[:, None]
    t *= np.exp(rng.uniform(-2 * spread, 2 * spread, size))[:, None]
    return Point(x, t)


def calibrate_epsilon2(spec: GroupSpec, trials: int = 10**6, seed: int = DEFAULT_SEED,
                       eps2: float | None = None, chunk: int = 100_000):
    """Return ``(eps2, report)`` after a randomized triangle-inequality audit.

    ``eps2`` defaults to ``min{0.9, 2/sqrt(C)}``.  The report lists the number
    of seeded triples tested, violations, and the worst relative slack
    ``(d(p,r) + d(r,q) - d(p,q)) / (d(p,r) + d(r,q))``.

    Raises
    ------
    ValidationError
        If any triple violates the inequality beyond ``1e-12`` relative.
    """
    if eps2 is None:
        eps2 = default_eps2(spec.bound_C)
    s = GroupSpec(spec.name, spec.m1, spec.m2, spec.B, float(eps2), spec.bound_C)
    rng = np.random.default_rng(seed)
    violations = 0
    worst = np.inf
    first_bad = None
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        p, q, r = (random_points(s, rng, k) for _ in range(3))
        lhs = distance(s, p, q)
        rhs = distance(s, p, r) + distance(s, r, q)
        slack = (rhs - lhs) / np.maximum(rhs, 1e-300)
        bad = slack < -1e-12
        if bad.any() and first_bad is None:
            first_bad = done + int(np.argmax(bad))
        violations += int(bad.sum())
        worst = min(worst, float(slack.min()))
        done += k
    report = {
        "group": spec.name,
        "eps2": float(eps2),
        "bound_C": spec.bound_C,
        "trials": trials,
        "seed": seed,
        "violations": violations,
        "worst_relative_slack": worst,
    }
    if violations:
        report["first_violation_index"] = first_bad
        raise ValidationError(
            f"eps2={eps2} violates the triangle inequality on {violations} of {trials} "
            f"triples (seed {seed}, first index {first_bad})"
        )
    return float(eps2), report


def rotated_tuple(B: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``M B^j M^T`` for every ``j``; ``M`` may be a stack ``(..., m1, m1)``."""
    Bt = np.einsum("...ab,jbc,...dc->...jad", M, B, M)
    # re-skew: rounding in the triple product can leave 1e-17 asymmetry
    return 0.5 * (Bt - np.swapaxes(Bt, -1, -2))


def rotate_basis(spec: GroupSpec, M) -> GroupSpec:
    """Express the group in the horizontal basis ``x' = M x`` (``B~ = M B M^T``).

    The rotated spec keeps ``eps2`` and ``bound_C``; both are invariant under
    an orthogonal change of horizontal basis.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (spec.m1, spec.m1):
        raise ValidationError(f"M must be {spec.m1}x{spec.m1}")
    if np.max(np.abs(M @ M.T - np.eye(spec.m1))) > ORTHO_TOL:
        raise ValidationError("M is not orthogonal")
    Bt = rotated_tuple(spec.B, M)
    Bt.setflags(write=False)
    return GroupSpec(spec.name, spec.m1, spec.m2, Bt, spec.eps2, spec.bound_C)


def structure_constants(spec: GroupSpec) -> np.ndarray:
    """c[j][i][k] with [X_i, X_k] = sum_j c[j][i][k] T_j."""
    return np.transpose(spec.B, (0, 2, 1)).copy()

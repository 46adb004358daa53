import numpy as np
import pytest

from carnotlab import group as gc
from carnotlab import ilip
from carnotlab import splitting as sp
from carnotlab.classify import builtin
from carnotlab.errors import ValidationError
from carnotlab.grid import Grid


def random_split(name, seed):
    spec = builtin(name)
    rng = np.random.default_rng(seed)
    nu = rng.standard_normal(spec.m1)
    return sp.make_splitting(spec, nu / np.linalg.norm(nu)), rng


def test_graph_map_hand_value():
    split = sp.make_splitting(builtin("h1"), [1.0, 0.0])
    p = ilip.graph_map(split, np.array([1.0, 0.0]), 1.0)  # w = (x2, t) = (1, 0)
    np.testing.assert_allclose(p.as_vector(), [1.0, 1.0, -0.5])
    np.testing.assert_allclose(ilip.graph_map(split, np.array([1.0, 0.3]), 0.0).as_vector(),
                               [0.0, 1.0, 0.3])


@pytest.mark.parametrize("name", ["h1", "h2", "g752", "quat"])
def test_graph_map_round_trip(name):
    split, rng = random_split(name, 0)
    w = rng.standard_normal((1000, split.wdim))
    s = rng.standard_normal(1000)
    p = ilip.graph_map(split, w, s)
    np.testing.assert_allclose(sp.height(split, p), s, atol=1e-13)
    np.testing.assert_allclose(sp.to_w(split, p), w, atol=1e-13)


@pytest.mark.parametrize("name", ["h1", "h2", "g752", "f32"])
def test_graph_gap_matches_group_operations(name):
    split, rng = random_split(name, 1)
    spec = split.spec
    W, Wp = rng.standard_normal((2, 200, split.wdim))
    ph, s = rng.standard_normal((2, 200))
    fast = ilip.graph_gap(split, Wp, ph, W)
    P, Q = ilip.graph_map(split, Wp, ph), ilip.graph_map(split, W, s)
    slow = gc.inf_norm(spec, sp.project_W(split, gc.multiply(spec, gc.inverse(P), Q)))
    np.testing.assert_allclose(fast, slow, atol=1e-13, rtol=1e-13)
    assert np.all(ilip.graph_gap(split, W, ph, W) == 0.0)


def test_lip_constant_estimate():
    split, rng = random_split("h2", 2)
    w = rng.standard_normal((6, split.wdim))
    assert ilip.lip_constant_estimate(ilip.SampleSet(split, w, np.full(6, 0.4))) == 0.0
    v = rng.standard_normal(6) * 0.1
    pair = ilip.SampleSet(split, w[:2], v[:2])
    gap = ilip.graph_gap(split, w[1], v[1], w[0])
    assert ilip.lip_constant_estimate(pair) == pytest.approx(abs(v[0] - v[1]) / gap, rel=1e-14)
    full = ilip.lip_constant_estimate(ilip.SampleSet(split, w, v))
    assert full >= ilip.lip_constant_estimate(pair)
    with pytest.raises(ValidationError):
        ilip.SampleSet(split, np.vstack([w[0], w[0]]), [0.0, 1.0])


def test_cone_form_equals_quotient_form():
    rng = np.random.default_rng(3)
    names = ["h1", "h2", "g752", "f32"]
    agree = 0
    for k in range(1000):
        split = sp.make_splitting(builtin(names[k % 4]),
                                  np.eye(builtin(names[k % 4]).m1)[0])
        N = int(rng.integers(2, 6))
        S = ilip.SampleSet(split, rng.standard_normal((N, split.wdim)),
                           rng.standard_normal(N) * rng.uniform(0.01, 1))
        L = float(np.exp(rng.uniform(-3, 1)))
        agree += ilip.is_intrinsic_lipschitz(S, L) == (ilip.lip_constant_estimate(S) <= L)
    assert agree == 1000


def test_constructed_violation():
    split = sp.make_splitting(builtin("h1"), [1.0, 0.0])
    w = np.array([[0.0, 0.0], [0.1, 0.0]])
    S = ilip.SampleSet(split, w, [0.0, 0.5])
    assert not ilip.is_intrinsic_lipschitz(S, 0.5)
    assert ilip.is_intrinsic_lipschitz(ilip.SampleSet(split, w, [0.3, 0.3]), 0.01)


def _bisect_entry(split, cone, w, s):
    lo, hi = s - 10 - abs(s), s + 10 + abs(s)
    assert not sp.in_cone(split, cone, ilip.graph_map(split, w, lo))
    assert sp.in_cone(split, cone, ilip.graph_map(split, w, hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sp.in_cone(split, cone, ilip.graph_map(split, w, mid)):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-13 * (1 + abs(s)):
            break
    return hi


@pytest.mark.parametrize("name", ["h1", "h2", "g752"])
def test_min_cone_entry_vs_bisection(name):
    split, rng = random_split(name, 4)
    spec = split.spec
    for _ in range(150):
        v = gc.random_points(spec, rng, 1)[0]
        w = rng.standard_normal(split.wdim)
        a = float(np.exp(rng.uniform(-2, 2)))
        s = float(ilip.min_cone_entry(split, v, a, w))
        assert np.isfinite(s)
        assert abs(_bisect_entry(split, sp.Cone(v, a, "+"), w, s) - s) <= 1e-9
        u = gc.multiply(spec, gc.inverse(v), ilip.graph_map(split, w, 0.0))
        perp = np.linalg.norm(u.x - sp.height(split, u) * split.nu)
        assert s >= perp / a - sp.height(split, u) - 1e-12


def test_min_cone_entry_on_axis():
    split, rng = random_split("g752", 5)
    v = gc.random_points(split.spec, rng, 1)[0]
    w = sp.to_w(split, v)
    # to_w leaves ~1e-16 of rounding in t, which the sqrt in the norm lifts to ~1e-8
    assert ilip.min_cone_entry(split, v, 0.7, w) == pytest.approx(sp.height(split, v), abs=1e-6)


def test_extension_constants_reference():
    spec = builtin("h1")  # eps2 = 0.9, C = 1
    alpha, beta, gamma, c_bound = ilip.extension_constants(0.5, spec)
    assert alpha == 2.0
    assert beta == pytest.approx(4.0 / 4.81, rel=1e-14)
    assert gamma == pytest.approx(0.32138, abs=1e-5)
    # gamma solves beta = gamma + eps2 sqrt(gamma C): oracle by bisection
    lo, hi = 0.0, beta
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mid + 0.9 * np.sqrt(mid) < beta else (lo, mid)
    assert gamma == pytest.approx(lo, rel=1e-12)
    assert c_bound == pytest.approx((1 / gamma) / 0.5)


def test_extension_constants_sweep():
    for name in ["h1", "g752"]:
        spec = builtin(name)
        bounds = []
        for L in np.geomspace(0.05, 0.95, 40):
            a, b, g, c = ilip.extension_constants(L, spec)
            assert b < a * a and 0 < g <= b
            bounds.append(c)
        assert np.max(bounds) < 100.0


def test_extend_single_sample():
    split, rng = random_split("h2", 6)
    w0 = np.zeros(split.wdim)
    S = ilip.SampleSet(split, w0[None], [0.25])
    pts = np.vstack([w0, 100 * rng.standard_normal((50, split.wdim))])
    F = ilip.extend(S, 0.3, points=pts)
    assert F.psi[0] == 0.25
    assert np.all(np.abs(F.psi) <= 0.25)
    assert np.sum(F.psi == 0.25) > 1  # far field clamps to the sup


def test_extend_constant():
    split, rng = random_split("g752", 7)
    S = ilip.SampleSet(split, rng.standard_normal((5, split.wdim)), np.full(5, -0.4))
    F = ilip.extend(S, 0.5, grid=Grid.cube(split.wdim, 1.0, 3))
    assert np.all(F.psi == -0.4)


def test_extend_rejects_bad_input():
    split, rng = random_split("h2", 8)
    w = rng.standard_normal((2, split.wdim))
    with pytest.raises(ValidationError):
        ilip.extend(ilip.SampleSet(split, w, [0.0, 100.0]), 0.3, points=w)
    with pytest.raises(ValidationError):
        ilip.extend(ilip.SampleSet(split, w, [0.0, 0.0]), 1.5, points=w)
    with pytest.raises(ValidationError):
        ilip.extend(ilip.SampleSet(split, np.zeros((0, split.wdim)), []), 0.3, points=w)


def test_extend_small_random_set():
    split, rng = random_split("h2", 9)
    g = Grid.cube(split.wdim, 1.0, 9)
    idx = np.unique(rng.integers(0, 9, (12, split.wdim)), axis=0)
    W = g.node(idx)
    vals = 0.05 * np.tanh(W @ rng.standard_normal(split.wdim))
    S = ilip.SampleSet(split, W, vals)
    assert ilip.lip_constant_estimate(S) <= 0.3
    F = ilip.extend(S, 0.3, grid=g)
    flat = {tuple(n): k for k, n in enumerate(np.round(g.nodes(), 12))}
    for wk, vk in zip(np.round(W, 12), vals):
        assert F.psi[flat[tuple(wk)]] == vk
    assert np.max(np.abs(F.psi)) <= np.max(np.abs(vals))
    sub = rng.choice(g.size, 600, replace=False)
    lip = ilip.pairwise_lipschitz(split, g.nodes()[sub], F.psi[sub])
    assert lip <= F.lip_bound * (1 + 1e-6)

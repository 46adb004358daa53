import numpy as np
import pytest

from carnotlab import group as gc
from carnotlab.classify import builtin, builtin_catalog
from carnotlab.errors import ValidationError

H1_B = np.array([[[0.0, -1.0], [1.0, 0.0]]])


@pytest.fixture
def h1():
    return gc.make_group_spec(2, 1, H1_B, name="h1")


def pt(x, t):
    return gc.Point(np.array(x, float), np.array(t, float))


def test_heisenberg_spec(h1):
    assert h1.Q == 4
    assert h1.n == 3
    assert h1.bound_C == pytest.approx(1.0, abs=1e-12)
    assert h1.eps2 == 0.9


def test_rejects_non_skew():
    with pytest.raises(ValidationError):
        gc.make_group_spec(2, 1, np.array([[[0.0, -1.0], [-1.0, 0.0]]]))


def test_rejects_bad_shape():
    with pytest.raises(ValidationError):
        gc.make_group_spec(3, 1, H1_B)


def test_multiply_hand_values(h1):
    r = gc.multiply(h1, pt([1, 0], [0]), pt([0, 1], [0]))
    np.testing.assert_allclose(r.as_vector(), [1, 1, 0.5])
    r = gc.multiply(h1, pt([1, 0], [0]), pt([1, 0], [0]))
    np.testing.assert_allclose(r.as_vector(), [2, 0, 0])
    p = pt([0.3, -2.0], [1.5])
    np.testing.assert_array_equal(gc.multiply(h1, p, gc.Point.zero(h1)).as_vector(), p.as_vector())


def test_inverse_and_identity(h1):
    np.testing.assert_array_equal(gc.inverse(pt([1, 2], [3])).as_vector(), [-1, -2, -3])
    rng = np.random.default_rng(1)
    p = gc.random_points(h1, rng, 1000)
    e = gc.multiply(h1, p, gc.inverse(p))
    assert np.max(np.abs(e.as_vector())) <= 1e-15


@pytest.mark.parametrize("name", ["h1", "g752", "f32", "quat"])
def test_associativity(name):
    spec = builtin(name)
    rng = np.random.default_rng(2)
    p, q, r = (gc.random_points(spec, rng, 500) for _ in range(3))
    a = gc.multiply(spec, gc.multiply(spec, p, q), r)
    b = gc.multiply(spec, p, gc.multiply(spec, q, r))
    np.testing.assert_allclose(a.as_vector(), b.as_vector(), atol=1e-12)


def test_dilation(h1):
    np.testing.assert_array_equal(gc.dilate(2.0, pt([1, 1], [1])).as_vector(), [2, 2, 4])
    np.testing.assert_array_equal(gc.dilate(0.0, pt([1, 1], [1])).as_vector(), [0, 0, 0])
    rng = np.random.default_rng(3)
    p = gc.random_points(h1, rng, 1000)
    lam = rng.uniform(0, 5, 1000)
    lhs = gc.inf_norm(h1, gc.Point(p.x * lam[:, None], p.t * lam[:, None] ** 2))
    np.testing.assert_allclose(lhs, lam * gc.inf_norm(h1, p), rtol=1e-14)


def test_bracket(h1):
    np.testing.assert_allclose(gc.bracket(h1, np.array([1.0, 0]), np.array([0, 1.0])), [1.0])
    spec = builtin("g752")
    rng = np.random.default_rng(4)
    x = rng.standard_normal((100_000, 5))
    xi = rng.standard_normal((100_000, 5))
    assert np.max(np.abs(gc.bracket(spec, x, x))) <= 1e-14
    lhs = np.linalg.norm(gc.bracket(spec, x, xi), axis=-1)
    rhs = spec.bound_C * np.linalg.norm(x, axis=-1) * np.linalg.norm(xi, axis=-1)
    assert np.all(lhs <= rhs * (1 + 1e-12))


def test_inf_norm_values():
    spec = gc.make_group_spec(2, 1, H1_B, eps2=0.5, check_trials=1000)
    assert gc.inf_norm(spec, pt([3, 4], [0])) == 5.0
    assert gc.inf_norm(spec, pt([0, 0], [4])) == 1.0


def test_distance_basics(h1):
    rng = np.random.default_rng(5)
    p, q = gc.random_points(h1, rng, 100), gc.random_points(h1, rng, 100)
    assert np.all(gc.distance(h1, p, p) == 0)
    np.testing.assert_allclose(gc.distance(h1, gc.Point.zero(h1), p), gc.inf_norm(h1, p))
    np.testing.assert_allclose(gc.inf_norm(h1, gc.inverse(p)), gc.inf_norm(h1, p))
    np.testing.assert_allclose(gc.distance(h1, p, q), gc.distance(h1, q, p), rtol=1e-14)


def _dense_sphere_oracle(spec, n, rng):
    """max |<Bx, xi>| over random unit pairs: a lower bound converging to C."""
    x = rng.standard_normal((n, spec.m1))
    xi = rng.standard_normal((n, spec.m1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    return float(np.max(np.linalg.norm(gc.bracket(spec, x, xi), axis=-1)))


@pytest.mark.parametrize("entry", builtin_catalog(), ids=lambda e: e.spec.name)
def test_bound_constant_against_sampling(entry):
    spec = entry.spec
    est = _dense_sphere_oracle(spec, 200_000, np.random.default_rng(6))
    assert est <= spec.bound_C * (1 + 1e-12)
    assert est >= 0.9 * spec.bound_C


def test_bound_constant_reference_values():
    assert builtin("h1").bound_C == pytest.approx(1.0, abs=1e-12)
    assert builtin("h2").bound_C == pytest.approx(1.0, abs=1e-12)
    assert builtin("g752").bound_C == pytest.approx(np.sqrt(1.5), abs=1e-9)
    s2 = gc.make_group_spec(2, 1, 2 * H1_B)
    assert gc.bound_constant(s2) == pytest.approx(2.0, abs=1e-12)


def test_calibrate_default_eps2(h1):
    eps2, rep = gc.calibrate_epsilon2(h1, trials=200_000, seed=0)
    assert eps2 == 0.9
    assert rep["violations"] == 0
    assert gc.default_eps2(16.0) == 0.5


def test_calibrate_user_eps2_is_audited(h1):
    # 0.99 exceeds neither 1 nor 2/sqrt(C); the audit decides
    try:
        eps2, rep = gc.calibrate_epsilon2(h1, trials=100_000, seed=0, eps2=0.99)
        assert rep["violations"] == 0
    except ValidationError as exc:
        assert "violates" in str(exc)


def test_rotate_basis():
    spec = builtin("h1")
    assert np.array_equal(gc.rotate_basis(spec, np.eye(2)).B, spec.B)
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    np.testing.assert_allclose(gc.rotate_basis(spec, R).B, spec.B, atol=1e-15)
    g = builtin("g752")
    rng = np.random.default_rng(7)
    M, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    rot = gc.rotate_basis(g, M)
    for j in range(2):
        assert abs(np.linalg.norm(rot.B[j], 2) - np.linalg.norm(g.B[j], 2)) <= 1e-12
    with pytest.raises(ValidationError):
        gc.rotate_basis(g, 2 * np.eye(5))

import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from frogrec.numerics import (
    AdamState,
    Parameter,
    Tensor,
    adam_step,
    clip,
    concat,
    exp,
    grad_check,
    init_params,
    log,
    log1p,
    matmul,
    mean,
    neighbor_max,
    no_grad,
    power,
    precision,
    relu,
    sigmoid,
    softmax,
    spmm,
    sum_,
    take_rows,
    tanh,
    zeros,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


# -- softmax -------------------------------------------------------------------
def test_softmax_uniform(f64):
    np.testing.assert_allclose(softmax(Tensor([0.0, 0, 0, 0])).data, [0.25] * 4, atol=1e-15)


def test_softmax_closed_form(f64):
    np.testing.assert_allclose(softmax(Tensor([math.log(2.0), 0.0])).data, [2 / 3, 1 / 3], atol=1e-15)


def test_softmax_large_inputs_do_not_overflow(f64):
    out = softmax(Tensor([1000.0, 1000.0])).data
    assert np.all(np.isfinite(out))
    np.testing.assert_allclose(out, [0.5, 0.5], atol=1e-15)


def test_softmax_empty_raises():
    with pytest.raises(ValueError):
        softmax(Tensor(np.zeros(0)))


def test_softmax_accepts_plain_arrays(f64):
    np.testing.assert_allclose(softmax(np.zeros(3)).data, [1 / 3] * 3)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-1e6, 1e6)))
def test_softmax_sums_to_one(v):
    with precision("float64"):
        out = softmax(Tensor(v)).data
    assert np.all(out >= 0)
    assert abs(out.sum() - 1.0) <= 1e-12


# -- Adam ----------------------------------------------------------------------
def test_adam_zero_gradient_leaves_params():
    p = {"w": np.array([1.0, -2.0, 3.0])}
    before = p["w"].copy()
    adam_step(p, {"w": np.zeros(3)}, AdamState(), 0.001)
    np.testing.assert_array_equal(p["w"], before)


def test_adam_first_step_moves_by_lr():
    p = {"w": np.array([0.5])}
    adam_step(p, {"w": np.array([1.0])}, AdamState(epsilon=0.0), 0.001)
    assert p["w"][0] == pytest.approx(0.5 - 0.001, abs=1e-12)


def test_adam_two_steps_monotone():
    p = {"w": np.array([0.0, 0.0])}
    g = {"w": np.array([2.0, -3.0])}
    state = AdamState()
    adam_step(p, g, state, 0.01)
    first = p["w"].copy()
    adam_step(p, g, state, 0.01)
    assert first[0] < 0 and p["w"][0] < first[0]
    assert first[1] > 0 and p["w"][1] > first[1]
    assert state.step_count == 2


def test_adam_shape_mismatch():
    with pytest.raises(ValueError):
        adam_step({"w": np.zeros(3)}, {"w": np.zeros(2)}, AdamState(), 0.1)


def test_adam_accepts_parameters():
    w = Parameter(np.ones((2, 2)), "w")
    adam_step({"w": w}, {"w": np.ones((2, 2))}, AdamState(), 0.1)
    assert np.all(w.data < 1)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(1, 10), elements=finite), st.integers(1, 20))
def test_adam_zero_gradient_identity_any_steps(values, steps):
    p = {"w": values.copy()}
    state = AdamState()
    for _ in range(steps):
        adam_step(p, {"w": np.zeros_like(values)}, state, 0.5)
    np.testing.assert_array_equal(p["w"], values)
    assert state.step_count == steps


def test_adam_matches_textbook_recurrence():
    rng = np.random.default_rng(0)
    w = rng.standard_normal(4)
    p = {"w": w.copy()}
    state = AdamState()
    m = np.zeros(4)
    v = np.zeros(4)
    for t in range(1, 6):
        g = rng.standard_normal(4)
        adam_step(p, {"w": g}, state, 0.01)
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        w = w - 0.01 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
    np.testing.assert_allclose(p["w"], w, rtol=1e-12)


# -- init ----------------------------------------------------------------------
def test_init_deterministic():
    np.testing.assert_array_equal(init_params((4, 5), 4, 3), init_params((4, 5), 4, 3))


def test_init_bound():
    w = init_params((100, 100), 6, 0)
    assert w.min() >= -1.0 and w.max() <= 1.0


def test_init_sample_mean():
    assert abs(init_params((100_000,), 6, 1).mean()) <= 0.01


def test_init_rejects_fan_in():
    with pytest.raises(ValueError):
        init_params((2, 2), 0, 0)


def test_zeros_bias():
    assert not zeros((3,)).any()


# -- grad_check ------------------------------------------------------------------
def test_gradcheck_quadratic(f64):
    x = Parameter(np.array([3.0]), "x")
    res = grad_check(lambda p: (p["x"] * p["x"]).sum(), {"x": x}, h=1e-5)
    assert res.max_rel_error <= 1e-9
    np.testing.assert_allclose(x.gradient, [6.0])


def test_gradcheck_constant(f64):
    x = Parameter(np.array([1.0, 2.0]), "x")
    res = grad_check(lambda p: Tensor(np.array(4.0)) + p["x"].sum() * 0.0, {"x": x})
    assert res.max_rel_error == 0.0


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_gradcheck_non_finite(f64):
    x = Parameter(np.array([-1.0]), "x")
    with pytest.raises(FloatingPointError):
        grad_check(lambda p: log(p["x"]).sum(), {"x": x})


def test_gradcheck_detects_wrong_gradient(f64):
    from frogrec.numerics.autodiff import _make

    def bad_square(a):
        return _make(a.data**2, (a,), lambda g: (g * 3.0 * a.data,))

    x = Parameter(np.array([2.0]), "x")
    res = grad_check(lambda p: bad_square(p["x"]).sum(), {"x": x})
    assert res.max_rel_error > 0.1


UNARY = {
    "exp": exp,
    "log": lambda a: log(a * a + 1.0),
    "log1p": lambda a: log1p(a * a),
    "tanh": tanh,
    "sigmoid": sigmoid,
    "relu": relu,
    "power": lambda a: power(a * a + 1.0, -1.5),
    "softmax": lambda a: softmax(a, axis=-1),
    "clip": lambda a: clip(a, -0.7, 0.7),
    "mean": lambda a: mean(a, axis=0, keepdims=True),
    "sum": lambda a: sum_(a, axis=1, keepdims=True),
    "transpose": lambda a: a.T,
    "index": lambda a: a[np.array([0, 2, 2])],
    "take_rows": lambda a: take_rows(a, np.array([1, 1, 0])),
    "concat": lambda a: concat([a, a * 2.0], axis=-1),
}


@pytest.mark.parametrize("name", sorted(UNARY))
def test_gradcheck_each_op(name, f64):
    rng = np.random.default_rng(sum(map(ord, name)))
    # keep clip and relu away from their kinks
    data = rng.uniform(0.1, 1.0, size=(3, 4)) * rng.choice([-1, 1], size=(3, 4))
    x = Parameter(data, "x")
    w = rng.standard_normal(UNARY[name](Tensor(data)).shape)
    res = grad_check(lambda p: (UNARY[name](p["x"]) * w).sum(), {"x": x})
    assert res.max_rel_error <= 1e-6


def test_gradcheck_matmul_broadcasts(f64):
    rng = np.random.default_rng(5)
    P = Parameter(rng.standard_normal((4, 1)), "P")
    M = Parameter(rng.standard_normal((3, 1, 4)), "M")
    Q = Parameter(rng.standard_normal((4, 4)), "Q")
    res = grad_check(lambda p: tanh(matmul(matmul(p["P"], p["M"]), p["Q"])).sum(), {"P": P, "M": M, "Q": Q})
    assert res.max_rel_error <= 1e-6


def test_gradcheck_sparse_ops(f64):
    rng = np.random.default_rng(6)
    x = Parameter(rng.standard_normal((5, 3)), "x")
    A = sp.random(4, 5, density=0.5, random_state=1, format="csr")
    index = np.array([[1, 2, 0], [3, 4, 4], [0, 0, 0], [2, 1, 3]])
    mask = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0], [1, 1, 1]], dtype=bool)
    w = rng.standard_normal((4, 3))

    def loss(p):
        return ((spmm(A, p["x"]) + neighbor_max(p["x"], index, mask)) * w).sum()

    assert grad_check(loss, {"x": x}).max_rel_error <= 1e-6


def test_neighbor_max_empty_rows_are_zero():
    x = Tensor(np.arange(6.0).reshape(3, 2))
    out = neighbor_max(x, np.array([[0, 1], [0, 0]]), np.array([[1, 1], [0, 0]], dtype=bool))
    np.testing.assert_array_equal(out.data, [[2.0, 3.0], [0.0, 0.0]])


def _composite(p, ops, w):
    h = p["x"]
    for op in ops:
        h = op(h)
    return (h * w).sum()


SMOOTH = [tanh, sigmoid, exp, lambda a: log1p(a * a), lambda a: softmax(a, axis=-1), lambda a: a * a + a]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, len(SMOOTH) - 1), min_size=3, max_size=5), st.integers(0, 10_000))
def test_gradcheck_random_composites(op_ids, seed):
    with precision("float64"):
        rng = np.random.default_rng(seed)
        x = Parameter(rng.uniform(-1, 1, size=(2, 3)), "x")
        W = Tensor(rng.uniform(-1, 1, size=(3, 3)))
        ops = [lambda a: tanh(matmul(a, W))] + [SMOOTH[i] for i in op_ids]
        w = rng.standard_normal((2, 3))
        res = grad_check(lambda p: _composite(p, ops, w), {"x": x})
    assert res.max_rel_error <= 1e-6


# -- misc ----------------------------------------------------------------------
def test_backward_accumulates_shared_nodes(f64):
    x = Parameter(np.array([2.0]), "x")
    y = x * x + x * 3.0
    y.sum().backward()
    np.testing.assert_allclose(x.grad, [7.0])


def test_no_grad_records_nothing():
    x = Parameter(np.ones(2), "x")
    with no_grad():
        y = tanh(x * 2.0)
    assert not y.requires_grad and y._parents == ()


def test_precision_switch():
    with precision("float64"):
        assert Tensor([1.0]).data.dtype == np.float64
    assert Tensor([1.0]).data.dtype == np.float32


def test_operations_are_deterministic(f64):
    rng = np.random.default_rng(9)
    a = rng.standard_normal((4, 4))
    out1 = softmax(tanh(Tensor(a) @ Tensor(a))).data
    out2 = softmax(tanh(Tensor(a) @ Tensor(a))).data
    np.testing.assert_array_equal(out1, out2)

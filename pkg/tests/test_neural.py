import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqnlog import ContractError
from dqnlog.neural import (
    PARAM_NAMES, Adam, CheckpointError, QNetwork, load_checkpoint, save_checkpoint, softmax_binary,
)

from .gradcheck import check_total_loss, numeric_grad, rel_error


def _batch(seed=0, B=3, T=5, d=6):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(B, T, d)), np.array([5, 2, 1][:B])


def test_zero_params_give_bias():
    net = QNetwork(6, 8, seed=0)
    for k in PARAM_NAMES:
        net.params[k][...] = 0.0
    net.params["bo"][:] = [0.3, -0.7]
    X, L = _batch()
    q, _ = net.forward(X, L)
    assert np.allclose(q, [[0.3, -0.7]] * 3)


def test_identical_steps_give_uniform_attention():
    net = QNetwork(6, 8, seed=1)
    # zero LSTM weights keep the cell input at tanh(0), so every hidden state is the same
    for k in ("Wf", "Uf", "bf", "Wb", "Ub", "bb"):
        net.params[k][...] = 0.0
    X = np.random.default_rng(0).normal(size=(1, 4, 6))
    _, tr = net.forward(X, [4])
    assert np.allclose(tr.attn, 0.25)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_attention_normalized_and_zero_on_padding(seed):
    net = QNetwork(6, 8, seed=seed)
    X, L = _batch(seed)
    _, tr = net.forward(X, L)
    assert np.all(tr.attn >= 0)
    assert np.allclose(tr.attn.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(tr.attn[~tr.mask] == 0)


def test_padding_does_not_change_output():
    net = QNetwork(6, 8, seed=2)
    X, L = _batch()
    q1, _ = net.forward(X, L)
    X2 = X.copy()
    X2[1, 2:] = 99.0
    X2[2, 1:] = -5.0
    q2, _ = net.forward(X2, L)
    assert np.array_equal(q1, q2)


def test_forward_is_deterministic():
    net = QNetwork(6, 8, seed=3)
    X, L = _batch()
    assert np.array_equal(net.forward(X, L)[0], net.forward(X, L)[0])


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        QNetwork(6, 8).forward(np.zeros((1, 3, 5)), [3])


def test_zero_upstream_gives_zero_grads():
    net = QNetwork(6, 8, seed=0)
    q, tr = net.forward(*_batch())
    grads = net.backward(tr, np.zeros_like(q))
    assert all(not g.any() for g in grads.values())


def test_output_bias_gradient():
    net = QNetwork(6, 8, seed=0)
    X, L = _batch(B=1)
    q, tr = net.forward(X, L)
    grads = net.backward(tr, np.array([[0.0, 1.0]]))
    assert grads["bo"].tolist() == [0.0, 1.0]


@pytest.mark.parametrize("seed", range(3))
def test_backward_matches_finite_differences(seed):
    net = QNetwork(6, 8, context=5, seed=seed)
    X, L = _batch(seed)
    w = np.random.default_rng(seed).normal(size=(3, 2))
    f = lambda: float((net.forward(X, L)[0] * w).sum())  # noqa: E731
    _, tr = net.forward(X, L)
    grads = net.backward(tr, w)
    for k in PARAM_NAMES:
        assert rel_error(grads[k], numeric_grad(f, net, k)) <= 1e-3, k


def test_total_loss_gradcheck_one_seed():
    errs = check_total_loss(0)
    assert max(errs.values()) <= 1e-3, errs


def test_stale_trace():
    net = QNetwork(6, 8, seed=0)
    q, tr = net.forward(*_batch())
    net.touch()
    with pytest.raises(ContractError):
        net.backward(tr, np.ones_like(q))
    with pytest.raises(ContractError):
        net.copy().backward(tr, np.ones_like(q))


def test_adam_first_step_is_sign():
    net = QNetwork(6, 8, seed=0)
    before = {k: v.copy() for k, v in net.params.items()}
    rng = np.random.default_rng(0)
    grads = {k: rng.normal(size=v.shape) for k, v in net.params.items()}
    Adam(net, lr=1e-3).step(net, grads)
    for k in PARAM_NAMES:
        assert np.allclose(net.params[k] - before[k], -1e-3 * np.sign(grads[k]), rtol=1e-4, atol=1e-9)


def test_adam_zero_gradient_is_noop():
    net = QNetwork(6, 8, seed=0)
    before = {k: v.copy() for k, v in net.params.items()}
    Adam(net).step(net, net.zeros_like())
    assert all(np.array_equal(net.params[k], before[k]) for k in PARAM_NAMES)


def test_adam_is_deterministic():
    a, b = QNetwork(6, 8, seed=0), QNetwork(6, 8, seed=0)
    grads = {k: np.full(v.shape, 0.5) for k, v in a.params.items()}
    for net in (a, b):
        opt = Adam(net)
        opt.step(net, grads)
        opt.step(net, grads)
    assert all(np.array_equal(a.params[k], b.params[k]) for k in PARAM_NAMES)


def test_adam_rejects_non_finite():
    net = QNetwork(6, 8, seed=0)
    grads = net.zeros_like()
    grads["wa"][0] = np.nan
    with pytest.raises(FloatingPointError):
        Adam(net).step(net, grads)


@pytest.mark.parametrize("q, expected", [((0, 0), 0.5), ((0, np.log(3)), 0.75), ((1000, 1000), 0.5)])
def test_softmax_binary(q, expected):
    assert softmax_binary(q) == pytest.approx(expected, abs=1e-12)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 5))
def test_softmax_monotone(q0, q1, bump):
    # kept inside the range where doubles resolve the increase
    assert softmax_binary((q0, q1 + bump)) > softmax_binary((q0, q1))


def test_checkpoint_roundtrip(tmp_path):
    net = QNetwork(6, 8, context=4, seed=9)
    save_checkpoint(net, tmp_path / "a.ckpt", "oracle", seed=9, t_max=20)
    back, meta = load_checkpoint(tmp_path / "a.ckpt", "oracle")
    assert meta == {"kind": "oracle", "d": 6, "hidden": 8, "context": 4, "t_max": 20, "seed": 9}
    assert all(np.array_equal(back.params[k], net.params[k]) for k in PARAM_NAMES)
    save_checkpoint(back, tmp_path / "b.ckpt", "oracle", seed=9, t_max=20)
    assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()


def test_checkpoint_kind_mismatch(tmp_path):
    save_checkpoint(QNetwork(6, 8), tmp_path / "a.ckpt", "agent")
    with pytest.raises(CheckpointError, match="agent"):
        load_checkpoint(tmp_path / "a.ckpt", "oracle")


@pytest.mark.parametrize("mutate", [
    lambda b: b[:-1] + bytes([b[-1] ^ 1]),
    lambda b: b[:100] + bytes([b[100] ^ 1]) + b[101:],
    lambda b: b[:40],
    lambda b: b"NOTACKPT" + b[8:],
    lambda b: b[:8] + (2).to_bytes(4, "little") + b[12:],
])
def test_checkpoint_corruption(tmp_path, mutate):
    path = tmp_path / "a.ckpt"
    save_checkpoint(QNetwork(6, 8), path)
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(CheckpointError, match="a.ckpt"):
        load_checkpoint(path)

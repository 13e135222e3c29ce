"""Attention Bi-LSTM with hand-written reverse mode, plus Adam and checkpoints.

Everything is float64. Batches are (B, T, d) arrays padded at the end with
a per-row true length; padded steps get zero attention and never feed back
into valid steps, so they contribute nothing to outputs or gradients.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ContractError

# declared parameter order; checkpoints store arrays in exactly this order
PARAM_NAMES = ("Wf", "Uf", "bf", "Wb", "Ub", "bb", "Wa", "wa", "Wo", "bo")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def param_shapes(d: int, hidden: int, context: int) -> dict[str, tuple[int, ...]]:
    h4 = 4 * hidden
    return {
        "Wf": (d, h4), "Uf": (hidden, h4), "bf": (h4,),
        "Wb": (d, h4), "Ub": (hidden, h4), "bb": (h4,),
        "Wa": (context, 2 * hidden), "wa": (context,),
        "Wo": (2, 2 * hidden), "bo": (2,),
    }


@dataclass
class Trace:
    version: int
    net_id: int
    lengths: np.ndarray
    rev: np.ndarray
    mask: np.ndarray
    fwd: dict
    bwd: dict
    h: np.ndarray
    u: np.ndarray
    attn: np.ndarray
    context: np.ndarray
    q: np.ndarray


class QNetwork:
    """Input layer, Bi-LSTM, additive self-attention, dense head with two outputs.

    Gate layout inside each ``(., 4H)`` block is input, forget, cell, output.
    """

    def __init__(self, d: int, hidden: int = 128, context: int | None = None, seed: int = 0):
        self.d, self.hidden = d, hidden
        self.context = context or hidden
        self.version = 0
        rng = np.random.default_rng(seed)
        self.params: dict[str, np.ndarray] = {}
        for name, shape in param_shapes(d, hidden, self.context).items():
            if name in ("bf", "bb", "bo"):
                arr = np.zeros(shape)
            else:
                fan_in = shape[0] if name in ("Wf", "Uf", "Wb", "Ub", "wa") else shape[1]
                bound = 1.0 / np.sqrt(fan_in)
                arr = rng.uniform(-bound, bound, size=shape)
            self.params[name] = arr
        self.params["bf"][hidden:2 * hidden] = 1.0
        self.params["bb"][hidden:2 * hidden] = 1.0

    # -- bookkeeping -------------------------------------------------------

    def copy(self) -> "QNetwork":
        other = QNetwork.__new__(QNetwork)
        other.d, other.hidden, other.context = self.d, self.hidden, self.context
        other.version = 0
        other.params = {k: v.copy() for k, v in self.params.items()}
        return other

    def load_from(self, other: "QNetwork") -> None:
        for k in PARAM_NAMES:
            np.copyto(self.params[k], other.params[k])
        self.version += 1

    def touch(self) -> None:
        """Mark params as changed so traces taken before become stale."""
        self.version += 1

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    # -- forward -----------------------------------------------------------

    def _lstm(self, x, W, U, b):
        B, T, _ = x.shape
        H = self.hidden
        zx = (x.reshape(B * T, -1) @ W).reshape(B, T, 4 * H) + b
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        hs = np.empty((B, T, H))
        gates = np.empty((B, T, 4 * H))
        cs = np.empty((B, T, H))
        for t in range(T):
            z = zx[:, t] + h @ U
            g = np.empty_like(z)
            g[:, :2 * H] = _sigmoid(z[:, :2 * H])
            g[:, 2 * H:3 * H] = np.tanh(z[:, 2 * H:3 * H])
            g[:, 3 * H:] = _sigmoid(z[:, 3 * H:])
            c = g[:, H:2 * H] * c + g[:, :H] * g[:, 2 * H:3 * H]
            h = g[:, 3 * H:] * np.tanh(c)
            gates[:, t], cs[:, t], hs[:, t] = g, c, h
        return hs, {"x": x, "gates": gates, "c": cs, "h": hs}

    def forward(self, X: np.ndarray, lengths: Sequence[int]) -> tuple[np.ndarray, Trace]:
        X = np.asarray(X, dtype=np.float64)
        lengths = np.asarray(lengths, dtype=np.int64)
        if X.ndim != 3 or X.shape[2] != self.d:
            raise ContractError(f"expected input of shape (B, T, {self.d}), got {X.shape}")
        if len(lengths) != X.shape[0] or lengths.min() < 1 or lengths.max() > X.shape[1]:
            raise ContractError("lengths must lie in [1, T] for every row")
        B, T, _ = X.shape
        p = self.params
        steps = np.arange(T)
        mask = steps[None, :] < lengths[:, None]
        # per-row reversal of the valid prefix; an involution, so it also undoes itself
        rev = np.where(mask, lengths[:, None] - 1 - steps[None, :], steps[None, :])
        rows = np.arange(B)[:, None]

        hf, fwd = self._lstm(X, p["Wf"], p["Uf"], p["bf"])
        hr, bwd = self._lstm(X[rows, rev], p["Wb"], p["Ub"], p["bb"])
        h = np.concatenate([hf, hr[rows, rev]], axis=2)

        u = np.tanh(h @ p["Wa"].T)
        e = np.where(mask, u @ p["wa"], -np.inf)
        e = e - e.max(axis=1, keepdims=True)
        w = np.exp(e)
        attn = w / w.sum(axis=1, keepdims=True)
        ctx = np.einsum("bt,btj->bj", attn, h)
        q = ctx @ p["Wo"].T + p["bo"]
        trace = Trace(self.version, id(self), lengths, rev, mask, fwd, bwd, h, u, attn, ctx, q)
        return q, trace

    def q_values(self, X: np.ndarray, lengths: Sequence[int], chunk: int = 512) -> np.ndarray:
        out = []
        lengths = np.asarray(lengths)
        for i in range(0, len(lengths), chunk):
            lens = lengths[i:i + chunk]
            q, _ = self.forward(X[i:i + chunk, : int(lens.max())], lens)
            out.append(q)
        return np.concatenate(out) if out else np.zeros((0, 2))

    # -- backward ----------------------------------------------------------

    def _lstm_backward(self, cache, dhs, U):
        x, gates, cs, hs = cache["x"], cache["gates"], cache["c"], cache["h"]
        B, T, H = hs.shape
        dz_all = np.empty((B, T, 4 * H))
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            g = gates[:, t]
            i, f, gg, o = g[:, :H], g[:, H:2 * H], g[:, 2 * H:3 * H], g[:, 3 * H:]
            tc = np.tanh(cs[:, t])
            c_prev = cs[:, t - 1] if t > 0 else np.zeros((B, H))
            dh = dhs[:, t] + dh_next
            dc = dh * o * (1.0 - tc * tc) + dc_next
            dz = dz_all[:, t]
            dz[:, :H] = dc * gg * i * (1.0 - i)
            dz[:, H:2 * H] = dc * c_prev * f * (1.0 - f)
            dz[:, 2 * H:3 * H] = dc * i * (1.0 - gg * gg)
            dz[:, 3 * H:] = dh * tc * o * (1.0 - o)
            dc_next = dc * f
            dh_next = dz @ U.T
        h_prev = np.concatenate([np.zeros((B, 1, H)), hs[:, :-1]], axis=1)
        flat = dz_all.reshape(B * T, 4 * H)
        dW = x.reshape(B * T, -1).T @ flat
        dU = h_prev.reshape(B * T, H).T @ flat
        db = flat.sum(axis=0)
        return dW, dU, db

    def backward(self, trace: Trace, dq: np.ndarray) -> dict[str, np.ndarray]:
        """Exact parameter gradients of ``sum(dq * q)`` for the traced batch."""
        if trace.net_id != id(self) or trace.version != self.version:
            raise ContractError("stale trace: parameters changed since the forward pass")
        dq = np.asarray(dq, dtype=np.float64)
        if dq.shape != trace.q.shape:
            raise ContractError(f"upstream gradient shape {dq.shape} != {trace.q.shape}")
        p = self.params
        H = self.hidden
        h, u, attn, rev = trace.h, trace.u, trace.attn, trace.rev
        rows = np.arange(h.shape[0])[:, None]
        grads = {}
        grads["Wo"] = dq.T @ trace.context
        grads["bo"] = dq.sum(axis=0)
        dctx = dq @ p["Wo"]
        dattn = np.einsum("btj,bj->bt", h, dctx)
        dh = attn[:, :, None] * dctx[:, None, :]
        de = attn * (dattn - (attn * dattn).sum(axis=1, keepdims=True))
        grads["wa"] = np.einsum("bt,btk->k", de, u)
        dpre = de[:, :, None] * p["wa"] * (1.0 - u * u)
        grads["Wa"] = np.einsum("btk,btj->kj", dpre, h)
        dh += dpre @ p["Wa"]
        grads["Wf"], grads["Uf"], grads["bf"] = self._lstm_backward(trace.fwd, dh[:, :, :H], p["Uf"])
        grads["Wb"], grads["Ub"], grads["bb"] = self._lstm_backward(trace.bwd, dh[:, :, H:][rows, rev], p["Ub"])
        return {k: grads[k] for k in PARAM_NAMES}


def softmax_binary(q) -> np.ndarray | float:
    """Probability of the second action, computed with max subtraction."""
    q = np.asarray(q, dtype=np.float64)
    m = q.max(axis=-1, keepdims=True)
    e = np.exp(q - m)
    p = e[..., 1] / e.sum(axis=-1)
    return float(p) if p.ndim == 0 else p


class Adam:
    def __init__(self, net: QNetwork, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = net.zeros_like()
        self.v = net.zeros_like()
        self.t = 0

    def step(self, net: QNetwork, grads: dict[str, np.ndarray]) -> None:
        for k, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(f"non-finite gradient for {k}")
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for k in PARAM_NAMES:
            g = grads[k]
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            net.params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
        net.touch()


def adam_step(net: QNetwork, grads: dict[str, np.ndarray], opt: Adam, lr: float | None = None) -> None:
    if lr is not None:
        opt.lr = lr
    opt.step(net, grads)


# ---------------------------------------------------------------------------
# checkpoints

MAGIC = b"DQNLOGCK"
FORMAT_VERSION = 1
KINDS = {"agent": 0, "oracle": 1}
_HEADER = struct.Struct("<8sIBIIIIq")


class CheckpointError(ValueError):
    pass


def save_checkpoint(net: QNetwork, path: str | Path, kind: str = "agent", seed: int = 0, t_max: int = 50) -> None:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, KINDS[kind], net.d, net.hidden, net.context, t_max, seed)
    body = b"".join(net.params[k].astype("<f8").tobytes() for k in PARAM_NAMES)
    blob = header + body
    Path(path).write_bytes(blob + struct.pack("<I", zlib.crc32(blob)))


def load_checkpoint(path: str | Path, kind: str | None = None) -> tuple[QNetwork, dict]:
    """Load a checkpoint; returns the network and its header fields."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size + 4:
        raise CheckpointError(f"{path}: truncated checkpoint")
    magic, version, kind_code, d, hidden, context, t_max, seed = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    (crc,) = struct.unpack_from("<I", blob, len(blob) - 4)
    if zlib.crc32(blob[:-4]) != crc:
        raise CheckpointError(f"{path}: checksum mismatch (corrupt checkpoint)")
    kinds = {v: k for k, v in KINDS.items()}
    if kind_code not in kinds:
        raise CheckpointError(f"{path}: unknown model kind {kind_code}")
    if kind is not None and kinds[kind_code] != kind:
        raise CheckpointError(f"{path}: holds a {kinds[kind_code]} model, expected {kind}")
    net = QNetwork.__new__(QNetwork)
    net.d, net.hidden, net.context, net.version = d, hidden, context, 0
    net.params = {}
    offset = _HEADER.size
    shapes = param_shapes(d, hidden, context)
    expected = _HEADER.size + 8 * sum(int(np.prod(s)) for s in shapes.values()) + 4
    if len(blob) != expected:
        raise CheckpointError(f"{path}: size {len(blob)} does not match header (expected {expected})")
    for name in PARAM_NAMES:
        n = int(np.prod(shapes[name]))
        net.params[name] = np.frombuffer(blob, dtype="<f8", count=n, offset=offset).reshape(shapes[name]).astype(np.float64)
        offset += 8 * n
    meta = {"kind": kinds[kind_code], "d": d, "hidden": hidden, "context": context, "t_max": t_max, "seed": seed}
    return net, meta

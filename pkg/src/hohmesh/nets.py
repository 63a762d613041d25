"""Dense networks, optimizer, and checkpoint serialization.

Everything is float64 numpy. The actor maps the 25 condition inputs
through four leaky-ReLU hidden layers (512, 256, 256, 128) to 8 tanh
outputs; the critic takes the 33 condition+action inputs through the
same hidden stack to one linear output. Weights and biases start uniform
in +-1/sqrt(fan_in); the actor's final layer is scaled by 0.1 so initial
actions stay near the center of the box.

Checkpoints are a little-endian binary format (magic ``HOHCKPT1``):
header (format version, tool version, seed, episode count), both
variable-space tables, both networks' widths and parameter arrays, both
Adam states, and the replay buffer bookkeeping (capacity, size, write
position; buffer contents are not persisted). Arrays are raw float64
bytes, so a save/load round trip is bit-identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigError, DimensionMismatch

__all__ = [
    "ACTOR_WIDTHS",
    "CRITIC_WIDTHS",
    "LEAKY_SLOPE",
    "Mlp",
    "Adam",
    "CheckpointData",
    "save_checkpoint",
    "load_checkpoint",
]

ACTOR_WIDTHS = [25, 512, 256, 256, 128, 8]
CRITIC_WIDTHS = [33, 512, 256, 256, 128, 1]
LEAKY_SLOPE = 0.01

_MAGIC = b"HOHCKPT1"
_FORMAT_VERSION = 1


class Mlp:
    """Fully connected net with leaky-ReLU hidden layers.

    ``output`` selects the last activation: "tanh" or "identity".
    forward() caches intermediates; backward() consumes the cache and
    returns the gradient with respect to the inputs while accumulating
    parameter gradients in ``grad_w`` / ``grad_b``.
    """

    def __init__(
        self,
        widths: list[int],
        output: str,
        rng: np.random.Generator | None = None,
        final_scale: float = 1.0,
    ):
        if len(widths) < 2:
            raise ValueError("need at least input and output widths")
        if output not in ("tanh", "identity"):
            raise ValueError(f"unknown output activation {output!r}")
        self.widths = list(widths)
        self.output = output
        self.weights: list[NDArray[np.float64]] = []
        self.biases: list[NDArray[np.float64]] = []
        if rng is None:
            rng = np.random.default_rng(0)
        for n_in, n_out in zip(widths[:-1], widths[1:]):
            bound = 1.0 / np.sqrt(n_in)
            self.weights.append(rng.uniform(-bound, bound, (n_out, n_in)))
            self.biases.append(rng.uniform(-bound, bound, n_out))
        if final_scale != 1.0:
            self.weights[-1] *= final_scale
            self.biases[-1] *= final_scale
        self.grad_w = [np.zeros_like(w) for w in self.weights]
        self.grad_b = [np.zeros_like(b) for b in self.biases]
        self._cache: tuple | None = None

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.widths[0]:
            raise DimensionMismatch(
                f"expected {self.widths[0]} inputs, got {x.shape[1]}"
            )
        acts = [x]
        zs = []
        a = x
        last = self.n_layers - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            zs.append(z)
            if k < last:
                a = np.where(z > 0.0, z, LEAKY_SLOPE * z)
            elif self.output == "tanh":
                a = np.tanh(z)
            else:
                a = z
            acts.append(a)
        self._cache = (acts, zs)
        return a[0] if squeeze else a

    def backward(self, grad_out: NDArray[np.float64]) -> NDArray[np.float64]:
        """Backpropagate d(loss)/d(output); returns d(loss)/d(input)."""
        if self._cache is None:
            raise RuntimeError("backward() before forward()")
        acts, zs = self._cache
        g = np.asarray(grad_out, dtype=float)
        squeeze = g.ndim == 1
        if squeeze:
            g = g[None, :]
        if g.shape != acts[-1].shape:
            raise DimensionMismatch(
                f"gradient shape {g.shape} does not match output "
                f"{acts[-1].shape}"
            )
        last = self.n_layers - 1
        for k in range(last, -1, -1):
            z = zs[k]
            if k < last:
                dz = g * np.where(z > 0.0, 1.0, LEAKY_SLOPE)
            elif self.output == "tanh":
                dz = g * (1.0 - np.tanh(z) ** 2)
            else:
                dz = g
            self.grad_w[k] = dz.T @ acts[k]
            self.grad_b[k] = dz.sum(axis=0)
            g = dz @ self.weights[k]
        return g[0] if squeeze else g

    def parameters(self) -> list[NDArray[np.float64]]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def gradients(self) -> list[NDArray[np.float64]]:
        out = []
        for gw, gb in zip(self.grad_w, self.grad_b):
            out.append(gw)
            out.append(gb)
        return out


class Adam:
    """Adam with bias correction, updating parameters in place."""

    def __init__(
        self,
        params: list[NDArray[np.float64]],
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: list[NDArray[np.float64]]) -> None:
        if len(grads) != len(self.params):
            raise DimensionMismatch(
                f"{len(grads)} gradients for {len(self.params)} parameters"
            )
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class CheckpointData:
    """Everything a checkpoint stores, in memory form."""

    tool_version: str
    seed: int
    episodes: int
    cond_fields: list[tuple]
    dec_fields: list[tuple]
    actor_widths: list[int]
    actor_weights: list[NDArray[np.float64]]
    actor_biases: list[NDArray[np.float64]]
    critic_widths: list[int]
    critic_weights: list[NDArray[np.float64]]
    critic_biases: list[NDArray[np.float64]]
    actor_t: int = 0
    actor_m: list = field(default_factory=list)
    actor_v: list = field(default_factory=list)
    critic_t: int = 0
    critic_m: list = field(default_factory=list)
    critic_v: list = field(default_factory=list)
    buffer_capacity: int = 0
    buffer_size: int = 0
    buffer_position: int = 0


def _w_str(out: list[bytes], s: str) -> None:
    raw = s.encode("utf-8")
    out.append(struct.pack("<H", len(raw)))
    out.append(raw)


def _w_arrays(out: list[bytes], arrays) -> None:
    out.append(struct.pack("<I", len(arrays)))
    for a in arrays:
        a = np.ascontiguousarray(a, dtype="<f8")
        out.append(struct.pack("<B", a.ndim))
        out.append(struct.pack(f"<{a.ndim}Q", *a.shape))
        out.append(a.tobytes())


def _w_space(out: list[bytes], fields_list) -> None:
    out.append(struct.pack("<I", len(fields_list)))
    for name, lo, hi, integer, angle in fields_list:
        _w_str(out, name)
        out.append(struct.pack("<ddBB", lo, hi, int(integer), int(angle)))


def save_checkpoint(path: str, data: CheckpointData) -> None:
    out: list[bytes] = [_MAGIC, struct.pack("<I", _FORMAT_VERSION)]
    _w_str(out, data.tool_version)
    out.append(struct.pack("<qQ", data.seed, data.episodes))
    _w_space(out, data.cond_fields)
    _w_space(out, data.dec_fields)
    for widths, weights, biases in (
        (data.actor_widths, data.actor_weights, data.actor_biases),
        (data.critic_widths, data.critic_weights, data.critic_biases),
    ):
        out.append(struct.pack("<I", len(widths)))
        out.append(struct.pack(f"<{len(widths)}I", *widths))
        _w_arrays(out, weights)
        _w_arrays(out, biases)
    for t, m, v in (
        (data.actor_t, data.actor_m, data.actor_v),
        (data.critic_t, data.critic_m, data.critic_v),
    ):
        out.append(struct.pack("<Q", t))
        _w_arrays(out, m)
        _w_arrays(out, v)
    out.append(
        struct.pack(
            "<QQQ", data.buffer_capacity, data.buffer_size, data.buffer_position
        )
    )
    with open(path, "wb") as fh:
        fh.write(b"".join(out))


class _Reader:
    def __init__(self, buf: bytes, path: str):
        self.buf = buf
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise ConfigError(self.path, "truncated checkpoint")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def r_str(self) -> str:
        (n,) = self.unpack("<H")
        return self.take(n).decode("utf-8")

    def r_arrays(self) -> list[NDArray[np.float64]]:
        (count,) = self.unpack("<I")
        arrays = []
        for _ in range(count):
            (ndim,) = self.unpack("<B")
            shape = self.unpack(f"<{ndim}Q")
            n = int(np.prod(shape)) if ndim else 1
            raw = self.take(8 * n)
            arrays.append(np.frombuffer(raw, dtype="<f8").reshape(shape).copy())
        return arrays

    def r_space(self) -> list[tuple]:
        (count,) = self.unpack("<I")
        fields_list = []
        for _ in range(count):
            name = self.r_str()
            lo, hi, integer, angle = self.unpack("<ddBB")
            fields_list.append((name, lo, hi, bool(integer), bool(angle)))
        return fields_list


def load_checkpoint(path: str) -> CheckpointData:
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise ConfigError(path, f"cannot read checkpoint: {exc}") from exc
    r = _Reader(buf, path)
    if r.take(len(_MAGIC)) != _MAGIC:
        raise ConfigError(path, "not a checkpoint file")
    (version,) = r.unpack("<I")
    if version != _FORMAT_VERSION:
        raise ConfigError(path, f"unsupported checkpoint version {version}")
    tool_version = r.r_str()
    seed, episodes = r.unpack("<qQ")
    cond_fields = r.r_space()
    dec_fields = r.r_space()

    nets = []
    for _ in range(2):
        (nw,) = r.unpack("<I")
        widths = list(r.unpack(f"<{nw}I"))
        weights = r.r_arrays()
        biases = r.r_arrays()
        nets.append((widths, weights, biases))
    opts = []
    for _ in range(2):
        (t,) = r.unpack("<Q")
        m = r.r_arrays()
        v = r.r_arrays()
        opts.append((t, m, v))
    cap, size, posn = r.unpack("<QQQ")
    return CheckpointData(
        tool_version=tool_version,
        seed=seed,
        episodes=episodes,
        cond_fields=cond_fields,
        dec_fields=dec_fields,
        actor_widths=nets[0][0],
        actor_weights=nets[0][1],
        actor_biases=nets[0][2],
        critic_widths=nets[1][0],
        critic_weights=nets[1][1],
        critic_biases=nets[1][2],
        actor_t=opts[0][0],
        actor_m=opts[0][1],
        actor_v=opts[0][2],
        critic_t=opts[1][0],
        critic_m=opts[1][1],
        critic_v=opts[1][2],
        buffer_capacity=cap,
        buffer_size=size,
        buffer_position=posn,
    )

"""Small fully connected networks with hand-written differentiation.

Forward/backward passes, the adaptive-moment optimizer, and global
gradient-norm clipping are implemented directly from their update
equations so the learning stack has no framework dependency and stays
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DTYPE = np.float64


def elu(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, x, np.expm1(x))


def elu_grad(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, 1.0, np.exp(x))


@dataclass
class NetworkSpec:
    """Layer sizes for an MLP: input -> hidden... -> output."""

    input_size: int
    hidden: tuple[int, ...] = (64, 64)
    output_size: int = 2

    def sizes(self) -> list[int]:
        return [self.input_size, *self.hidden, self.output_size]


class MLP:
    """Feed-forward net with ELU hidden activations and a linear head.

    Hidden weights use fan-in-scaled uniform initialization; the output
    layer starts at zero so a softmax head yields a uniform policy and a
    value head predicts zero.
    """

    def __init__(self, spec: NetworkSpec, rng: np.random.Generator):
        self.spec = spec
        sizes = spec.sizes()
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for k in range(len(sizes) - 1):
            fan_in, fan_out = sizes[k], sizes[k + 1]
            if k == len(sizes) - 2:
                w = np.zeros((fan_in, fan_out), dtype=DTYPE)
            else:
                bound = 1.0 / np.sqrt(fan_in)
                w = rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(DTYPE)
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out, dtype=DTYPE))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batched forward pass; x has shape (batch, input_size)."""
        h = np.asarray(x, dtype=DTYPE)
        for k in range(self.n_layers - 1):
            h = elu(h @ self.weights[k] + self.biases[k])
        return h @ self.weights[-1] + self.biases[-1]

    def forward_cached(self, x: np.ndarray):
        """Forward pass keeping pre-activations for a later backward pass."""
        h = np.asarray(x, dtype=DTYPE)
        inputs = [h]
        pre = []
        for k in range(self.n_layers - 1):
            z = h @ self.weights[k] + self.biases[k]
            pre.append(z)
            h = elu(z)
            inputs.append(h)
        out = h @ self.weights[-1] + self.biases[-1]
        return out, (inputs, pre)

    def backward(self, cache, grad_out: np.ndarray):
        """Gradients of sum(grad_out * output) w.r.t. all parameters.

        Returns (weight grads, bias grads) in layer order.
        """
        inputs, pre = cache
        gw = [np.empty(0)] * self.n_layers
        gb = [np.empty(0)] * self.n_layers
        g = np.asarray(grad_out, dtype=DTYPE)
        for k in range(self.n_layers - 1, -1, -1):
            gw[k] = inputs[k].T @ g
            gb[k] = g.sum(axis=0)
            if k > 0:
                g = (g @ self.weights[k].T) * elu_grad(pre[k - 1])
        return gw, gb

    # -- flat parameter views, used by the optimizer, clipping and I/O --

    def get_flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def set_flat(self, flat: np.ndarray) -> None:
        off = 0
        for k in range(self.n_layers):
            n = self.weights[k].size
            self.weights[k] = flat[off : off + n].reshape(self.weights[k].shape).copy()
            off += n
            n = self.biases[k].size
            self.biases[k] = flat[off : off + n].copy()
            off += n
        if off != flat.size:
            raise ValueError(f"parameter size mismatch: {off} != {flat.size}")

    @staticmethod
    def flatten_grads(gw, gb) -> np.ndarray:
        parts = []
        for w, b in zip(gw, gb):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)


def clip_global_norm(grad: np.ndarray, max_norm: float) -> np.ndarray:
    """Rescale the flat gradient so its L2 norm is at most max_norm."""
    norm = float(np.linalg.norm(grad))
    if norm > max_norm and norm > 0.0:
        return grad * (max_norm / norm)
    return grad


@dataclass
class Adam:
    """Adaptive moment estimation with bias correction, default constants."""

    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = field(default=None, repr=False)
    v: np.ndarray | None = field(default=None, repr=False)
    t: int = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def finite_difference_check(net: MLP, loss_fn, batch, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    loss_fn(net, batch) must return (scalar loss, flat analytic gradient).
    Intended for small nets (<= ~1e4 parameters).
    """
    _, analytic = loss_fn(net, batch)
    flat = net.get_flat()
    if flat.size > 10_000:
        raise ValueError(f"network too large for finite differences: {flat.size} params")
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        net.set_flat(flat)
        up, _ = loss_fn(net, batch)
        flat[i] = orig - h
        net.set_flat(flat)
        down, _ = loss_fn(net, batch)
        flat[i] = orig
        numeric[i] = (up - down) / (2.0 * h)
    net.set_flat(flat)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-6)
    return float(np.max(np.abs(analytic - numeric) / denom))

"""Dense math for the translator: LSTM cell forward/backward, softmax,
masked cross-entropy, Adam, initializers, and a finite-difference gradient
checker.

Everything is float64 and operates on plain numpy arrays owned by the
caller; no function touches global random state. Vectors may be passed as
shape (d,) or batched as (batch, d) -- the formulas broadcast identically.

Gate packing order is fixed as (input i, forget f, cell-candidate g,
output o): the weight matrix ``W`` has shape (4h, d), ``U`` has (4h, h),
and the bias ``b`` has length 4h, each split into four h-sized blocks in
that order. Model files rely on this layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    # Evaluate via the positive branch only: exp never overflows.
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """Stable softmax: positive entries summing to 1 along ``axis``."""
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


@dataclass
class LstmParams:
    """Packed LSTM gate weights for input size d and hidden size h."""

    W: np.ndarray  # (4h, d)
    U: np.ndarray  # (4h, h)
    b: np.ndarray  # (4h,)

    def __post_init__(self):
        fourh, d = self.W.shape
        if fourh % 4 != 0:
            raise ValueError("W must have 4h rows")
        h = fourh // 4
        if self.U.shape != (fourh, h) or self.b.shape != (fourh,):
            raise ValueError(
                f"inconsistent LSTM shapes: W{self.W.shape} U{self.U.shape} b{self.b.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.W.shape[0] // 4

    @property
    def input_size(self) -> int:
        return self.W.shape[1]

    def arrays(self) -> list[np.ndarray]:
        return [self.W, self.U, self.b]


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray


@dataclass
class LstmCache:
    """Intermediates retained by the forward pass for the backward pass."""

    params: LstmParams
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray


@dataclass
class LstmGrads:
    dW: np.ndarray
    dU: np.ndarray
    db: np.ndarray


def lstm_cell_forward(
    params: LstmParams, x: np.ndarray, prev: LstmState
) -> tuple[LstmState, LstmCache]:
    """One LSTM step.

    i = sig(W_i x + U_i h' + b_i)      f = sig(W_f x + U_f h' + b_f)
    g = tanh(W_g x + U_g h' + b_g)     o = sig(W_o x + U_o h' + b_o)
    c = f*c' + i*g                     h = o*tanh(c)

    ``x`` is (d,) or (batch, d); the state follows the same convention.
    """
    h = params.hidden_size
    gates = x @ params.W.T + prev.h @ params.U.T + params.b
    ai, af, ag, ao = (gates[..., k * h : (k + 1) * h] for k in range(4))
    i, f, o = sigmoid(ai), sigmoid(af), sigmoid(ao)
    g = np.tanh(ag)
    c = f * prev.c + i * g
    tanh_c = np.tanh(c)
    h_new = o * tanh_c
    cache = LstmCache(params, x, prev.h, prev.c, i, f, g, o, c, tanh_c)
    return LstmState(h=h_new, c=c), cache


def lstm_cell_backward(
    cache: LstmCache, grad_h: np.ndarray, grad_c: np.ndarray
) -> tuple[LstmGrads, np.ndarray, LstmState]:
    """Exact gradients of one LSTM step.

    ``grad_h``/``grad_c`` are the loss gradients w.r.t. this step's h and c.
    Returns (parameter grads, grad w.r.t. x, grad w.r.t. previous state).
    """
    i, f, g, o = cache.i, cache.f, cache.g, cache.o
    dc = grad_c + grad_h * o * (1.0 - cache.tanh_c**2)
    do = grad_h * cache.tanh_c
    di = dc * g
    dg = dc * i
    df = dc * cache.c_prev
    dgates = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g**2),
            do * o * (1.0 - o),
        ],
        axis=-1,
    )
    x2 = np.atleast_2d(cache.x)
    h2 = np.atleast_2d(cache.h_prev)
    dg2 = np.atleast_2d(dgates)
    grads = LstmGrads(
        dW=dg2.T @ x2,
        dU=dg2.T @ h2,
        db=dg2.sum(axis=0),
    )
    dx = dgates @ cache.params.W
    dh_prev = dgates @ cache.params.U
    dc_prev = dc * f
    return grads, dx, LstmState(h=dh_prev, c=dc_prev)


def cross_entropy(
    probs: np.ndarray, target_ids: np.ndarray, pad_mask: np.ndarray
) -> tuple[float, np.ndarray]:
    """Masked mean negative log-likelihood plus its gradient w.r.t. logits.

    ``probs`` holds softmax outputs of shape (..., vocab); ``target_ids``
    and the boolean ``pad_mask`` share the leading shape. Positions where
    the mask is False contribute nothing to the loss and get zero
    gradient. The gradient w.r.t. the logits that produced ``probs`` is
    (probs - onehot(target)) / n_unmasked at unmasked positions.

    Probabilities are clamped at 1e-12 inside the log so a confidently
    wrong prediction yields a large but finite loss.
    """
    vocab = probs.shape[-1]
    flat_p = probs.reshape(-1, vocab)
    flat_t = np.asarray(target_ids).reshape(-1)
    flat_m = np.asarray(pad_mask, dtype=bool).reshape(-1)
    if flat_t.size and int(flat_t.max()) >= vocab:
        raise ValueError(f"target id {int(flat_t.max())} out of range for vocab {vocab}")
    n = int(flat_m.sum())
    if n == 0:
        return 0.0, np.zeros_like(probs)
    picked = flat_p[np.arange(flat_t.size), flat_t]
    loss = float(-np.sum(np.log(np.maximum(picked, 1e-12))[flat_m]) / n)
    dlogits = flat_p.copy()
    dlogits[np.arange(flat_t.size), flat_t] -= 1.0
    dlogits[~flat_m] = 0.0
    dlogits /= n
    return loss, dlogits.reshape(probs.shape)


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter array."""

    m: list[np.ndarray]
    v: list[np.ndarray]

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    moments: AdamState,
    t: int,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[list[np.ndarray], AdamState]:
    """Bias-corrected Adam update, applied in place; ``t`` starts at 1."""
    if t < 1:
        raise ValueError("adam_step timestep t must be >= 1")
    if not (len(params) == len(grads) == len(moments.m) == len(moments.v)):
        raise ValueError("params/grads/moments length mismatch")
    for p, g, m, v in zip(params, grads, moments.m, moments.v):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch: param {p.shape} vs grad {g.shape}")
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params, moments


def glorot_uniform(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform init in [-s, s] with s = sqrt(6 / (fan_in + fan_out))."""
    s = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-s, s, size=(rows, cols))


def init_lstm_params(input_size: int, hidden_size: int, rng: np.random.Generator) -> LstmParams:
    """Glorot-uniform gate weights, zero biases, forget-gate bias 1."""
    h = hidden_size
    params = LstmParams(
        W=glorot_uniform(4 * h, input_size, rng),
        U=glorot_uniform(4 * h, h, rng),
        b=np.zeros(4 * h),
    )
    params.b[h : 2 * h] = 1.0
    return params


@dataclass
class GradCheckReport:
    """Outcome of comparing analytic gradients with central differences."""

    max_rel_error: float
    per_param: list[float]
    passed: bool


def grad_check(
    f,
    params: list[np.ndarray],
    eps: float = 1e-5,
    tol: float = 1e-4,
) -> GradCheckReport:
    """Check analytic gradients of ``f`` against central differences.

    ``f(params) -> (loss, grads)`` must return a finite scalar and one
    gradient array per parameter. Each coordinate is perturbed by +/-eps;
    the relative error is |a - n| / max(|a|, |n|), taken as zero when the
    absolute difference is below 1e-9 (both sides numerically zero).
    """
    loss, analytic = f(params)
    if not np.isfinite(loss):
        raise ValueError("f returned a non-finite loss")
    per_param = []
    for k, p in enumerate(params):
        worst = 0.0
        flat = p.reshape(-1)
        a_flat = analytic[k].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up, _ = f(params)
            flat[j] = orig - eps
            down, _ = f(params)
            flat[j] = orig
            if not (np.isfinite(up) and np.isfinite(down)):
                raise ValueError("f returned a non-finite loss during perturbation")
            numeric = (up - down) / (2.0 * eps)
            diff = abs(a_flat[j] - numeric)
            if diff <= 1e-9:
                continue
            worst = max(worst, diff / max(abs(a_flat[j]), abs(numeric)))
        per_param.append(worst)
    worst_overall = max(per_param, default=0.0)
    return GradCheckReport(
        max_rel_error=worst_overall,
        per_param=per_param,
        passed=worst_overall < tol,
    )

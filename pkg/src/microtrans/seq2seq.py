"""LSTM encoder-decoder translator with a repeated context vector.

Pipeline (one direction, no attention, no autoregressive feedback):
embed every source token; run the encoder LSTM across the whole padded
source; take its final hidden state as the context vector; feed that same
vector to the decoder LSTM at every output step; project each decoder
hidden state through a shared dense layer + softmax over the target
vocabulary. Decoding is greedy per-step argmax (ties go to the lowest id)
and padding tokens are dropped from the rendered text.

Model file format (extension ``.mtm``), little-endian throughout:

    bytes 0-7    magic b"\\x89MTM\\r\\n\\x1a\\n"
    byte  8      format version (currently 1)
    bytes 9-12   uint32 header length
    header       UTF-8 JSON: config, cleaning policy, both vocabularies,
                 and the array manifest (name + shape, in order)
    arrays       float32 row-major, concatenated in manifest order:
                 embedding, encoder W/U/b, decoder W/U/b,
                 projection weight, projection bias

Weights are float64 in memory and stored as float32; reload changes any
weight by at most one float32 ulp.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from . import corpus as corpus_mod
from .corpus import EncodedBatch, Vocabulary, PAD_ID
from .errors import ModelFormatError, TrainingDiverged
from .numerics import (
    AdamState,
    LstmParams,
    LstmState,
    adam_step,
    glorot_uniform,
    init_lstm_params,
    sigmoid,
    softmax,
)

MODEL_MAGIC = b"\x89MTM\r\n\x1a\n"
MODEL_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    embed_dim: int
    hidden_size: int
    src_vocab_size: int
    tgt_vocab_size: int
    src_max_len: int
    tgt_max_len: int

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 1:
                raise ValueError(f"ModelConfig.{name} must be positive, got {value}")


@dataclass
class TrainingConfig:
    epochs: int = 30
    batch_size: int = 64
    learning_rate: float = 1e-3
    seed: int = 0
    validation_fraction: float = 0.1
    checkpoint_path: str | None = None
    # When True the loss ignores padded target positions. The default keeps
    # them: the decoder then learns to emit PAD past the end of a sentence,
    # which is what lets greedy decoding produce finite translations.
    mask_pad: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")


def parameter_count(config: ModelConfig) -> int:
    """Total trainable scalars for a model of this shape."""
    d, h = config.embed_dim, config.hidden_size
    embedding = config.src_vocab_size * d
    encoder = 4 * (h * (d + h) + h)
    decoder = 4 * (h * (h + h) + h)
    projection = (h + 1) * config.tgt_vocab_size
    return embedding + encoder + decoder + projection


class Seq2SeqModel:
    """Weights, vocabularies, and configuration of one translator."""

    def __init__(
        self,
        config: ModelConfig,
        src_vocab: Vocabulary,
        tgt_vocab: Vocabulary,
        embedding: np.ndarray,
        encoder: LstmParams,
        decoder: LstmParams,
        proj_w: np.ndarray,
        proj_b: np.ndarray,
        policy: str = "natural",
    ):
        if len(src_vocab) != config.src_vocab_size or len(tgt_vocab) != config.tgt_vocab_size:
            raise ValueError("vocabulary sizes disagree with config")
        if embedding.shape != (config.src_vocab_size, config.embed_dim):
            raise ValueError(f"embedding shape {embedding.shape} disagrees with config")
        if proj_w.shape != (config.hidden_size, config.tgt_vocab_size):
            raise ValueError(f"projection shape {proj_w.shape} disagrees with config")
        if proj_b.shape != (config.tgt_vocab_size,):
            raise ValueError(f"projection bias shape {proj_b.shape} disagrees with config")
        self.config = config
        self.src_vocab = src_vocab
        self.tgt_vocab = tgt_vocab
        self.embedding = embedding
        self.encoder = encoder
        self.decoder = decoder
        self.proj_w = proj_w
        self.proj_b = proj_b
        self.policy = policy

    @classmethod
    def init(
        cls,
        config: ModelConfig,
        src_vocab: Vocabulary,
        tgt_vocab: Vocabulary,
        seed: int = 0,
        policy: str = "natural",
    ) -> "Seq2SeqModel":
        rng = np.random.Generator(np.random.PCG64(seed))
        d, h = config.embed_dim, config.hidden_size
        return cls(
            config=config,
            src_vocab=src_vocab,
            tgt_vocab=tgt_vocab,
            embedding=glorot_uniform(config.src_vocab_size, d, rng),
            encoder=init_lstm_params(d, h, rng),
            decoder=init_lstm_params(h, h, rng),
            proj_w=glorot_uniform(h, config.tgt_vocab_size, rng),
            proj_b=np.zeros(config.tgt_vocab_size),
            policy=policy,
        )

    def parameters(self) -> list[np.ndarray]:
        """All weight arrays in the fixed serialization order."""
        return [
            self.embedding,
            self.encoder.W,
            self.encoder.U,
            self.encoder.b,
            self.decoder.W,
            self.decoder.U,
            self.decoder.b,
            self.proj_w,
            self.proj_b,
        ]

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())


_ARRAY_NAMES = (
    "embedding",
    "encoder.W",
    "encoder.U",
    "encoder.b",
    "decoder.W",
    "decoder.U",
    "decoder.b",
    "proj_w",
    "proj_b",
)


def _run_lstm(params: LstmParams, xs: np.ndarray) -> tuple[np.ndarray, list]:
    """Run an LSTM over (batch, steps, input); return per-step h and caches."""
    batch, steps, _ = xs.shape
    h = params.hidden_size
    state = LstmState(h=np.zeros((batch, h)), c=np.zeros((batch, h)))
    hs = np.empty((batch, steps, h))
    caches = []
    from .numerics import lstm_cell_forward

    for t in range(steps):
        state, cache = lstm_cell_forward(params, xs[:, t, :], state)
        hs[:, t, :] = state.h
        caches.append(cache)
    return hs, caches


# Inference always runs its matrix products at this row count (smaller
# batches are padded with PAD rows, larger ones chunked). BLAS rounding
# depends on operand shapes, so pinning the compute width makes every
# sentence's output bit-identical no matter how sentences are batched.
INFERENCE_CHUNK = 64


def forward(model: Seq2SeqModel, src: EncodedBatch) -> np.ndarray:
    """Per-step target distributions, shape (batch, tgt_max_len, tgt_vocab).

    Output for a sentence is bit-identical whether it arrives alone or
    inside any larger batch.
    """
    ids = src.ids
    cfg = model.config
    n = ids.shape[0]
    out = np.empty((n, cfg.tgt_max_len, cfg.tgt_vocab_size))
    for lo in range(0, n, INFERENCE_CHUNK):
        chunk = ids[lo : lo + INFERENCE_CHUNK]
        m = chunk.shape[0]
        if m < INFERENCE_CHUNK:
            pad = np.zeros((INFERENCE_CHUNK - m, ids.shape[1]), dtype=ids.dtype)
            chunk = np.vstack([chunk, pad])
        probs, _ = _forward_cached(model, chunk)
        out[lo : lo + m] = probs[:m]
    return out


def _forward_cached(model: Seq2SeqModel, src_ids: np.ndarray):
    cfg = model.config
    if src_ids.ndim != 2:
        raise ValueError("src ids must be a (batch, len) matrix")
    if src_ids.size and int(src_ids.max()) >= cfg.src_vocab_size:
        raise ValueError("source id out of range")
    xs = model.embedding[src_ids]  # (B, T_s, d); PAD embeds like any token
    enc_hs, enc_caches = _run_lstm(model.encoder, xs)
    context = enc_hs[:, -1, :]  # (B, h)
    dec_in = np.repeat(context[:, None, :], cfg.tgt_max_len, axis=1)
    dec_hs, dec_caches = _run_lstm(model.decoder, dec_in)
    logits = dec_hs @ model.proj_w + model.proj_b  # (B, T_t, V_t)
    probs = softmax(logits, axis=-1)
    cache = (src_ids, xs, enc_caches, context, dec_hs, dec_caches, probs)
    return probs, cache


def _backward(model: Seq2SeqModel, cache, dlogits: np.ndarray) -> list[np.ndarray]:
    """Gradients for every model parameter, in parameters() order."""
    from .numerics import lstm_cell_backward

    src_ids, xs, enc_caches, context, dec_hs, dec_caches, _probs = cache
    batch, t_out, _ = dlogits.shape
    h = model.config.hidden_size

    d_proj_w = dec_hs.reshape(-1, h).T @ dlogits.reshape(-1, dlogits.shape[-1])
    d_proj_b = dlogits.sum(axis=(0, 1))
    d_dec_hs = dlogits @ model.proj_w.T  # (B, T_t, h)

    dW_dec = np.zeros_like(model.decoder.W)
    dU_dec = np.zeros_like(model.decoder.U)
    db_dec = np.zeros_like(model.decoder.b)
    d_context = np.zeros_like(context)
    grad_state = LstmState(h=np.zeros((batch, h)), c=np.zeros((batch, h)))
    for t in range(t_out - 1, -1, -1):
        grad_h = d_dec_hs[:, t, :] + grad_state.h
        grads, dx, grad_state = lstm_cell_backward(dec_caches[t], grad_h, grad_state.c)
        dW_dec += grads.dW
        dU_dec += grads.dU
        db_dec += grads.db
        d_context += dx  # decoder input is the context at every step

    dW_enc = np.zeros_like(model.encoder.W)
    dU_enc = np.zeros_like(model.encoder.U)
    db_enc = np.zeros_like(model.encoder.b)
    d_xs = np.zeros_like(xs)
    t_in = xs.shape[1]
    grad_state = LstmState(h=d_context, c=np.zeros((batch, h)))
    for t in range(t_in - 1, -1, -1):
        grads, dx, grad_state = lstm_cell_backward(
            enc_caches[t], grad_state.h, grad_state.c
        )
        dW_enc += grads.dW
        dU_enc += grads.dU
        db_enc += grads.db
        d_xs[:, t, :] = dx

    d_embed = np.zeros_like(model.embedding)
    np.add.at(d_embed, src_ids.reshape(-1), d_xs.reshape(-1, d_xs.shape[-1]))

    return [d_embed, dW_enc, dU_enc, db_enc, dW_dec, dU_dec, db_dec, d_proj_w, d_proj_b]


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float | None
    seconds: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "epoch": self.epoch,
                "train_loss": self.train_loss,
                "val_loss": self.val_loss,
                "seconds": self.seconds,
            }
        )


def _batch_loss(model, src_ids, tgt_ids, mask_pad, want_grads):
    from .numerics import cross_entropy

    probs, cache = _forward_cached(model, src_ids)
    mask = tgt_ids != PAD_ID if mask_pad else np.ones_like(tgt_ids, dtype=bool)
    loss, dlogits = cross_entropy(probs, tgt_ids, mask)
    n_positions = int(mask.sum())
    if not want_grads:
        return loss, n_positions, None
    return loss, n_positions, _backward(model, cache, dlogits)


def train(
    model: Seq2SeqModel,
    src: EncodedBatch,
    tgt: EncodedBatch,
    config: TrainingConfig,
) -> list[EpochStats]:
    """Minibatch Adam training; returns per-epoch loss history.

    Deterministic for a fixed (model init, data, config): the validation
    split and every epoch's shuffle derive from ``config.seed``. When a
    checkpoint path is set, the model is saved whenever validation loss
    improves. A non-finite loss aborts with :class:`TrainingDiverged`
    (any checkpoint written so far is left in place).
    """
    n = src.ids.shape[0]
    if n == 0 or tgt.ids.shape[0] != n:
        raise ValueError("source/target batches must be nonempty and aligned")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    order = rng.permutation(n)
    n_val = int(round(config.validation_fraction * n))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if train_idx.size == 0:
        raise ValueError("validation fraction leaves no training data")

    params = model.parameters()
    moments = AdamState.for_params(params)
    history: list[EpochStats] = []
    best_val = np.inf
    step = 0
    for epoch in range(1, config.epochs + 1):
        t0 = time.perf_counter()
        epoch_order = train_idx[rng.permutation(train_idx.size)]
        total_nll = 0.0
        total_positions = 0
        for lo in range(0, epoch_order.size, config.batch_size):
            idx = epoch_order[lo : lo + config.batch_size]
            loss, n_pos, grads = _batch_loss(
                model, src.ids[idx], tgt.ids[idx], config.mask_pad, want_grads=True
            )
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}, batch starting {lo}"
                )
            step += 1
            adam_step(params, grads, moments, step, lr=config.learning_rate)
            total_nll += loss * n_pos
            total_positions += n_pos
        train_loss = total_nll / max(total_positions, 1)

        val_loss = None
        if val_idx.size:
            v_nll = 0.0
            v_pos = 0
            for lo in range(0, val_idx.size, config.batch_size):
                idx = val_idx[lo : lo + config.batch_size]
                loss, n_pos, _ = _batch_loss(
                    model, src.ids[idx], tgt.ids[idx], config.mask_pad, want_grads=False
                )
                v_nll += loss * n_pos
                v_pos += n_pos
            val_loss = v_nll / max(v_pos, 1)
            if not np.isfinite(val_loss):
                raise TrainingDiverged(f"non-finite validation loss at epoch {epoch}")
            if config.checkpoint_path and val_loss < best_val:
                best_val = val_loss
                save(model, config.checkpoint_path)

        history.append(
            EpochStats(
                epoch=epoch,
                train_loss=float(train_loss),
                val_loss=None if val_loss is None else float(val_loss),
                seconds=time.perf_counter() - t0,
            )
        )
    return history


def translate(model: Seq2SeqModel, text: str) -> str:
    """Greedy-decode one sentence with the model's own cleaning policy."""
    from .corpus import Corpus, SentencePair, clean

    cleaned = corpus_mod._clean_text(text, model.policy)
    batch = corpus_mod.encode([cleaned], model.src_vocab, model.config.src_max_len)
    probs = forward(model, batch)
    ids = probs[0].argmax(axis=-1)  # ties resolve to the lowest id
    return corpus_mod.decode(ids, model.tgt_vocab)


def save(model: Seq2SeqModel, path: str) -> None:
    """Write the model file described in the module docstring."""
    arrays = model.parameters()
    header = {
        "config": {
            "embed_dim": model.config.embed_dim,
            "hidden_size": model.config.hidden_size,
            "src_vocab_size": model.config.src_vocab_size,
            "tgt_vocab_size": model.config.tgt_vocab_size,
            "src_max_len": model.config.src_max_len,
            "tgt_max_len": model.config.tgt_max_len,
        },
        "policy": model.policy,
        "src_vocab": model.src_vocab.id_to_token,
        "tgt_vocab": model.tgt_vocab.id_to_token,
        "arrays": [
            {"name": name, "shape": list(arr.shape)}
            for name, arr in zip(_ARRAY_NAMES, arrays)
        ],
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<B", MODEL_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load(path: str) -> Seq2SeqModel:
    """Read a model file; failures name the offending byte offset."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MODEL_MAGIC) or data[: len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise ModelFormatError("bad magic bytes (not a model file)", offset=0)
    pos = len(MODEL_MAGIC)
    version = data[pos]
    if version != MODEL_VERSION:
        raise ModelFormatError(f"unsupported format version {version}", offset=pos)
    pos += 1
    if len(data) < pos + 4:
        raise ModelFormatError("truncated header length", offset=pos)
    (header_len,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if len(data) < pos + header_len:
        raise ModelFormatError("truncated header", offset=pos)
    try:
        header = json.loads(data[pos : pos + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unreadable header: {exc}", offset=pos) from exc
    pos += header_len

    try:
        config = ModelConfig(**header["config"])
        policy = header["policy"]
        src_vocab = Vocabulary(header["src_vocab"])
        tgt_vocab = Vocabulary(header["tgt_vocab"])
        manifest = header["arrays"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid header contents: {exc}", offset=pos) from exc
    if [e["name"] for e in manifest] != list(_ARRAY_NAMES):
        raise ModelFormatError("unexpected array manifest", offset=pos)

    arrays = []
    for entry in manifest:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 4
        if len(data) < pos + nbytes:
            raise ModelFormatError(
                f"truncated array {entry['name']!r}", offset=pos
            )
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos)
        arrays.append(arr.astype(np.float64).reshape(shape))
        pos += nbytes
    if pos != len(data):
        raise ModelFormatError("trailing bytes after last array", offset=pos)

    embedding, enc_w, enc_u, enc_b, dec_w, dec_u, dec_b, proj_w, proj_b = arrays
    return Seq2SeqModel(
        config=config,
        src_vocab=src_vocab,
        tgt_vocab=tgt_vocab,
        embedding=embedding,
        encoder=LstmParams(enc_w, enc_u, enc_b),
        decoder=LstmParams(dec_w, dec_u, dec_b),
        proj_w=proj_w,
        proj_b=proj_b,
        policy=policy,
    )

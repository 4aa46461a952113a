"""Bilingual sentence-pair corpora: TSV ingestion, cleaning, splitting,
vocabulary construction, and integer encoding.

The on-disk format is the Tatoeba/Anki export layout: UTF-8 text, one pair
per line, fields separated by single tabs -- ``source<TAB>target`` with an
optional third attribution column. Lines are joined with ``\\n``.
"""

from __future__ import annotations

import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorpusFormatError
from .rng import SplitMix64

log = logging.getLogger(__name__)

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

POLICIES = ("natural", "obfuscated")


@dataclass(frozen=True, slots=True)
class SentencePair:
    source: str
    target: str
    attribution: str | None = None


@dataclass(frozen=True)
class Corpus:
    pairs: list[SentencePair]
    source_lang: str = "source"
    target_lang: str = "target"

    def __len__(self) -> int:
        return len(self.pairs)

    def sources(self) -> list[str]:
        return [p.source for p in self.pairs]

    def targets(self) -> list[str]:
        return [p.target for p in self.pairs]

    def swapped(self) -> "Corpus":
        """The same corpus with source and target exchanged."""
        return Corpus(
            pairs=[
                SentencePair(p.target, p.source, p.attribution) for p in self.pairs
            ],
            source_lang=self.target_lang,
            target_lang=self.source_lang,
        )


def load_tsv(
    path: str | Path,
    source_col: int = 0,
    target_col: int = 1,
    strict: bool = True,
) -> Corpus:
    """Read a tab-separated pair file.

    ``source_col``/``target_col`` select which columns feed which side, so
    passing (1, 0) trains the reverse direction of the same file. Fields
    beyond the second are kept as the attribution. Malformed lines raise a
    line-numbered :class:`CorpusFormatError` when ``strict``, otherwise
    they are skipped with a warning.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    needed = max(source_col, target_col) + 1
    pairs = []
    skipped = 0
    for line_no, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) < max(2, needed):
            if strict:
                raise CorpusFormatError(
                    f"expected at least {max(2, needed)} tab-separated fields, "
                    f"got {len(fields)}",
                    line_no=line_no,
                )
            skipped += 1
            continue
        source, target = fields[source_col], fields[target_col]
        if not source or not target:
            if strict:
                raise CorpusFormatError("empty source or target field", line_no=line_no)
            skipped += 1
            continue
        attribution = "\t".join(fields[2:]) if len(fields) > 2 else None
        pairs.append(SentencePair(source, target, attribution))
    if skipped:
        log.warning("load_tsv(%s): skipped %d malformed line(s)", path, skipped)
    if not pairs:
        raise CorpusFormatError(f"empty corpus: {path}")
    return Corpus(pairs=pairs)


def save_tsv(corpus: Corpus, path: str | Path) -> None:
    """Write ``source<TAB>target[<TAB>attribution]`` lines with ``\\n`` endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in corpus.pairs:
            if p.attribution is not None:
                fh.write(f"{p.source}\t{p.target}\t{p.attribution}\n")
            else:
                fh.write(f"{p.source}\t{p.target}\n")


def _clean_text(text: str, policy: str) -> str:
    # Tabs/newlines count as whitespace before any filtering.
    chars = [" " if ch.isspace() else ch for ch in text]
    out = []
    for ch in chars:
        if ch == " ":
            out.append(ch)
            continue
        cat = unicodedata.category(ch)
        if cat.startswith("C"):
            continue  # non-printable
        if policy == "natural" and cat[0] in ("P", "S"):
            continue  # punctuation and symbols
        out.append(ch)
    cleaned = " ".join("".join(out).split())
    return cleaned.casefold() if policy == "natural" else cleaned


def clean(corpus: Corpus, policy: str) -> Corpus:
    """Normalize pair text under one of two policies.

    ``natural`` case-folds and strips punctuation/symbol characters, as is
    usual for named-language corpora. ``obfuscated`` preserves case and
    every symbol (leet's alphabet is made of symbols) and only collapses
    whitespace runs. Pairs that clean to empty on either side are dropped
    and counted in a warning.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown cleaning policy {policy!r}; expected {POLICIES}")
    kept = []
    dropped = 0
    for p in corpus.pairs:
        src = _clean_text(p.source, policy)
        tgt = _clean_text(p.target, policy)
        if not src or not tgt:
            dropped += 1
            continue
        kept.append(SentencePair(src, tgt, p.attribution))
    if dropped:
        log.warning("clean(%s): dropped %d pair(s) emptied by cleaning", policy, dropped)
    return Corpus(pairs=kept, source_lang=corpus.source_lang, target_lang=corpus.target_lang)


def split(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Seeded shuffle, then cut into (train, held_out).

    The two parts are disjoint and their union is the input; identical
    (corpus, fraction, seed) always produce identical partitions.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = len(corpus.pairs)
    n_train = int(train_fraction * n)
    if n_train < 1 or n - n_train < 1:
        raise ValueError(
            f"corpus of {n} pair(s) cannot be split {train_fraction:g} "
            "with at least one pair per part"
        )
    order = list(range(n))
    SplitMix64(seed).shuffle(order)
    train = [corpus.pairs[i] for i in order[:n_train]]
    held = [corpus.pairs[i] for i in order[n_train:]]
    mk = lambda pairs: Corpus(pairs, corpus.source_lang, corpus.target_lang)
    return mk(train), mk(held)


class Vocabulary:
    """Token <-> id bijection with PAD=0 and UNK=1 reserved."""

    def __init__(self, tokens: list[str]):
        if tokens[:2] != [PAD_TOKEN, UNK_TOKEN]:
            tokens = [PAD_TOKEN, UNK_TOKEN] + tokens
        self.id_to_token = list(tokens)
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate token in vocabulary")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def token_of(self, idx: int) -> str:
        return self.id_to_token[idx]


def build_vocab(texts, max_size: int | None = None) -> Vocabulary:
    """Frequency-ranked whitespace-token vocabulary.

    Ties in frequency break lexicographically so the ranking is fully
    deterministic. ``max_size`` caps the total size including PAD/UNK.
    """
    counts = Counter()
    for text in texts:
        counts.update(text.split())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    tokens = [t for t, _ in ranked]
    if max_size is not None:
        if max_size < 2:
            raise ValueError("max_size must be >= 2 to fit PAD and UNK")
        tokens = tokens[: max_size - 2]
    return Vocabulary([PAD_TOKEN, UNK_TOKEN] + tokens)


@dataclass
class EncodedBatch:
    """Right-padded id matrix plus the true length of each row."""

    ids: np.ndarray  # (batch, max_len) int64
    lengths: np.ndarray  # (batch,) int64

    def __post_init__(self):
        if self.ids.ndim != 2 or self.lengths.shape != (self.ids.shape[0],):
            raise ValueError("ids must be (batch, max_len) with one length per row")


def encode(texts, vocab: Vocabulary, max_len: int) -> EncodedBatch:
    """Tokenize, map to ids (UNK for unknowns), truncate, right-pad."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    rows = []
    lengths = []
    for text in texts:
        ids = [vocab.id_of(t) for t in text.split()][:max_len]
        lengths.append(len(ids))
        rows.append(ids + [PAD_ID] * (max_len - len(ids)))
    return EncodedBatch(
        ids=np.asarray(rows, dtype=np.int64).reshape(len(rows), max_len),
        lengths=np.asarray(lengths, dtype=np.int64),
    )


def decode(ids, vocab: Vocabulary) -> str:
    """Map an id sequence back to text, dropping padding."""
    return " ".join(vocab.token_of(int(i)) for i in ids if int(i) != PAD_ID)


def default_max_len(texts, cap: int = 64) -> int:
    """Longest whitespace-token sentence, capped, and at least 1."""
    longest = max((len(t.split()) for t in texts), default=1)
    return max(1, min(longest, cap))

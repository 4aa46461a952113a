"""BLEU-1..4 scoring and the qualitative interpretation scale.

``modified_precision`` returns exact integer (numerator, denominator)
pairs: each candidate n-gram's count is clipped to the most times it
appears in any single reference. Cumulative BLEU-n is the brevity penalty
times the geometric mean of p_1..p_n with uniform weights 1/n. Corpus
scoring micro-averages: numerators, denominators, and lengths are summed
over all pairs before the geometric mean, so it is NOT the mean of the
sentence scores.

Smoothing: the default "none" policy zeroes any cumulative score whose
precisions include a zero. The opt-in "epsilon" policy substitutes a small
numerator (default 0.1) for zero counts before the geometric mean, which
is how a cumulative BLEU-3 can exceed BLEU-2 on sparse matches. Orders for
which no n-gram exists at all (candidate shorter than n, the (0, 0)
marker) are vacuous and drop out of the mean, so a perfect two-token pair
still scores BLEU-4 = 1.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass

SMOOTHING_POLICIES = ("none", "epsilon")


class Interpretation(enum.Enum):
    """Qualitative quality bins over BLEU in [0, 1], in ascending order."""

    USELESS = "Useless"
    HARD_TO_GET_GIST = "Hard To Get Gist"
    GIST_CLEAR_WITH_ERRORS = "Gist Clear With Errors"
    UNDERSTANDABLE_TO_GOOD = "Understandable To Good"
    HIGH_QUALITY = "High Quality"
    FLUENT = "Fluent"
    MAY_EXCEED_HUMAN = "May Exceed Human"


_BIN_UPPER_BOUNDS = [
    (0.10, Interpretation.USELESS),
    (0.20, Interpretation.HARD_TO_GET_GIST),
    (0.30, Interpretation.GIST_CLEAR_WITH_ERRORS),
    (0.40, Interpretation.UNDERSTANDABLE_TO_GOOD),
    (0.50, Interpretation.HIGH_QUALITY),
    (0.60, Interpretation.FLUENT),
]


def interpret(score: float) -> Interpretation:
    """Map a BLEU value to its quality bin (half-open; [0.60, 1] is the top)."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [0, 1]")
    for upper, label in _BIN_UPPER_BOUNDS:
        if score < upper:
            return label
    return Interpretation.MAY_EXCEED_HUMAN


def _ngrams(tokens, n: int):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def modified_precision(candidate, references, n: int) -> tuple[int, int]:
    """Clipped n-gram match count over total candidate n-grams, as exact ints.

    A candidate shorter than ``n`` yields the (0, 0) marker.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cand_counts = Counter(_ngrams(candidate, n))
    total = sum(cand_counts.values())
    if total == 0:
        return 0, 0
    matched = 0
    for gram, count in cand_counts.items():
        best = max(Counter(_ngrams(ref, n))[gram] for ref in references)
        matched += min(count, best)
    return matched, total


def _closest_ref_len(cand_len: int, references) -> int:
    # Closest reference length; ties go to the shorter reference.
    return min((len(r) for r in references), key=lambda rl: (abs(rl - cand_len), rl))


@dataclass(frozen=True)
class BleuScore:
    """Per-n modified precisions and cumulative BLEU-1..max_n."""

    precisions: tuple[tuple[int, int], ...]  # (numerator, denominator) per n
    bleu: tuple[float, ...]  # cumulative scores, bleu[k] is BLEU-(k+1)
    bp: float
    cand_len: int
    ref_len: int

    @property
    def bleu1(self) -> float:
        return self.bleu[0]

    @property
    def bleu4(self) -> float:
        return self.bleu[3]


def _cumulative(counts, bp: float, smoothing: str, epsilon: float) -> tuple[float, ...]:
    scores = []
    for n in range(1, len(counts) + 1):
        log_sum = 0.0
        terms = 0
        zero = False
        for num, den in counts[:n]:
            if den == 0:
                continue  # no n-grams of this order exist: vacuous, skip
            if num == 0:
                if smoothing == "epsilon":
                    num = epsilon
                else:
                    zero = True
                    break
            log_sum += math.log(num / den)
            terms += 1
        if zero or terms == 0:
            scores.append(0.0)
        else:
            scores.append(bp * math.exp(log_sum / terms))
    return tuple(scores)


def _score_from_counts(counts, cand_len, ref_len, smoothing, epsilon):
    if smoothing not in SMOOTHING_POLICIES:
        raise ValueError(f"unknown smoothing {smoothing!r}; expected {SMOOTHING_POLICIES}")
    if cand_len == 0:
        bp = 0.0
    elif cand_len > ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / cand_len)
    return BleuScore(
        precisions=tuple(counts),
        bleu=_cumulative(counts, bp, smoothing, epsilon),
        bp=bp,
        cand_len=cand_len,
        ref_len=ref_len,
    )


def sentence_bleu(
    candidate,
    references,
    max_n: int = 4,
    smoothing: str = "none",
    epsilon: float = 0.1,
) -> BleuScore:
    """Score one tokenized candidate against one or more tokenized references."""
    if not 1 <= max_n <= 4:
        raise ValueError("max_n must be in 1..4")
    if not references:
        raise ValueError("at least one reference required")
    counts = [modified_precision(candidate, references, n) for n in range(1, max_n + 1)]
    ref_len = _closest_ref_len(len(candidate), references)
    return _score_from_counts(counts, len(candidate), ref_len, smoothing, epsilon)


def corpus_bleu(
    pairs,
    max_n: int = 4,
    smoothing: str = "none",
    epsilon: float = 0.1,
) -> BleuScore:
    """Micro-averaged BLEU over (candidate, references) pairs.

    Counts and lengths are accumulated across the whole corpus before the
    geometric mean, so a single-pair corpus equals its sentence score but a
    multi-pair corpus generally differs from the mean of sentence scores.
    """
    if not 1 <= max_n <= 4:
        raise ValueError("max_n must be in 1..4")
    pairs = list(pairs)
    if not pairs:
        raise ValueError("at least one (candidate, references) pair required")
    totals = [[0, 0] for _ in range(max_n)]
    cand_len = 0
    ref_len = 0
    for candidate, references in pairs:
        if not references:
            raise ValueError("every pair needs at least one reference")
        for k in range(max_n):
            num, den = modified_precision(candidate, references, k + 1)
            totals[k][0] += num
            totals[k][1] += den
        cand_len += len(candidate)
        ref_len += _closest_ref_len(len(candidate), references)
    counts = [(num, den) for num, den in totals]
    return _score_from_counts(counts, cand_len, ref_len, smoothing, epsilon)


@dataclass(frozen=True)
class EvalReport:
    """One evaluated model, shaped like a score-table row."""

    language: str
    example_source: str
    example_output: str
    bleu: tuple[float, float, float, float]
    interpretation: str
    pairs_scored: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "language": self.language,
                "example_source": self.example_source,
                "example_output": self.example_output,
                "bleu": list(self.bleu),
                "interpretation": self.interpretation,
                "pairs_scored": self.pairs_scored,
            },
            ensure_ascii=False,
        )

    def to_text(self) -> str:
        header = (
            f"{'Language':<14} {'Example Translation':<30} "
            f"{'BLEU-1':>7} {'BLEU-2':>7} {'BLEU-3':>7} {'BLEU-4':>7}  Interpretation"
        )
        row = (
            f"{self.language:<14} {self.example_output:<30} "
            f"{self.bleu[0]:>7.2f} {self.bleu[1]:>7.2f} {self.bleu[2]:>7.2f} "
            f"{self.bleu[3]:>7.2f}  {self.interpretation}"
        )
        return header + "\n" + row


def evaluate_model(
    model,
    test_corpus,
    language: str = "unlabeled",
    smoothing: str = "none",
) -> EvalReport:
    """Translate every test source and micro-average BLEU against the targets.

    Candidate and reference are tokenized with the model's own cleaning
    policy so scoring matches what the model was trained on.
    """
    from . import corpus as corpus_mod
    from .seq2seq import translate

    if not test_corpus.pairs:
        raise ValueError("empty test corpus")
    scored = []
    example_source = example_output = ""
    for k, pair in enumerate(test_corpus.pairs):
        output = translate(model, pair.source)
        reference = corpus_mod._clean_text(pair.target, model.policy)
        scored.append((output.split(), [reference.split()]))
        if k == 0:
            example_source, example_output = pair.source, output
    score = corpus_bleu(scored, max_n=4, smoothing=smoothing)
    return EvalReport(
        language=language,
        example_source=example_source,
        example_output=example_output,
        bleu=tuple(score.bleu),
        interpretation=interpret(score.bleu1).value,
        pairs_scored=len(scored),
    )

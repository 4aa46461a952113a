"""Text obfuscators: three leet tiers and mirror writing.

The three leet tiers trade off readability against depth of substitution:

* ``lite``  -- only s, e, i, o, t are replaced, each by one designated
  character (s keeps its case as z/Z; e/i/o/t become 3/1/0/7).
* ``mid``   -- every Latin letter is replaced by the first candidate in
  its table row, ignoring case.
* ``hard``  -- every Latin letter is replaced by a uniformly random
  candidate from its row, drawn from a seeded SplitMix64 stream, so the
  same (text, seed) always produces the same output.

Mirror writing reverses the whole phrase's character sequence.

Anything that is not an uppercase or lowercase Latin letter (digits,
punctuation, whitespace, non-Latin scripts) passes through unchanged.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import TableFormatError
from .rng import SplitMix64, derive_seed

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

# Lite designations: letter -> (substitute, preserve_case).  's' is the only
# letter whose substitute is itself cased.
_DEFAULT_LITE = {
    "S": ("z", True),
    "E": ("3", False),
    "I": ("1", False),
    "O": ("0", False),
    "T": ("7", False),
}


class LeetTier(enum.Enum):
    LITE = "lite"
    MID = "mid"
    HARD = "hard"


@dataclass(frozen=True)
class SubstitutionTable:
    """Per-letter ordered candidate substitutions.

    ``entries`` maps each uppercase letter A-Z to a nonempty list of
    candidate strings; ``lite_map`` designates the single lite-tier
    substitute for a subset of {S, E, I, O, T} along with its case policy.
    """

    entries: dict[str, list[str]]
    lite_map: dict[str, tuple[str, bool]] = field(
        default_factory=lambda: dict(_DEFAULT_LITE)
    )
    name: str = "unnamed"

    def __post_init__(self):
        if sorted(self.entries) != list(_LETTERS):
            missing = sorted(set(_LETTERS) - set(self.entries))
            extra = sorted(set(self.entries) - set(_LETTERS))
            raise TableFormatError(
                f"table {self.name!r} must cover exactly A-Z "
                f"(missing {missing}, extra {extra})"
            )
        for letter, cands in self.entries.items():
            if not cands:
                raise TableFormatError(
                    f"table {self.name!r}: letter {letter} has no candidates"
                )
            for c in cands:
                if c == "":
                    raise TableFormatError(
                        f"table {self.name!r}: letter {letter} has an empty candidate"
                    )
                if any(ch.isspace() for ch in c):
                    raise TableFormatError(
                        f"table {self.name!r}: candidate {c!r} of {letter} "
                        "contains whitespace"
                    )
        allowed = set(_DEFAULT_LITE)
        for letter, (sub, _preserve) in self.lite_map.items():
            if letter not in allowed:
                raise TableFormatError(
                    f"table {self.name!r}: lite key {letter!r} outside {sorted(allowed)}"
                )
            if not sub or any(ch.isspace() for ch in sub):
                raise TableFormatError(
                    f"table {self.name!r}: bad lite substitute {sub!r} for {letter}"
                )

    @classmethod
    def from_file(cls, path: str | Path, name: str | None = None) -> "SubstitutionTable":
        """Load a table from a tab-separated text file.

        Format: one line per letter, ``LETTER<TAB>cand1<TAB>cand2...``;
        lines starting with ``#`` and blank lines are ignored.
        """
        entries: dict[str, list[str]] = {}
        text = Path(path).read_text(encoding="utf-8")
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            letter = fields[0].strip().upper()
            if len(letter) != 1 or letter not in _LETTERS:
                raise TableFormatError(
                    f"{path}: line {line_no}: expected a single letter A-Z, "
                    f"got {fields[0]!r}"
                )
            if letter in entries:
                raise TableFormatError(f"{path}: line {line_no}: duplicate letter {letter}")
            cands = [f for f in fields[1:] if f != ""]
            if not cands:
                raise TableFormatError(f"{path}: line {line_no}: no candidates for {letter}")
            entries[letter] = cands
        return cls(entries=entries, name=name or Path(path).stem)

    @classmethod
    def default(cls) -> "SubstitutionTable":
        """The packaged default table."""
        ref = resources.files("microtrans.data").joinpath("leet_table.txt")
        with resources.as_file(ref) as path:
            return cls.from_file(path, name="default")

    def reverse_candidates(self) -> dict[str, set[str]]:
        """Case-folded candidate -> set of source letters (a multimap).

        Includes the lite substitutes. Useful for brute-force
        de-substitution; ambiguity (one candidate reachable from several
        letters) is expected and preserved.
        """
        rev: dict[str, set[str]] = {}
        for letter, cands in self.entries.items():
            for c in cands:
                rev.setdefault(c.casefold(), set()).add(letter)
        for letter, (sub, _preserve) in self.lite_map.items():
            rev.setdefault(sub.casefold(), set()).add(letter)
        return rev


_default_table: SubstitutionTable | None = None


def default_table() -> SubstitutionTable:
    global _default_table
    if _default_table is None:
        _default_table = SubstitutionTable.default()
    return _default_table


def leet_encode(
    text: str,
    tier: LeetTier,
    table: SubstitutionTable | None = None,
    seed: int | None = None,
) -> str:
    """Obfuscate ``text`` at the given tier.

    The hard tier requires ``seed``; equal (text, seed) pairs always give
    equal output. Non-letters pass through unchanged.
    """
    table = table or default_table()
    if tier is LeetTier.HARD:
        if seed is None:
            raise ValueError("hard tier requires a seed")
        return _encode_hard(text, table, seed)
    if tier is LeetTier.LITE:
        return _encode_lite(text, table)
    return _encode_mid(text, table)


def _encode_lite(text: str, table: SubstitutionTable) -> str:
    out = []
    lite = table.lite_map
    for ch in text:
        rule = lite.get(ch.upper()) if ch.isascii() and ch.isalpha() else None
        if rule is None:
            out.append(ch)
        else:
            sub, preserve = rule
            out.append(sub.upper() if preserve and ch.isupper() else sub)
    return "".join(out)


def _encode_mid(text: str, table: SubstitutionTable) -> str:
    entries = table.entries
    out = []
    for ch in text:
        if ch.isascii() and ch.isalpha():
            out.append(entries[ch.upper()][0])
        else:
            out.append(ch)
    return "".join(out)


def _encode_hard(text: str, table: SubstitutionTable, seed: int) -> str:
    rng = SplitMix64(seed)
    entries = table.entries
    out = []
    for ch in text:
        if ch.isascii() and ch.isalpha():
            cands = entries[ch.upper()]
            out.append(cands[rng.randbelow(len(cands))])
        else:
            out.append(ch)
    return "".join(out)


def mirror_encode(text: str) -> str:
    """Reverse the whole phrase's character sequence (da Vinci style)."""
    return text[::-1]


GEN_MODES = ("mirror", "leet-lite", "leet-mid", "leet-hard")

_MODE_TIERS = {
    "leet-lite": LeetTier.LITE,
    "leet-mid": LeetTier.MID,
    "leet-hard": LeetTier.HARD,
}


def generate_pairs(
    sentences,
    mode: str,
    table: SubstitutionTable | None = None,
    variants_per_sentence: int = 1,
    seed: int = 0,
):
    """Build an (obfuscated, english) sentence-pair corpus.

    Every input sentence yields ``variants_per_sentence`` pairs with the
    obfuscated text as source and the original English as target. Multiple
    variants are only meaningful for the hard tier (the other modes are
    deterministic, so asking for more than one variant is an error).
    Each (sentence, variant) draws its randomness from a sub-seed derived
    from ``seed``, so output does not depend on how the work is chunked.
    """
    from .corpus import Corpus, SentencePair

    if mode not in GEN_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {GEN_MODES}")
    if variants_per_sentence < 1:
        raise ValueError("variants_per_sentence must be >= 1")
    if variants_per_sentence > 1 and mode != "leet-hard":
        raise ValueError("variants_per_sentence > 1 requires mode leet-hard")
    table = table or default_table()

    pairs = []
    for i, sentence in enumerate(sentences):
        if not sentence or sentence.isspace():
            raise ValueError(f"sentence {i} is empty")
        for v in range(variants_per_sentence):
            if mode == "mirror":
                src = mirror_encode(sentence)
            elif mode == "leet-hard":
                src = leet_encode(
                    sentence, LeetTier.HARD, table, seed=derive_seed(seed, i, v)
                )
            else:
                src = leet_encode(sentence, _MODE_TIERS[mode], table)
            pairs.append(SentencePair(source=src, target=sentence))
    return Corpus(pairs=pairs, source_lang=mode, target_lang="english")

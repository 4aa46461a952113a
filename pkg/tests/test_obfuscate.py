"""Leet tiers, mirror writing, and pair generation."""

import string

import pytest

from microtrans import (
    LeetTier,
    SubstitutionTable,
    generate_pairs,
    leet_encode,
    mirror_encode,
)
from microtrans.errors import TableFormatError
from microtrans.rng import SplitMix64

# Test vectors from the published substitution examples.
LITE_VECTORS = [
    ("It was a bomb", "17 waz a b0mb"),
    ("She just left", "Zh3 juz7 l3f7"),
    ("Shoot me", "Zh007 m3"),
]
MID_VECTORS = [
    ("It was a bomb", "3y37 vv45 4 80448"),
    ("Shoot me", "5aych007 443"),
]
MIRROR_VECTORS = [
    ("it was a bomb", "bmob a saw ti"),
    ("She just left", "tfel tsuj ehS"),
]


def can_desubstitute(encoded: str, plain: str, table: SubstitutionTable) -> bool:
    """Brute-force reverse-lookup oracle.

    True iff ``encoded`` can be segmented into per-letter candidates (or
    passed-through non-letters) spelling ``plain``, case-folded. Works
    directly off the table's reverse multimap; independent of the encoder.
    """
    rev = table.reverse_candidates()
    enc = encoded.casefold()
    target = plain.casefold()

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def match(ti: int, ei: int) -> bool:
        if ti == len(target):
            return ei == len(enc)
        ch = target[ti]
        if not ("a" <= ch <= "z"):
            return ei < len(enc) and enc[ei] == ch and match(ti + 1, ei + 1)
        for cand, letters in rev.items():
            if ch.upper() in letters and enc.startswith(cand, ei):
                if match(ti + 1, ei + len(cand)):
                    return True
        return False

    return match(0, 0)


class TestLeetGoldenVectors:
    @pytest.mark.parametrize("text,expected", LITE_VECTORS)
    def test_lite(self, text, expected):
        assert leet_encode(text, LeetTier.LITE) == expected

    @pytest.mark.parametrize("text,expected", MID_VECTORS)
    def test_mid(self, text, expected):
        assert leet_encode(text, LeetTier.MID) == expected

    def test_empty_input_all_tiers(self):
        assert leet_encode("", LeetTier.LITE) == ""
        assert leet_encode("", LeetTier.MID) == ""
        assert leet_encode("", LeetTier.HARD, seed=0) == ""


class TestMirror:
    @pytest.mark.parametrize("text,expected", MIRROR_VECTORS)
    def test_vectors(self, text, expected):
        assert mirror_encode(text) == expected

    def test_palindrome_fixed_point(self):
        assert mirror_encode("aba") == "aba"

    def test_involution(self):
        rng = SplitMix64(11)
        alphabet = string.ascii_letters + string.digits + " .,!?'éλ大"
        for _ in range(200):
            n = rng.randbelow(30)
            text = "".join(alphabet[rng.randbelow(len(alphabet))] for _ in range(n))
            assert mirror_encode(mirror_encode(text)) == text


class TestHardTier:
    def test_requires_seed(self):
        with pytest.raises(ValueError):
            leet_encode("Shoot me", LeetTier.HARD)

    def test_seed_determinism(self):
        for seed in (0, 1, 99, 2**63):
            a = leet_encode("Shoot me", LeetTier.HARD, seed=seed)
            b = leet_encode("Shoot me", LeetTier.HARD, seed=seed)
            assert a == b

    def test_desubstitution_oracle(self):
        table = SubstitutionTable.default()
        for seed in range(20):
            enc = leet_encode("Shoot me", LeetTier.HARD, table, seed=seed)
            assert enc != "Shoot me"
            assert can_desubstitute(enc, "shoot me", table)

    def test_variation_across_seeds(self):
        # >= 4 letters with >= 2 candidates each: expect distinct outputs.
        outputs = {leet_encode("Shoot me", LeetTier.HARD, seed=s) for s in range(100)}
        assert len(outputs) >= 2

    def test_oracle_rejects_wrong_plaintext(self):
        table = SubstitutionTable.default()
        enc = leet_encode("Shoot me", LeetTier.HARD, table, seed=3)
        assert not can_desubstitute(enc, "shoot him", table)


class TestTierProperties:
    def test_lite_mid_pure(self):
        for text in ("Mixed CASE text!", "", "123", "the quick brown fox"):
            assert leet_encode(text, LeetTier.LITE) == leet_encode(text, LeetTier.LITE)
            assert leet_encode(text, LeetTier.MID) == leet_encode(text, LeetTier.MID)

    def test_non_letters_pass_through(self):
        text = "12 34 -- ?? .. 大家"
        for tier in (LeetTier.LITE, LeetTier.MID):
            assert leet_encode(text, tier) == text
        assert leet_encode(text, LeetTier.HARD, seed=5) == text

    def test_lite_round_trip(self):
        # Inverse lite map recovers text that contains neither image
        # characters nor uppercase E/I/O/T (whose case the map destroys).
        inverse = {"z": "s", "Z": "S", "3": "e", "1": "i", "0": "o", "7": "t"}
        safe = "abcdfghjklmnpqrsuvwxy ABCDFGHJKLMNPQRSUVWXY.2468"
        rng = SplitMix64(23)
        for _ in range(300):
            n = rng.randbelow(40)
            text = "".join(safe[rng.randbelow(len(safe))] for _ in range(n))
            encoded = leet_encode(text, LeetTier.LITE)
            decoded = "".join(inverse.get(ch, ch) for ch in encoded)
            assert decoded == text

    def test_lite_preserves_whitespace_positions(self):
        rng = SplitMix64(29)
        pool = string.ascii_letters + "  \t,."
        for _ in range(200):
            n = rng.randbelow(40)
            text = "".join(pool[rng.randbelow(len(pool))] for _ in range(n))
            encoded = leet_encode(text, LeetTier.LITE)
            assert len(encoded) == len(text)
            ws = [i for i, ch in enumerate(text) if ch.isspace()]
            assert ws == [i for i, ch in enumerate(encoded) if ch.isspace()]


class TestTableValidation:
    def test_default_table_loads(self):
        table = SubstitutionTable.default()
        assert len(table.entries) == 26
        assert all(table.entries[ch] for ch in string.ascii_uppercase)

    def test_missing_letter_rejected(self):
        entries = {ch: ["x"] for ch in string.ascii_uppercase[:-1]}
        with pytest.raises(TableFormatError):
            SubstitutionTable(entries=entries)

    def test_empty_candidate_rejected(self):
        entries = {ch: ["x"] for ch in string.ascii_uppercase}
        entries["Q"] = ["q", ""]
        with pytest.raises(TableFormatError):
            SubstitutionTable(entries=entries)

    def test_whitespace_candidate_rejected(self):
        entries = {ch: ["x"] for ch in string.ascii_uppercase}
        entries["W"] = ["\\ \\ /"]
        with pytest.raises(TableFormatError):
            SubstitutionTable(entries=entries)

    def test_lite_key_outside_allowed_set_rejected(self):
        entries = {ch: ["x"] for ch in string.ascii_uppercase}
        with pytest.raises(TableFormatError):
            SubstitutionTable(entries=entries, lite_map={"Q": ("9", False)})

    def test_default_lite_substitutes_are_candidates(self):
        # Keeps the lite tier de-substitutable through the same multimap.
        table = SubstitutionTable.default()
        rev = table.reverse_candidates()
        for letter, (sub, _preserve) in table.lite_map.items():
            assert letter in rev[sub.casefold()]

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "table.txt"
        lines = ["# custom table"]
        for ch in string.ascii_uppercase:
            lines.append(f"{ch}\t{ch.lower()}{ch.lower()}\t9")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        table = SubstitutionTable.from_file(path)
        assert table.entries["A"] == ["aa", "9"]

    def test_bad_letter_line_rejected(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text("AB\t4\n", encoding="utf-8")
        with pytest.raises(TableFormatError):
            SubstitutionTable.from_file(path)


class TestGeneratePairs:
    def test_mirror_pairs(self):
        sentences = ["one two", "three four", "five six"]
        corpus = generate_pairs(sentences, "mirror")
        assert len(corpus.pairs) == 3
        for pair, sentence in zip(corpus.pairs, sentences):
            assert pair.target == sentence
            assert pair.source == mirror_encode(sentence)

    def test_pair_count_arithmetic(self):
        sentences = [f"sentence number {i}" for i in range(50)]
        corpus = generate_pairs(sentences, "leet-hard", variants_per_sentence=7, seed=1)
        assert len(corpus.pairs) == 50 * 7

    def test_variants_require_hard(self):
        with pytest.raises(ValueError):
            generate_pairs(["a b"], "leet-lite", variants_per_sentence=2, seed=0)
        with pytest.raises(ValueError):
            generate_pairs(["a b"], "mirror", variants_per_sentence=2, seed=0)

    def test_seed_determinism(self):
        sentences = [f"line {i} of text" for i in range(20)]
        a = generate_pairs(sentences, "leet-hard", variants_per_sentence=3, seed=42)
        b = generate_pairs(sentences, "leet-hard", variants_per_sentence=3, seed=42)
        assert a.pairs == b.pairs

    def test_hard_variants_differ_within_sentence(self):
        corpus = generate_pairs(["shoot the messenger"], "leet-hard",
                                variants_per_sentence=5, seed=0)
        sources = {p.source for p in corpus.pairs}
        assert len(sources) >= 2

    def test_empty_sentence_rejected(self):
        with pytest.raises(ValueError):
            generate_pairs(["fine", "  "], "mirror")

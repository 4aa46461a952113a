"""TSV ingestion, cleaning policies, splitting, vocab, and encoding."""

from pathlib import Path

import numpy as np
import pytest

from microtrans import (
    Corpus,
    SentencePair,
    Vocabulary,
    build_vocab,
    clean,
    encode,
    load_tsv,
    save_tsv,
    split,
)
from microtrans.corpus import PAD_ID, UNK_ID, decode, default_max_len
from microtrans.errors import CorpusFormatError
from microtrans.rng import SplitMix64

from corpora import TATOEBA_SAMPLE


def vocab_oracle(texts, max_size=None):
    """Independent ranking oracle: count by scanning, sort by (-freq, token)."""
    counts = {}
    for text in texts:
        for token in text.split():
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    if max_size is not None:
        ranked = ranked[: max_size - 2]
    return ["<pad>", "<unk>"] + ranked


class TestLoadTsv:
    def test_attribution_column(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("It was a bomb\tEra una bomba\tCC-BY\n", encoding="utf-8")
        corpus = load_tsv(path)
        pair = corpus.pairs[0]
        assert pair.source == "It was a bomb"
        assert pair.target == "Era una bomba"
        assert pair.attribution == "CC-BY"

    def test_column_swap_reverses_direction(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("left\tright\n", encoding="utf-8")
        corpus = load_tsv(path, source_col=1, target_col=0)
        assert corpus.pairs[0] == SentencePair("right", "left", None)

    def test_two_column_file_pair_count(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("".join(f"s{i}\tt{i}\n" for i in range(37)), encoding="utf-8")
        assert len(load_tsv(path).pairs) == 37

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="empty corpus"):
            load_tsv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_tsv(tmp_path / "nope.tsv")

    def test_strict_reports_line_number(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("a\tb\nmalformed line\nc\td\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_tsv(path)

    def test_lenient_skips(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("a\tb\nmalformed line\nc\td\n", encoding="utf-8")
        corpus = load_tsv(path, strict=False)
        assert [p.source for p in corpus.pairs] == ["a", "c"]

    def test_tatoeba_format_sample(self, tmp_path):
        path = tmp_path / "ita.tsv"
        path.write_text(TATOEBA_SAMPLE, encoding="utf-8")
        corpus = load_tsv(path)
        assert len(corpus.pairs) == 6
        assert all(p.attribution for p in corpus.pairs)
        assert corpus.pairs[3].target == "Se n'è appena andata"

    def test_save_load_round_trip_bytes(self, tmp_path):
        src = tmp_path / "in.tsv"
        dst = tmp_path / "out.tsv"
        src.write_text(TATOEBA_SAMPLE, encoding="utf-8")
        save_tsv(load_tsv(src), dst)
        assert dst.read_bytes() == src.read_bytes()


class TestClean:
    def test_natural_policy(self):
        corpus = Corpus([SentencePair("She just left.", "x")])
        assert clean(corpus, "natural").pairs[0].source == "she just left"

    def test_obfuscated_policy_preserves(self):
        corpus = Corpus([SentencePair("Zh3 juz7 l3f7", "x")])
        assert clean(corpus, "obfuscated").pairs[0].source == "Zh3 juz7 l3f7"

    def test_whitespace_normalization_both(self):
        corpus = Corpus([SentencePair("A  B", "A  B")])
        assert clean(corpus, "natural").pairs[0].source == "a b"
        assert clean(corpus, "obfuscated").pairs[0].source == "A B"

    def test_emptied_pairs_dropped(self):
        corpus = Corpus([SentencePair("...", "ok"), SentencePair("fine", "good")])
        cleaned = clean(corpus, "natural")
        assert len(cleaned.pairs) == 1
        assert cleaned.pairs[0].source == "fine"

    def test_symbols_stripped_only_by_natural(self):
        corpus = Corpus([SentencePair("(47 |*3y3", "x")])
        assert clean(corpus, "natural").pairs[0].source == "47 3y3"
        assert clean(corpus, "obfuscated").pairs[0].source == "(47 |*3y3"

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            clean(Corpus([SentencePair("a", "b")]), "aggressive")


class TestSplit:
    @staticmethod
    def _corpus(n):
        return Corpus([SentencePair(f"s{i}", f"t{i}") for i in range(n)])

    def test_sizes(self):
        train, held = split(self._corpus(10_000), 0.8, seed=3)
        assert (len(train.pairs), len(held.pairs)) == (8_000, 2_000)

    def test_same_seed_identical(self):
        a = split(self._corpus(100), 0.7, seed=5)
        b = split(self._corpus(100), 0.7, seed=5)
        assert a[0].pairs == b[0].pairs and a[1].pairs == b[1].pairs

    def test_union_and_disjointness(self):
        rng = SplitMix64(17)
        for _ in range(25):
            n = 2 + rng.randbelow(200)
            frac = (1 + rng.randbelow(8)) / 10
            corpus = self._corpus(n)
            try:
                train, held = split(corpus, frac, seed=rng.next_u64())
            except ValueError:
                assert int(frac * n) < 1 or n - int(frac * n) < 1
                continue
            left = {p.source for p in train.pairs}
            right = {p.source for p in held.pairs}
            assert left.isdisjoint(right)
            assert left | right == {p.source for p in corpus.pairs}

    def test_too_small(self):
        with pytest.raises(ValueError):
            split(self._corpus(1), 0.5, seed=0)
        with pytest.raises(ValueError):
            split(self._corpus(10), 0.01, seed=0)

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            split(self._corpus(10), 1.0, seed=0)


class TestVocabulary:
    def test_frequency_then_lexicographic(self):
        vocab = build_vocab(["a b", "b c"])
        expected = vocab_oracle(["a b", "b c"])
        assert vocab.id_to_token == expected
        assert expected == ["<pad>", "<unk>", "b", "a", "c"]

    def test_max_size_includes_reserved(self):
        vocab = build_vocab(["a b", "b c"], max_size=3)
        assert vocab.id_to_token == vocab_oracle(["a b", "b c"], max_size=3)
        assert len(vocab) == 3 and "b" in vocab

    def test_empty_input(self):
        vocab = build_vocab([])
        assert vocab.id_to_token == ["<pad>", "<unk>"]

    def test_oracle_on_random_corpora(self):
        rng = SplitMix64(31)
        words = ["w%d" % k for k in range(30)]
        for _ in range(20):
            texts = [
                " ".join(words[rng.randbelow(len(words))] for _ in range(1 + rng.randbelow(10)))
                for _ in range(rng.randbelow(40) + 1)
            ]
            assert build_vocab(texts).id_to_token == vocab_oracle(texts)

    def test_bijection(self):
        vocab = build_vocab(["x y z", "y z", "z"])
        for idx, token in enumerate(vocab.id_to_token):
            assert vocab.id_of(token) == idx
            assert vocab.token_of(idx) == token

    def test_reserved_ids(self):
        vocab = build_vocab(["hello world"])
        assert vocab.id_of("<pad>") == PAD_ID
        assert vocab.id_of("<unk>") == UNK_ID
        assert vocab.id_of("never-seen") == UNK_ID


class TestEncode:
    @pytest.fixture
    def vocab(self):
        return build_vocab(["a b", "b c"])  # b=2, a=3, c=4

    def test_example(self, vocab):
        batch = encode(["b a"], vocab, max_len=4)
        assert batch.ids.tolist() == [[2, 3, 0, 0]]
        assert batch.lengths.tolist() == [2]

    def test_empty_text(self, vocab):
        batch = encode([""], vocab, max_len=4)
        assert batch.ids.tolist() == [[0, 0, 0, 0]]

    def test_unknown_token(self, vocab):
        batch = encode(["zzz b"], vocab, max_len=4)
        assert batch.ids.tolist() == [[1, 2, 0, 0]]

    def test_truncation(self, vocab):
        batch = encode(["a b c a b c"], vocab, max_len=3)
        assert batch.ids.tolist() == [[3, 2, 4]]
        assert batch.lengths.tolist() == [3]

    def test_ids_below_vocab_size(self, vocab):
        batch = encode(["a b c zzz", ""], vocab, max_len=6)
        assert int(batch.ids.max()) < len(vocab)

    def test_decode_round_trip(self, vocab):
        rng = SplitMix64(41)
        tokens = ["a", "b", "c", "zzz"]
        for _ in range(100):
            text = " ".join(tokens[rng.randbelow(4)] for _ in range(rng.randbelow(6)))
            batch = encode([text], vocab, max_len=8)
            decoded = decode(batch.ids[0], vocab)
            expected = " ".join(t if t != "zzz" else "<unk>" for t in text.split())
            assert decoded == expected

    def test_default_max_len(self):
        assert default_max_len(["a b c", "a"]) == 3
        assert default_max_len(["x " * 100]) == 64
        assert default_max_len([]) == 1

"""microtrans: tiny offline translators for obfuscated and low-resource text.

Generate leet/mirror bilingual corpora, train a small LSTM encoder-decoder
from tab-separated sentence pairs, translate, and score with BLEU-1..4.
"""

__version__ = "0.1.0"

from .obfuscate import (
    GEN_MODES,
    LeetTier,
    SubstitutionTable,
    generate_pairs,
    leet_encode,
    mirror_encode,
)
from .corpus import (
    Corpus,
    EncodedBatch,
    SentencePair,
    Vocabulary,
    build_vocab,
    clean,
    encode,
    load_tsv,
    save_tsv,
    split,
)
from .evaluate import (
    BleuScore,
    EvalReport,
    Interpretation,
    corpus_bleu,
    evaluate_model,
    interpret,
    modified_precision,
    sentence_bleu,
)
from .seq2seq import (
    ModelConfig,
    Seq2SeqModel,
    TrainingConfig,
    forward,
    load,
    parameter_count,
    save,
    train,
    translate,
)

__all__ = [
    "GEN_MODES",
    "LeetTier",
    "SubstitutionTable",
    "generate_pairs",
    "leet_encode",
    "mirror_encode",
    "Corpus",
    "EncodedBatch",
    "SentencePair",
    "Vocabulary",
    "build_vocab",
    "clean",
    "encode",
    "load_tsv",
    "save_tsv",
    "split",
    "BleuScore",
    "EvalReport",
    "Interpretation",
    "corpus_bleu",
    "evaluate_model",
    "interpret",
    "modified_precision",
    "sentence_bleu",
    "ModelConfig",
    "Seq2SeqModel",
    "TrainingConfig",
    "forward",
    "load",
    "parameter_count",
    "save",
    "train",
    "translate",
    "__version__",
]

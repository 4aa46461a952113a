"""Calibration for the desk-scale acceptance runs (not part of the suite)."""
import sys, time
sys.path.insert(0, "tests")
from corpora import make_sentences, vocabulary_of
from microtrans import *
from microtrans import corpus as corpus_mod
from microtrans import seq2seq as s2s

MODE = sys.argv[1] if len(sys.argv) > 1 else "mirror"
EPOCHS = int(sys.argv[2]) if len(sys.argv) > 2 else 30

sentences = make_sentences(10_000, seed=101)
print("distinct sentences:", len(set(sentences)), "vocab:", len(vocabulary_of(sentences)))

t0 = time.time()
pairs = generate_pairs(sentences, MODE, seed=5)
cleaned = clean(pairs, "natural")
print(f"pairs: {len(cleaned.pairs)} (gen {time.time()-t0:.1f}s)")

train_c, test_c = split(cleaned, 0.8, seed=5)
print("split:", len(train_c.pairs), len(test_c.pairs))

train_src_tok = set()
train_tgt_tok = set()
for p in train_c.pairs:
    train_src_tok.update(p.source.split()); train_tgt_tok.update(p.target.split())
missing = [p for p in test_c.pairs
           if not set(p.source.split()) <= train_src_tok or not set(p.target.split()) <= train_tgt_tok]
print("test pairs with unseen tokens:", len(missing))

src_vocab = build_vocab(train_c.sources())
tgt_vocab = build_vocab(train_c.targets())
print("src vocab:", len(src_vocab), "tgt vocab:", len(tgt_vocab))
src_max = corpus_mod.default_max_len(train_c.sources())
tgt_max = corpus_mod.default_max_len(train_c.targets())
print("max lens:", src_max, tgt_max)

config = ModelConfig(256, 256, len(src_vocab), len(tgt_vocab), src_max, tgt_max)
model = Seq2SeqModel.init(config, src_vocab, tgt_vocab, seed=5, policy="natural")
print("params:", model.parameter_count())

src_b = corpus_mod.encode(train_c.sources(), src_vocab, src_max)
tgt_b = corpus_mod.encode(train_c.targets(), tgt_vocab, tgt_max)

probe = Corpus(test_c.pairs[:300])
for chunk in range(EPOCHS // 5):
    t0 = time.time()
    hist = train(model, src_b, tgt_b,
                 TrainingConfig(epochs=5, batch_size=64, learning_rate=1e-3,
                                seed=5 + chunk, validation_fraction=0.1))
    dt = time.time() - t0
    rep = evaluate_model(model, probe, language=MODE)
    print(f"epochs {(chunk+1)*5:3d}: train {hist[-1].train_loss:.4f} "
          f"val {hist[-1].val_loss:.4f} bleu1(300) {rep.bleu[0]:.4f} "
          f"[{dt/5:.1f}s/epoch]", flush=True)

rep = evaluate_model(model, test_c, language=MODE)
print("FULL 2000-pair eval:", [round(b, 4) for b in rep.bleu], rep.interpretation)

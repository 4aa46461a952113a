"""`mtm`: generate obfuscated corpora, train, translate, and score.

Subcommands:
    gen        build an (obfuscated, english) TSV corpus from a sentence list
    train      fit an LSTM translator on a TSV pair file
    translate  run a saved model over text or a file of lines
    eval       score a model against a TSV test set (BLEU-1..4 + label)
    replay     re-run the command recorded in an artifact's manifest

Exit codes: 0 success, 2 argument/usage errors, 3 I/O errors (missing or
malformed files), 4 numeric failure (training divergence).

Every artifact (corpus, model, report, translation file) gets an adjacent
``<artifact>.manifest.json`` recording the fully resolved flags, seed, and
tool version -- enough to reproduce the artifact bit for bit via `replay`.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from . import __version__
from . import corpus as corpus_mod
from . import evaluate as eval_mod
from . import seq2seq
from .errors import CorpusFormatError, ModelFormatError, TableFormatError, TrainingDiverged
from .obfuscate import GEN_MODES, SubstitutionTable, generate_pairs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _write_manifest(artifact: str, subcommand: str, resolved: dict, started: str) -> None:
    manifest = {
        "subcommand": subcommand,
        "flags": resolved,
        "artifact": str(artifact),
        "tool_version": __version__,
        "started": started,
        "finished": _utc_now(),
    }
    path = Path(str(artifact) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _load_table(path: str | None) -> SubstitutionTable:
    if path is None:
        return SubstitutionTable.default()
    return SubstitutionTable.from_file(path)


def cmd_gen(args: argparse.Namespace) -> int:
    started = _utc_now()
    table = _load_table(args.table)
    sentences = [
        line for line in Path(args.infile).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    pairs = generate_pairs(
        sentences,
        mode=args.mode,
        table=table,
        variants_per_sentence=args.variants,
        seed=args.seed,
    )
    corpus_mod.save_tsv(pairs, args.out)
    _write_manifest(
        args.out,
        "gen",
        {
            "mode": args.mode,
            "in": str(args.infile),
            "out": str(args.out),
            "table": args.table,
            "variants": args.variants,
            "seed": args.seed,
        },
        started,
    )
    print(f"wrote {len(pairs)} pairs to {args.out}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    started = _utc_now()
    raw = corpus_mod.load_tsv(args.pairs, source_col=args.src_col, target_col=args.tgt_col)
    cleaned = corpus_mod.clean(raw, args.policy)
    if not cleaned.pairs:
        raise CorpusFormatError(f"no usable pairs in {args.pairs} after cleaning")
    sources, targets = cleaned.sources(), cleaned.targets()
    src_vocab = corpus_mod.build_vocab(sources)
    tgt_vocab = corpus_mod.build_vocab(targets)
    src_max_len = corpus_mod.default_max_len(sources)
    tgt_max_len = corpus_mod.default_max_len(targets)

    config = seq2seq.ModelConfig(
        embed_dim=args.embed,
        hidden_size=args.hidden,
        src_vocab_size=len(src_vocab),
        tgt_vocab_size=len(tgt_vocab),
        src_max_len=src_max_len,
        tgt_max_len=tgt_max_len,
    )
    model = seq2seq.Seq2SeqModel.init(
        config, src_vocab, tgt_vocab, seed=args.seed, policy=args.policy
    )
    print(f"parameters: {model.parameter_count()}")

    train_cfg = seq2seq.TrainingConfig(
        epochs=args.epochs,
        batch_size=args.batch,
        learning_rate=args.lr,
        seed=args.seed,
        validation_fraction=args.val_fraction,
        checkpoint_path=None,
    )
    src_batch = corpus_mod.encode(sources, src_vocab, src_max_len)
    tgt_batch = corpus_mod.encode(targets, tgt_vocab, tgt_max_len)
    history = seq2seq.train(model, src_batch, tgt_batch, train_cfg)

    seq2seq.save(model, args.out)
    log_path = Path(str(args.out) + ".log.jsonl")
    log_path.write_text(
        "".join(stats.to_json() + "\n" for stats in history), encoding="utf-8"
    )
    _write_manifest(
        args.out,
        "train",
        {
            "pairs": str(args.pairs),
            "src_col": args.src_col,
            "tgt_col": args.tgt_col,
            "epochs": args.epochs,
            "batch": args.batch,
            "embed": args.embed,
            "hidden": args.hidden,
            "lr": args.lr,
            "val_fraction": args.val_fraction,
            "seed": args.seed,
            "out": str(args.out),
            "policy": args.policy,
        },
        started,
    )
    final = history[-1]
    val = "n/a" if final.val_loss is None else f"{final.val_loss:.4f}"
    print(f"final train loss {final.train_loss:.4f}, val loss {val}")
    return EXIT_OK


def cmd_translate(args: argparse.Namespace) -> int:
    started = _utc_now()
    model = seq2seq.load(args.model)
    if args.text is not None:
        lines = [args.text]
    else:
        lines = Path(args.infile).read_text(encoding="utf-8").splitlines()
    outputs = [seq2seq.translate(model, line) for line in lines]
    rendered = "".join(out + "\n" for out in outputs)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        _write_manifest(
            args.out,
            "translate",
            {
                "model": str(args.model),
                "text": args.text,
                "in": None if args.infile is None else str(args.infile),
                "out": str(args.out),
            },
            started,
        )
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    started = _utc_now()
    model = seq2seq.load(args.model)
    test = corpus_mod.load_tsv(args.pairs, source_col=args.src_col, target_col=args.tgt_col)
    report = eval_mod.evaluate_model(
        model, test, language=args.language, smoothing=args.smoothing
    )
    print(report.to_text())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
        _write_manifest(
            args.json,
            "eval",
            {
                "model": str(args.model),
                "pairs": str(args.pairs),
                "src_col": args.src_col,
                "tgt_col": args.tgt_col,
                "smoothing": args.smoothing,
                "language": args.language,
                "json": str(args.json),
            },
            started,
        )
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    sub = manifest["subcommand"]
    flags = manifest["flags"]
    argv = [sub]
    for key, value in flags.items():
        if value is None:
            continue
        argv.extend([f"--{key.replace('_', '-')}", str(value)])
    return main(argv)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtm", description="micro-translation toolkit"
    )
    parser.add_argument("--version", action="version", version=f"mtm {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen", help="generate an obfuscated-pair TSV corpus")
    p.add_argument("--mode", required=True, choices=GEN_MODES)
    p.add_argument("--in", dest="infile", required=True, help="sentence list, one per line")
    p.add_argument("--out", required=True, help="output TSV path")
    p.add_argument("--table", default=None, help="substitution table file (default: builtin)")
    p.add_argument("--variants", type=int, default=1, help="pairs per sentence (leet-hard only)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train a translator from a TSV pair file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--src-col", type=int, default=0)
    p.add_argument("--tgt-col", type=int, default=1)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--embed", type=int, default=256)
    p.add_argument("--hidden", type=int, default=256)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model output path (.mtm)")
    p.add_argument("--policy", choices=corpus_mod.POLICIES, default="natural")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("translate", help="translate text with a saved model")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", default=None)
    group.add_argument("--in", dest="infile", default=None, help="file of lines to translate")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("eval", help="score a model against a TSV test set")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--src-col", type=int, default=0)
    p.add_argument("--tgt-col", type=int, default=1)
    p.add_argument("--smoothing", choices=eval_mod.SMOOTHING_POLICIES, default="none")
    p.add_argument("--language", default="unlabeled")
    p.add_argument("--json", default=None, help="also write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"mtm: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorpusFormatError, ModelFormatError, TableFormatError) as exc:
        print(f"mtm: {exc}", file=sys.stderr)
        return EXIT_IO
    except TrainingDiverged as exc:
        print(f"mtm: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"mtm: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())

"""Command-line driver: ``ocdesc <subcommand> [options]``.

Exit codes: 0 success, 2 solver/configuration error, 3 input/output error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import read_feature_csv
from .errors import ConfigError, OcdescError
from .evaluation.methods import ALL_METHODS, MODES, FeatureSpace, HyperGrid, Params, fit_in_space, \
    parse_method
from .evaluation.metrics import compute_metrics
from .evaluation.report import display_table, read_benchmark, rows_from_results, write_benchmark
from .evaluation.search import grid_search_cv, run_benchmark
from .evaluation.splits import make_split_plans, stratified_split
from .serialization import dumps, save_pipeline
from .text.analytics import aggregate_sentiment, top_hashtags, top_keywords
from .text.corpus import CorpusError, filter_language, load_corpus
from .text.preprocess import TokenStream, preprocess
from .text.sentiment import load_lexicon, score_sentiment
from .text.vectorize import fit_vectorizer, vectorize_corpus

log = logging.getLogger("ocdesc")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


class IOFailure(Exception):
    """Reading or writing a file failed."""


# flags that a --config file may set, per subcommand
CONFIG_KEYS = {
    "sentiment": {"input", "format", "lexicon", "output_dir", "top_k"},
    "featurize": {"input", "format", "output_dir", "max_vocab"},
    "train": {"input", "format", "method", "target_class", "kernel", "grid", "seed", "output_dir",
              "C", "d", "beta", "sigma", "max_vocab", "ratio"},
    "benchmark": {"input", "format", "method", "target_class", "kernel", "grid", "repeats", "seed",
                  "output_dir", "max_vocab"},
    "split": {"input", "format", "target_class", "repeats", "seed", "output_dir", "ratio"},
    "report": {"input", "output_dir"},
}


def _write(path, text):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def _csv_text(rows):
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _records(args):
    try:
        records, rep = load_corpus(args.input, args.format)
    except (OSError, UnicodeDecodeError, CorpusError) as exc:
        raise IOFailure(str(exc)) from exc
    if rep.malformed:
        log.warning("%d of %d rows malformed and skipped", rep.malformed, rep.rows)
    return records


def _is_feature_file(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            header = next(csv.reader(fh), [])
    except (OSError, UnicodeDecodeError) as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    return "label" in header and "text" not in header


def _labeled_features(args):
    """``(X, is_target, meta)`` from a feature CSV or a labeled text corpus."""
    target = args.target_class
    if str(args.input).endswith(".csv") and args.format != "jsonl" and _is_feature_file(args.input):
        try:
            X, y, labels = read_feature_csv(args.input, target)
        except (OSError, ValueError) as exc:
            raise IOFailure(f"cannot parse feature file {args.input}: {exc}") from exc
        return X, y, {"source": "features", "n_features": int(X.shape[0])}
    records = [r for r in _records(args) if r.label is not None]
    if not records:
        raise IOFailure(f"{args.input}: no labeled records")
    streams = [preprocess(r.text) for r in records]
    model = fit_vectorizer(streams, args.max_vocab)
    X = vectorize_corpus(model, streams)
    y = np.array([r.label == target for r in records])
    return X, y, {"source": "corpus", "vocabulary": list(model.vocabulary)}


def _grid(args):
    if not args.grid:
        return HyperGrid()
    try:
        spec = json.loads(Path(args.grid).read_text(encoding="utf-8")) if Path(args.grid).is_file() \
            else json.loads(args.grid)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"cannot read grid {args.grid!r}: {exc}") from exc
    return HyperGrid.from_dict(spec)


def _modes(args):
    return MODES if args.kernel in (None, "both") else (args.kernel,)


def cmd_sentiment(args):
    lex = load_lexicon(args.lexicon)
    records, dropped = filter_language(_records(args))
    streams = [preprocess(r.text) for r in records]
    scores = [score_sentiment(r.text, lex) for r in records]
    out = Path(args.output_dir)
    rows = [["index", "country", "date", "compound", "klass"]]
    for i, (r, s) in enumerate(zip(records, scores)):
        rows.append([i, r.country or "", r.date or "", repr(s.compound), s.klass])
    _write(out / "scores.csv", _csv_text(rows))
    dist = {"records": len(records), "dropped_non_english": dropped,
            "global": aggregate_sentiment(scores),
            "countries": aggregate_sentiment(scores, [r.country for r in records])}
    _write(out / "distribution.json", json.dumps(dist, indent=1, sort_keys=True) + "\n")
    tag_streams = [TokenStream(s.tokens, tuple(r.tags())) for s, r in zip(streams, records)]
    _write(out / "keywords.csv", _csv_text([["term", "count"]] + top_keywords(streams, args.top_k)))
    _write(out / "hashtags.csv", _csv_text([["hashtag", "count"]] + top_hashtags(tag_streams, args.top_k)))
    print(f"scored {len(records)} records ({dropped} dropped) -> {out}")


def cmd_featurize(args):
    records = [r for r in _records(args)]
    streams = [preprocess(r.text) for r in records]
    model = fit_vectorizer(streams, args.max_vocab)
    X = vectorize_corpus(model, streams)
    out = Path(args.output_dir)
    rows = [["label"] + [f"f{j}" for j in range(X.shape[0])]]
    for i, r in enumerate(records):
        rows.append([r.label or ""] + [repr(float(v)) for v in X[:, i]])
    _write(out / "features.csv", _csv_text(rows))
    _write(out / "vectorizer.json", json.dumps(model.to_dict(), indent=1, sort_keys=True) + "\n")
    print(f"{len(records)} documents x {X.shape[0]} terms -> {out}")


def cmd_train(args):
    method = parse_method(args.method)
    mode = args.kernel if args.kernel in MODES else "linear"
    X, y, meta = _labeled_features(args)
    plan = stratified_split(y, args.ratio, args.seed)
    given = {"C": args.C, "d": args.d, "beta": args.beta, "sigma": args.sigma}
    need = ["C"] + (["d", "beta"] if method.is_subspace else []) + (["sigma"] if mode == "nonlinear" else [])
    if all(given[k] is not None for k in need):
        params = Params(C=args.C, d=args.d if method.is_subspace else None,
                        beta=args.beta if method.is_subspace else None,
                        sigma=args.sigma if mode == "nonlinear" else None)
        cv_gm = None
    else:
        tr = plan.train_idx
        res = grid_search_cv(X[:, tr], y[tr], method, _grid(args), mode, seed=args.seed)
        params, cv_gm = res.best, res.best_gm
    fit_idx = plan.train_idx[y[plan.train_idx]]
    space = FeatureSpace(X[:, fit_idx], mode, params.sigma, indices=fit_idx)
    fm = fit_in_space(method, params, space, args.seed)
    metrics = compute_metrics(fm.predict(space.view(X[:, plan.test_idx])), y[plan.test_idx])
    out = Path(args.output_dir)
    extra = {"seed": args.seed, "target_class": args.target_class, "split_seed": plan.seed}
    try:
        out.mkdir(parents=True, exist_ok=True)
        save_pipeline(out / "model.json", space, fm, extra)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    report = {"method": method.name, "mode": mode, "params": params.to_dict(), "cv_gm": cv_gm,
              "metrics": metrics.to_dict(), "n_train_target": int(fit_idx.size),
              "n_test": int(plan.test_idx.size)}
    _write(out / "metrics.json", dumps(_nan_to_none(report)))
    print(f"{method.name} ({mode}) {params.to_dict()}: test GM {metrics.gm:.4f} -> {out}")


def _nan_to_none(o):
    if isinstance(o, float) and o != o:
        return None
    if isinstance(o, dict):
        return {k: _nan_to_none(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_nan_to_none(v) for v in o]
    return o


def cmd_benchmark(args):
    methods = ALL_METHODS if not args.method else [parse_method(m).name for m in args.method.split(",")]
    X, y, meta = _labeled_features(args)
    grid = _grid(args)
    results, plans = run_benchmark(X, y, methods, _modes(args), grid, args.repeats, args.seed)
    rows = rows_from_results(results)
    meta = {"base_seed": args.seed, "repeats": args.repeats, "grid": grid.to_dict(),
            "target_class": args.target_class, "input": meta.get("source"),
            "split_seeds": [p.seed for p in plans]}
    try:
        paths = write_benchmark(rows, args.output_dir, _nan_to_none(meta))
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    sys.stdout.write(display_table(rows))
    failed = [r for r in rows if r.status != "ok"]
    print(f"{len(rows)} rows ({len(failed)} failed) -> {paths['csv']}")


def cmd_split(args):
    X, y, _ = _labeled_features(args)
    plans = make_split_plans(y, args.repeats, args.seed, args.ratio)
    doc = {"base_seed": args.seed, "ratio": args.ratio,
           "plans": [{"seed": p.seed, "train_idx": p.train_idx.tolist(), "test_idx": p.test_idx.tolist()}
                     for p in plans]}
    _write(Path(args.output_dir) / "splits.json", json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"{len(plans)} split plans -> {args.output_dir}")


def cmd_report(args):
    try:
        rows = read_benchmark(args.input)
    except (OSError, ValueError) as exc:
        raise IOFailure(f"cannot read {args.input}: {exc}") from exc
    table = display_table(rows)
    if args.output_dir:
        _write(Path(args.output_dir) / "report.txt", table)
    sys.stdout.write(table)


COMMANDS = {"sentiment": cmd_sentiment, "featurize": cmd_featurize, "train": cmd_train,
            "benchmark": cmd_benchmark, "split": cmd_split, "report": cmd_report}


def build_parser():
    p = argparse.ArgumentParser(prog="ocdesc", description="One-class description toolkit")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *extra):
        sp.add_argument("--input", required=False)
        sp.add_argument("--format", choices=["csv", "jsonl"])
        sp.add_argument("--output-dir", dest="output_dir", default="ocdesc_out")
        sp.add_argument("--config", help="JSON file with option values (flags win)")
        for name in extra:
            OPTIONS[name](sp)

    s = sub.add_parser("sentiment", help="score a corpus and emit analytics")
    common(s, "lexicon", "top_k")
    s = sub.add_parser("featurize", help="tf-idf features for a corpus")
    common(s, "max_vocab")
    s = sub.add_parser("train", help="fit one model on a stratified split")
    common(s, "method", "target_class", "kernel", "grid", "seed", "max_vocab", "ratio", "hyper")
    s = sub.add_parser("benchmark", help="all methods, CV grid search, repeated splits")
    common(s, "method_list", "target_class", "kernel_both", "grid", "repeats", "seed", "max_vocab")
    s = sub.add_parser("split", help="write the repeated split plans")
    common(s, "target_class", "repeats", "seed", "ratio", "max_vocab")
    s = sub.add_parser("report", help="print a benchmark CSV at display precision")
    common(s)
    s.set_defaults(output_dir=None)  # print only unless asked to write
    return p


OPTIONS = {
    "lexicon": lambda sp: sp.add_argument("--lexicon", help="lexicon file (default: shipped)"),
    "top_k": lambda sp: sp.add_argument("--top-k", dest="top_k", type=int, default=20),
    "max_vocab": lambda sp: sp.add_argument("--max-vocab", dest="max_vocab", type=int, default=200),
    "method": lambda sp: sp.add_argument("--method", default="SVDD"),
    "method_list": lambda sp: sp.add_argument("--method", help="comma-separated subset (default all 19)"),
    "target_class": lambda sp: sp.add_argument("--target-class", dest="target_class",
                                               choices=["positive", "negative"], default="positive"),
    "kernel": lambda sp: sp.add_argument("--kernel", choices=["linear", "nonlinear"], default="linear"),
    "kernel_both": lambda sp: sp.add_argument("--kernel", choices=["linear", "nonlinear", "both"],
                                              default="both"),
    "grid": lambda sp: sp.add_argument("--grid", help="grid JSON (inline or file path)"),
    "seed": lambda sp: sp.add_argument("--seed", type=int, default=0),
    "repeats": lambda sp: sp.add_argument("--repeats", type=int, default=5),
    "ratio": lambda sp: sp.add_argument("--ratio", type=float, default=0.7),
    "hyper": lambda sp: [sp.add_argument("--C", type=float), sp.add_argument("--d", type=int),
                         sp.add_argument("--beta", type=float), sp.add_argument("--sigma", type=float)],
}


def _apply_config(parser, args, argv):
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    allowed = CONFIG_KEYS[args.command]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {args.command}: {unknown}")
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for k, v in cfg.items():
        if k not in explicit:
            if k == "grid" and not isinstance(v, str):
                v = json.dumps(v)
            setattr(args, k, v)
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _apply_config(parser, args, argv)
        if not args.input:
            raise ConfigError("--input is required")
        COMMANDS[args.command](args)
    except IOFailure as exc:
        print(f"ocdesc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OcdescError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"ocdesc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

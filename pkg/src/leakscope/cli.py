"""Command-line interface.

Subcommands: ``leakage``, ``analyze``, ``sample``, ``surgery``, ``count`` and
``stats``.  Every report echoes its configuration, the seed and a fingerprint
of flags plus input digests.  Exit codes: 0 success, 1 usage, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .conllu import ConlluError, InvalidTreeError, Treebank, read_treebank, to_dep_tree, write_treebank
from .graphcore import DEFAULT_MODES, LabelMode
from .leakage import Level, multi_train_leakage
from .sampling import (
    InfeasibleSampleError,
    sample_diverse,
    sample_random,
    size_control,
    split_by_leakage,
    treebank_stats,
)
from .stats import ConstantInputError, ManifestError, RankDeficientError, analyze, read_manifest
from .surgery import SurgerySpec, count_constructions, remove_modifiers

EXIT_USAGE = 1
EXIT_DATA = 2

STRATEGIES = ("leaky", "nonleaky", "random", "diverse")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers -----------------------------------------------------------------

def _digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _config(args: argparse.Namespace, inputs: Sequence[str]) -> dict:
    flags = {
        k: (v.value if hasattr(v, "value") else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func", "format")
    }
    flags = json.loads(json.dumps(flags, default=str))
    digests = [{"path": str(p), "sha256": _digest(p)} for p in inputs]
    blob = json.dumps({"flags": flags, "inputs": [d["sha256"] for d in digests]}, sort_keys=True)
    return {
        "version": __version__,
        "flags": flags,
        "seed": getattr(args, "seed", 0),
        "inputs": digests,
        "fingerprint": hashlib.sha256(blob.encode()).hexdigest(),
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def _emit(command: str, config: dict, columns: Sequence[str], rows: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        doc = {"command": command, "config": config, "results": rows}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return
    out.write(f"# command={command}\n# seed={config['seed']}\n# fingerprint={config['fingerprint']}\n")
    out.write("\t".join(columns) + "\n")
    for r in rows:
        out.write("\t".join(_fmt(r[c]) for c in columns) + "\n")


def _load(path: str, strip: bool) -> Treebank:
    try:
        return read_treebank(path, strip_deprel_subtypes=strip)
    except ConlluError as e:
        raise DataError(str(e)) from None
    except OSError as e:
        raise DataError(f"{path}: {e.strerror}") from None


def _trees(tb: Treebank, path: str):
    trees = []
    for k, s in enumerate(tb, 1):
        try:
            trees.append(to_dep_tree(s))
        except InvalidTreeError as e:
            where = f"{path}:{s.lineno}" if s.lineno else f"{path}: sentence {k}"
            raise DataError(f"{where}: {'; '.join(e.report.problems)}") from None
    return trees


def _modes(value: str) -> list[LabelMode]:
    if value == "all":
        return list(DEFAULT_MODES)
    try:
        return [LabelMode.parse(v) for v in value.split(",")]
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- commands ----------------------------------------------------------------

LEAKAGE_COLUMNS = ("level", "mode", "weighting", "leaked_count", "total_count", "leaked_fraction", "empty")


def cmd_leakage(args) -> int:
    modes = _modes(args.mode)
    levels = [Level.TREE, Level.SUBTREE] if args.level == "both" else [Level(args.level)]
    train_sets = [_trees(_load(p, args.strip_deprel_subtypes), p) for p in args.train]
    test = _trees(_load(args.test, args.strip_deprel_subtypes), args.test)
    rows = []
    for level in levels:
        for mode in modes:
            rep = multi_train_leakage(train_sets, test, level, mode, args.weighting, args.subtree_style)
            rows.append(rep.as_dict())
    _emit("leakage", _config(args, [*args.train, args.test]), LEAKAGE_COLUMNS, rows, args.format)
    return 0


ANALYZE_COLUMNS = (
    "leakage_column", "n", "alpha", "beta", "gamma", "regression_score",
    "explained_variance_cv", "mae_cv", "spearman_rho", "k", "seed", "size_unit", "dropped_columns",
)


def cmd_analyze(args) -> int:
    try:
        manifest = read_manifest(args.manifest)
    except ManifestError as e:
        raise DataError(str(e)) from None
    except OSError as e:
        raise DataError(f"{args.manifest}: {e.strerror}") from None
    rows = []
    for column, entries in manifest.items():
        try:
            res = analyze(entries, k=args.k, seed=args.seed, standardize=args.standardize)
        except (RankDeficientError, ConstantInputError, ValueError) as e:
            raise DataError(f"{args.manifest} [{column}]: {e}") from None
        row = res.as_dict()
        row.update(leakage_column=column, size_unit=args.size_unit)
        rows.append(row)
    _emit("analyze", _config(args, [args.manifest]), ANALYZE_COLUMNS, rows, args.format)
    return 0


SAMPLE_COLUMNS = ("sample", "path", "sentence_count", "diversity", "avg_length", "avg_depth", "avg_dep_length")


def cmd_sample(args) -> int:
    mode = LabelMode.parse(args.mode)
    train = _load(args.train, args.strip_deprel_subtypes)
    test = _load(args.test, args.strip_deprel_subtypes)
    _trees(train, args.train)
    _trees(test, args.test)
    split = split_by_leakage(train, test, mode)
    strategies = list(STRATEGIES) if args.strategy == "all" else [args.strategy]

    n = None if args.n == "auto" else int(args.n)
    samples: dict[str, Treebank] = {}
    try:
        for name in strategies:
            if name == "leaky":
                pool = split.train_leaky
            elif name == "nonleaky":
                pool = split.train_nonleaky
            elif name == "random":
                pool = train
            else:
                pool = sample_diverse(train, None, mode, seed=args.seed)
            if n is not None:
                if n > len(pool):
                    raise InfeasibleSampleError(
                        f"{name}: requested {n} sentences, at most {len(pool)} available", len(pool))
                if name == "diverse":
                    pool = sample_diverse(train, n, mode, seed=args.seed)
                else:
                    pool = sample_random(pool, n, seed=args.seed, allow_empty=args.allow_empty)
            samples[name] = pool
        if n is None and len(samples) > 1:
            empty = [k for k, v in samples.items() if len(v) == 0]
            if empty:
                raise InfeasibleSampleError(f"empty sample(s) {', '.join(empty)}; cannot size-control", 0)
            controlled = size_control(list(samples.values()), seed=args.seed)
            samples = dict(zip(samples, controlled))
    except InfeasibleSampleError as e:
        raise DataError(f"{e} (feasible maximum: {e.feasible_max})") from None
    except ValueError as e:
        raise DataError(str(e)) from None

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_stem, test_stem = Path(args.train).stem, Path(args.test).stem
    written = {}
    for name, tb in samples.items():
        written[f"train.{name}"] = (tb, out_dir / f"{train_stem}.{name}.conllu")
    written["test.leaky"] = (split.test_leaky, out_dir / f"{test_stem}.test.leaky.conllu")
    written["test.nonleaky"] = (split.test_nonleaky, out_dir / f"{test_stem}.test.nonleaky.conllu")
    written["test.all"] = (test, None)

    rows = []
    for label, (tb, path) in written.items():
        if path is not None:
            write_treebank(tb, path)
        row = {"sample": label, "path": str(path) if path else ""}
        if len(tb):
            row.update(treebank_stats(tb, mode).as_dict())
        else:
            row.update(sentence_count=0, diversity=0.0, avg_length=0.0, avg_depth=0.0, avg_dep_length=0.0)
        row.pop("dep_length_undefined", None)
        rows.append(row)
    _emit("sample", _config(args, [args.train, args.test]), SAMPLE_COLUMNS, rows, args.format)
    return 0


def _spec(args) -> SurgerySpec:
    try:
        return SurgerySpec(args.target, args.modifier, args.match_prefix, args.obj_synonyms)
    except ValueError as e:
        raise UsageError(str(e)) from None


SURGERY_COLUMNS = (
    "input", "output", "removal_count", "removed_token_count",
    "dropped_sentence_count", "edited_sentence_count", "removed_deprels",
)


def cmd_surgery(args) -> int:
    spec = _spec(args)
    tb = _load(args.input, args.strip_deprel_subtypes)
    _trees(tb, args.input)
    edited, report = remove_modifiers(tb, spec)
    write_treebank(edited, args.output)
    row = {"input": args.input, "output": args.output, **report.as_dict()}
    if args.report:
        Path(args.report).write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    tsv_row = dict(row, removed_deprels=[f"{k}:{v}" for k, v in row["removed_deprels"].items()])
    _emit("surgery", _config(args, [args.input]), SURGERY_COLUMNS,
          [row if args.format == "json" else tsv_row], args.format)
    return 0


COUNT_COLUMNS = ("input", "target_rel", "modifier_rel", "count")


def cmd_count(args) -> int:
    spec = _spec(args)
    rows = []
    for path in args.input:
        tb = _load(path, args.strip_deprel_subtypes)
        rows.append({"input": path, "target_rel": spec.target_rel, "modifier_rel": spec.modifier_rel,
                     "count": count_constructions(tb, spec)})
    _emit("count", _config(args, args.input), COUNT_COLUMNS, rows, args.format)
    return 0


STATS_COLUMNS = ("input", "mode", "sentence_count", "diversity", "avg_length", "avg_depth", "avg_dep_length",
                 "dep_length_undefined")


def cmd_stats(args) -> int:
    mode = LabelMode.parse(args.mode)
    rows = []
    for path in args.input:
        tb = _load(path, args.strip_deprel_subtypes)
        _trees(tb, path)
        if len(tb) == 0:
            raise DataError(f"{path}: empty treebank")
        rows.append({"input": path, "mode": mode.value, **treebank_stats(tb, mode).as_dict()})
    _emit("stats", _config(args, args.input), STATS_COLUMNS, rows, args.format)
    return 0


# -- parser ------------------------------------------------------------------

def _mode_arg(value: str) -> str:
    LabelMode.parse(value)
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leakscope", description="Structural train/test leakage in dependency treebanks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--strip-deprel-subtypes", action="store_true",
                        help="truncate deprels at ':' when reading")

    s = sub.add_parser("leakage", parents=[common], help="tree or subtree leakage")
    s.add_argument("--train", nargs="+", required=True, help="one or more training files (concatenated)")
    s.add_argument("--test", required=True)
    s.add_argument("--mode", default="none", help="none, edges, nodes_edges, nodes, a comma list, or 'all'")
    s.add_argument("--level", choices=("tree", "subtree", "both"), default="tree")
    s.add_argument("--weighting", choices=("instance", "type"), default="instance")
    s.add_argument("--subtree-style", choices=("text", "figure"), default="text")
    s.set_defaults(func=cmd_leakage)

    s = sub.add_parser("analyze", parents=[common], help="regression and correlation over a manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("-k", "--k", type=int, default=5)
    s.add_argument("--standardize", action="store_true")
    s.add_argument("--size-unit", choices=("sentences", "tokens"), default="sentences")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sample", parents=[common], help="leaky / nonleaky / random / diverse samples")
    s.add_argument("--train", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--strategy", choices=(*STRATEGIES, "all"), default="all")
    s.add_argument("--n", default="auto", help="sample size or 'auto'")
    s.add_argument("--mode", type=_mode_arg, default="none")
    s.add_argument("--out-dir", default=".")
    s.add_argument("--allow-empty", action="store_true")
    s.set_defaults(func=cmd_sample)

    for name, helptext in (("surgery", "remove modifier subtrees"), ("count", "count constructions")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        if name == "surgery":
            s.add_argument("--input", required=True)
            s.add_argument("--output", required=True)
            s.add_argument("--report", help="write the surgery report as JSON")
            s.set_defaults(func=cmd_surgery)
        else:
            s.add_argument("--input", nargs="+", required=True)
            s.set_defaults(func=cmd_count)
        s.add_argument("--target", default="nsubj")
        s.add_argument("--modifier", default="amod")
        s.add_argument("--match-prefix", action="store_true")
        s.add_argument("--obj-synonyms", action="store_true", help="treat obj and dobj as one relation")

    s = sub.add_parser("stats", parents=[common], help="diversity, length, depth, dependency length")
    s.add_argument("--input", nargs="+", required=True)
    s.add_argument("--mode", type=_mode_arg, default="none")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", "auto") != "auto":
        try:
            if int(args.n) < 0:
                raise ValueError
        except ValueError:
            parser.error(f"--n must be a non-negative integer or 'auto', got {args.n!r}")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"leakscope: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"leakscope: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

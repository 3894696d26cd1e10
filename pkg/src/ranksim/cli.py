"""Command-line interface.

Subcommands: ``sim`` (score one pair), ``eval-sim`` (word-pair benchmark),
``eval-outlier`` (outlier-detection benchmark over a directory of topic
files), ``tune-p`` (apsynp exponent grid search), ``inspect-weights``
(per-rank weight curves of the two rank metrics), and ``convert``
(embedding format conversion).

Exit codes: 0 success, 1 usage error, 2 data error (parse failure,
out-of-vocabulary item, degenerate evaluation).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from ranksim import __version__, embeddings, outliers, simeval
from ranksim.errors import FormatError, RanksimError
from ranksim.metrics import MatrixScorer, MetricSpec

EMBEDDINGS_ENV = "RANKSIM_EMBEDDINGS"

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; usage errors must exit 1 here
    def error(self, message):
        raise _UsageError(message)


def _add_embedding_flags(sub):
    sub.add_argument("--embeddings", default=None, help=f"embeddings file (default ${EMBEDDINGS_ENV})")
    sub.add_argument(
        "--emb-format",
        choices=["w2v-text", "w2v-bin", "glove"],
        default="w2v-text",
        help="embeddings file format",
    )
    sub.add_argument("--lowercase-fallback", action="store_true", help="retry lookups lowercased")


def _add_metric_flags(sub):
    sub.add_argument(
        "--metric",
        choices=["cosine", "apsyn", "apsynp", "spearman"],
        default="apsynp",
        help="similarity metric (default apsynp)",
    )
    sub.add_argument("--p", type=float, default=None, help="apsynp power, in (0,1); default 0.1")
    sub.add_argument("--N", type=int, default=None, help="apsyn top-rank window; default all dims")


def _add_output_flags(sub):
    sub.add_argument("--format", choices=["tsv", "json"], default="tsv", help="output format")
    sub.add_argument("--out", default=None, help="write output to this path instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="ranksim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ranksim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p_sim = sub.add_parser("sim", help="score one word or phrase pair")
    p_sim.add_argument("word1")
    p_sim.add_argument("word2")
    _add_embedding_flags(p_sim)
    _add_metric_flags(p_sim)
    _add_output_flags(p_sim)
    p_sim.add_argument("--strict-oov", action="store_true", help="(always strict for sim)")

    p_es = sub.add_parser("eval-sim", help="evaluate on a gold word-pair dataset")
    p_es.add_argument("dataset", help="word1/word2/score file")
    p_es.add_argument(
        "--pairs-format", choices=["tab", "comma", "whitespace"], default="tab",
        help="dataset field separator",
    )
    _add_embedding_flags(p_es)
    _add_metric_flags(p_es)
    _add_output_flags(p_es)
    p_es.add_argument("--strict-oov", action="store_true", help="error out on any OOV pair")

    p_eo = sub.add_parser("eval-outlier", help="evaluate on a directory of topic files")
    p_eo.add_argument("dataset_dir", help="directory of topic files (8 cluster + 8 outlier lines)")
    p_eo.add_argument(
        "--approach", choices=["pairwise", "prototype"], default="pairwise",
        help="compactness computation (default pairwise)",
    )
    _add_embedding_flags(p_eo)
    _add_metric_flags(p_eo)
    _add_output_flags(p_eo)

    p_tp = sub.add_parser("tune-p", help="grid-search the apsynp power on a dev dataset")
    p_tp.add_argument("dataset", help="word1/word2/score development file")
    p_tp.add_argument(
        "--pairs-format", choices=["tab", "comma", "whitespace"], default="tab",
        help="dataset field separator",
    )
    p_tp.add_argument("--grid", default=None, help="comma-separated p values, e.g. '0.05,0.1,0.2'")
    _add_embedding_flags(p_tp)
    _add_output_flags(p_tp)
    p_tp.add_argument("--strict-oov", action="store_true", help="error out on any OOV pair")

    p_iw = sub.add_parser("inspect-weights", help="emit per-rank weight curves")
    p_iw.add_argument("--dims", type=int, default=300, help="number of ranks to emit")
    p_iw.add_argument("--p", type=float, default=0.1, help="power for the smoothed curve")
    p_iw.add_argument("--N", type=int, default=None, help="top-rank window for the 1/r curve")
    _add_output_flags(p_iw)

    p_cv = sub.add_parser("convert", help="convert an embeddings file between formats")
    _add_embedding_flags(p_cv)
    p_cv.add_argument(
        "--to-format", choices=["w2v-text", "w2v-bin", "glove"], required=True,
        help="output format",
    )
    p_cv.add_argument("--out", required=True, help="output path")

    return parser


def _metric_spec(args) -> MetricSpec:
    if args.p is not None and args.metric != "apsynp":
        raise _UsageError("--p is only valid with --metric apsynp")
    if args.N is not None and args.metric != "apsyn":
        raise _UsageError("--N is only valid with --metric apsyn")
    try:
        if args.metric == "apsynp":
            return MetricSpec("apsynp", p=args.p)
        if args.metric == "apsyn":
            return MetricSpec("apsyn", n_top=args.N)
        return MetricSpec(args.metric)
    except ValueError as e:
        raise _UsageError(str(e)) from None


def _load_matrix(args) -> embeddings.EmbeddingMatrix:
    path = args.embeddings or os.environ.get(EMBEDDINGS_ENV)
    if not path:
        raise _UsageError(f"no embeddings given: pass --embeddings or set ${EMBEDDINGS_ENV}")
    return embeddings.load_embeddings(path, args.emb_format)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def inspect_weights(dims: int, p: float, n_top: Optional[int] = None) -> list[tuple[int, float, float]]:
    """Per-rank weights of the two rank metrics: (rank, 1/r within the
    top-N window, 1/r^p)."""
    if dims < 1:
        raise ValueError("dims must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if n_top is None:
        n_top = dims
    if not 1 <= n_top <= dims:
        raise ValueError(f"N must lie in [1, {dims}]")
    rows = []
    for r in range(1, dims + 1):
        inverse = 1.0 / r if r <= n_top else 0.0
        rows.append((r, inverse, 1.0 / r**p))
    return rows


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_sim(args) -> int:
    spec = _metric_spec(args)
    matrix = _load_matrix(args)
    scorer = MatrixScorer(matrix, spec)
    refs = []
    for word in (args.word1, args.word2):
        row = embeddings.resolve_phrase_row(matrix, word, lowercase=args.lowercase_fallback)
        if row is not None:
            refs.append(row)
        else:
            refs.append(
                embeddings.resolve_phrase(matrix, word, lowercase=args.lowercase_fallback)
            )
    score = scorer.score(*refs)
    if args.format == "json":
        payload = {
            "word1": args.word1,
            "word2": args.word2,
            "metric": spec.describe(),
            "score": score,
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        _emit(f"{score:.6f}\n", args.out)
    return _EXIT_OK


def _cmd_eval_sim(args) -> int:
    spec = _metric_spec(args)
    matrix = _load_matrix(args)
    dataset = simeval.parse_pair_dataset(args.dataset, fmt=args.pairs_format)
    report = simeval.evaluate_similarity(
        dataset,
        matrix,
        spec,
        lowercase=args.lowercase_fallback,
        strict=args.strict_oov,
    )
    _emit(report.to_json() if args.format == "json" else report.to_tsv(), args.out)
    return _EXIT_OK


def _topic_files(directory: str) -> list[str]:
    try:
        names = sorted(
            n for n in os.listdir(directory) if not n.startswith(".")
        )
    except OSError as e:
        raise FormatError(str(e)) from None
    paths = [os.path.join(directory, n) for n in names]
    paths = [p for p in paths if os.path.isfile(p)]
    if not paths:
        raise FormatError(f"no topic files found in {directory!r}")
    return paths


def _cmd_eval_outlier(args) -> int:
    spec = _metric_spec(args)
    matrix = _load_matrix(args)
    topics = outliers.parse_888(_topic_files(args.dataset_dir))
    cases = outliers.expand_cases(topics)
    report = outliers.evaluate_outliers(
        cases,
        matrix,
        spec,
        approach=args.approach,
        lowercase=args.lowercase_fallback,
    )
    _emit(report.to_json() if args.format == "json" else report.to_tsv(), args.out)
    return _EXIT_OK


def _cmd_tune_p(args) -> int:
    matrix = _load_matrix(args)
    dataset = simeval.parse_pair_dataset(args.dataset, fmt=args.pairs_format)
    grid = None
    if args.grid is not None:
        try:
            grid = [float(v) for v in args.grid.split(",") if v.strip()]
        except ValueError:
            raise _UsageError(f"--grid must be comma-separated floats, got {args.grid!r}") from None
        if not grid or any(not 0.0 < p < 1.0 for p in grid):
            raise _UsageError("--grid values must lie strictly between 0 and 1")
    result = simeval.tune_power(
        dataset,
        matrix,
        grid=grid,
        lowercase=args.lowercase_fallback,
        strict=args.strict_oov,
    )
    if args.format == "json":
        payload = {
            "dataset": dataset.name,
            "p_best": result.p_best,
            "rho_best": result.rho_best,
            "table": [[p, rho] for p, rho in result.table],
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = ["p\trho\tbest"]
        for p, rho in result.table:
            marker = "*" if p == result.p_best else ""
            lines.append(f"{p:.6f}\t{rho:.6f}\t{marker}")
        _emit("\n".join(lines) + "\n", args.out)
    return _EXIT_OK


def _cmd_inspect_weights(args) -> int:
    try:
        rows = inspect_weights(args.dims, args.p, args.N)
    except ValueError as e:
        raise _UsageError(str(e)) from None
    if args.format == "json":
        payload = {
            "dims": args.dims,
            "p": args.p,
            "n_top": args.N if args.N is not None else args.dims,
            "rows": [[r, w1, w2] for r, w1, w2 in rows],
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = ["rank\tapsyn_weight\tapsynp_weight"]
        for r, w1, w2 in rows:
            lines.append(f"{r}\t{w1:.6f}\t{w2:.6f}")
        _emit("\n".join(lines) + "\n", args.out)
    return _EXIT_OK


def _cmd_convert(args) -> int:
    matrix = _load_matrix(args)
    embeddings.save_embeddings(matrix, args.out, args.to_format)
    return _EXIT_OK


_COMMANDS = {
    "sim": _cmd_sim,
    "eval-sim": _cmd_eval_sim,
    "eval-outlier": _cmd_eval_outlier,
    "tune-p": _cmd_tune_p,
    "inspect-weights": _cmd_inspect_weights,
    "convert": _cmd_convert,
}


def run(argv: Optional[list[str]] = None) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return _EXIT_USAGE
    except RanksimError as e:
        sys.stderr.write(f"error: {e}\n")
        return _EXIT_DATA
    except (ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return _EXIT_DATA


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

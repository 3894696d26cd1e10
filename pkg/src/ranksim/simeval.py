"""Word-pair similarity evaluation.

Scores every pair of a gold-rated dataset under a metric and reports the
Spearman correlation between system scores and the human judgments.
Includes the power-tuning grid search for the apsynp exponent and the
r-to-z significance test for comparing two correlations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ranksim import kernels
from ranksim.embeddings import (
    DEFAULT_POLICY,
    EmbeddingMatrix,
    PhrasePolicy,
    resolve_phrase,
    resolve_phrase_row,
)
from ranksim.errors import EvaluationError, FormatError, OOVError
from ranksim.metrics import MatrixScorer, MetricSpec


class WordPair(NamedTuple):
    word1: str
    word2: str
    gold: float


@dataclass
class WordPairDataset:
    name: str
    pairs: list[WordPair]


@dataclass
class SimilarityReport:
    """Spearman correlation of system scores against gold ratings."""

    dataset: str
    metric: str
    rho: float
    n_used: int
    n_skipped_oov: int
    skipped: list[WordPair] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "metric": self.metric,
            "rho": self.rho,
            "n_used": self.n_used,
            "n_skipped_oov": self.n_skipped_oov,
            "skipped": [list(p) for p in self.skipped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_tsv(self) -> str:
        header = "dataset\tmetric\trho\tn_used\tn_skipped_oov"
        row = (
            f"{self.dataset}\t{self.metric}\t{self.rho:.6f}"
            f"\t{self.n_used}\t{self.n_skipped_oov}"
        )
        return header + "\n" + row + "\n"


_DELIMITERS = {"tab": "\t", "comma": ",", "whitespace": None}


def parse_pair_dataset(source, fmt: str = "tab", name: Optional[str] = None) -> WordPairDataset:
    """Parse a word1/word2/score dataset from a path or binary stream.

    A single leading header line is skipped automatically when its third
    field is non-numeric.  Each data line must carry exactly three fields.
    """
    if fmt not in _DELIMITERS:
        raise ValueError(f"unknown dataset format {fmt!r}; expected one of {sorted(_DELIMITERS)}")
    delim = _DELIMITERS[fmt]
    if hasattr(source, "read"):
        raw = source.read()
        src_name = name or "dataset"
    else:
        with open(source, "rb") as fh:
            raw = fh.read()
        src_name = name or _stem(str(source))
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"{src_name}: invalid UTF-8 ({e})") from None

    pairs: list[WordPair] = []
    first_data_line = True
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(delim)]
        if len(fields) != 3 or any(f == "" for f in fields):
            raise FormatError(
                f"{src_name}: malformed line {lineno}: expected 'word1 word2 score'"
            )
        try:
            gold = float(fields[2])
        except ValueError:
            if first_data_line:
                first_data_line = False
                continue  # header line
            raise FormatError(
                f"{src_name}: malformed line {lineno}: non-numeric score {fields[2]!r}"
            ) from None
        if not math.isfinite(gold):
            raise FormatError(f"{src_name}: malformed line {lineno}: non-finite score")
        first_data_line = False
        pairs.append(WordPair(fields[0], fields[1], gold))
    if not pairs:
        raise FormatError(f"{src_name}: dataset contains no pairs")
    return WordPairDataset(src_name, pairs)


def _stem(path: str) -> str:
    base = path.replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def spearman_correlation(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson correlation of the tie-averaged ranks of ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise ValueError("spearman_correlation requires two equal-length 1-D lists")
    if a.shape[0] < 2:
        raise ValueError("spearman_correlation requires at least 2 observations")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("spearman_correlation requires finite values")
    return kernels.pearson(kernels.rank_profile(a), kernels.rank_profile(b))


def evaluate_similarity(
    dataset: WordPairDataset,
    matrix: EmbeddingMatrix,
    spec: MetricSpec,
    policy: PhrasePolicy = DEFAULT_POLICY,
    lowercase: bool = False,
    strict: bool = False,
    _profile_cache: Optional[dict] = None,
) -> SimilarityReport:
    """Score every resolvable pair and correlate with the gold ratings.

    Pairs with an unresolvable word are skipped and reported, unless
    ``strict`` is set, in which case the first one raises :class:`OOVError`.
    """
    if not dataset.pairs:
        raise EvaluationError(f"{dataset.name}: dataset contains no pairs")
    scorer = MatrixScorer(matrix, spec, profile_cache=_profile_cache)

    def ref_of(phrase: str):
        row = resolve_phrase_row(matrix, phrase, policy, lowercase=lowercase)
        if row is not None:
            return row
        return resolve_phrase(matrix, phrase, policy, lowercase=lowercase)

    system: list[float] = []
    gold: list[float] = []
    skipped: list[WordPair] = []
    for pair in dataset.pairs:
        try:
            ra = ref_of(pair.word1)
            rb = ref_of(pair.word2)
        except OOVError as e:
            if strict:
                raise OOVError(
                    f"{dataset.name}: pair ({pair.word1!r}, {pair.word2!r}): {e}"
                ) from None
            skipped.append(pair)
            continue
        system.append(scorer.score(ra, rb))
        gold.append(pair.gold)
    if len(system) < 2:
        raise EvaluationError(
            f"{dataset.name}: only {len(system)} usable pair(s); need at least 2"
        )
    rho = spearman_correlation(system, gold)
    return SimilarityReport(
        dataset=dataset.name,
        metric=spec.describe(),
        rho=rho,
        n_used=len(system),
        n_skipped_oov=len(skipped),
        skipped=skipped,
    )


def fisher_r_to_z(r1: float, n1: int, r2: float, n2: int) -> tuple[float, float]:
    """z statistic and two-tailed p for the difference of two correlations.

    Uses the r-to-z transformation for independent samples:
    z = (atanh(r1) - atanh(r2)) / sqrt(1/(n1-3) + 1/(n2-3)).
    """
    if not (abs(r1) < 1.0 and abs(r2) < 1.0):
        raise ValueError("correlations must satisfy |r| < 1")
    if n1 <= 3 or n2 <= 3:
        raise ValueError("sample sizes must exceed 3")
    z = (math.atanh(r1) - math.atanh(r2)) / math.sqrt(1.0 / (n1 - 3) + 1.0 / (n2 - 3))
    p = math.erfc(abs(z) / math.sqrt(2.0))  # two-tailed standard-normal tail
    return z, p


class TuneResult(NamedTuple):
    p_best: float
    rho_best: float
    table: list[tuple[float, float]]


_COARSE_GRID = [round(0.05 * i, 2) for i in range(1, 20)]


def tune_power(
    dev: WordPairDataset,
    matrix: EmbeddingMatrix,
    grid: Optional[Sequence[float]] = None,
    policy: PhrasePolicy = DEFAULT_POLICY,
    lowercase: bool = False,
    strict: bool = False,
) -> TuneResult:
    """Grid-search the apsynp exponent on a development dataset.

    With ``grid=None`` a coarse pass at step 0.05 is refined once at step
    0.01 around the coarse optimum.  Ties break toward the smallest p.
    """
    profile_cache: dict = {}

    def rho_at(p: float) -> float:
        report = evaluate_similarity(
            dev,
            matrix,
            MetricSpec("apsynp", p=p),
            policy,
            lowercase=lowercase,
            strict=strict,
            _profile_cache=profile_cache,
        )
        return report.rho

    if grid is not None:
        values = sorted(set(float(p) for p in grid))
        if not values:
            raise ValueError("grid must be non-empty")
        if any(not 0.0 < p < 1.0 for p in values):
            raise ValueError("grid values must lie strictly between 0 and 1")
        table = [(p, rho_at(p)) for p in values]
    else:
        evaluated = {p: rho_at(p) for p in _COARSE_GRID}
        coarse_best = _argmax_smallest(evaluated)
        lo = max(1, round(coarse_best * 100) - 4)
        hi = min(99, round(coarse_best * 100) + 4)
        for cents in range(lo, hi + 1):
            p = cents / 100.0
            if p not in evaluated:
                evaluated[p] = rho_at(p)
        table = sorted(evaluated.items())
    by_p = dict(table)
    best_p = _argmax_smallest(by_p)
    return TuneResult(best_p, by_p[best_p], table)


def _argmax_smallest(table: dict) -> float:
    """Key with the largest value; ties go to the smallest key."""
    best_p, best_rho = None, -math.inf
    for p in sorted(table):
        if table[p] > best_rho:
            best_p, best_rho = p, table[p]
    return best_p

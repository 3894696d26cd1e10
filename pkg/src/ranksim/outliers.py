"""The 8-8-8 outlier-detection task.

Each topic file lists a cluster of 8 phrases, a blank separator line, and
8 outliers of graded difficulty (positions 1-2 map to class C1, 3-4 to C2,
5-6 to C3, 7-8 to C4; a tab-separated class annotation on an outlier line
overrides the positional rule).  Every (topic, outlier) pair becomes one
evaluation case: the outlier is planted among the cluster words, a
compactness score is computed for all nine, and the outlier should come
out least compact.

Two compactness computations are provided: *pairwise* (average similarity
of a word to every other word of the set) and *prototype* (similarity of a
word to the mean vector of the other words).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ranksim.embeddings import (
    DEFAULT_POLICY,
    EmbeddingMatrix,
    PhrasePolicy,
    mean_vector,
    resolve_phrase,
    resolve_phrase_row,
)
from ranksim.errors import EvaluationError, FormatError, OOVError
from ranksim.metrics import MatrixScorer, MetricSpec

DIFFICULTY_CLASSES = ("C1", "C2", "C3", "C4")

CLUSTER_SIZE = 8
OUTLIERS_PER_TOPIC = 8


@dataclass
class OutlierTopic:
    name: str
    cluster: list[str]
    outliers: list[str]
    outlier_class: dict[str, str]


@dataclass
class OutlierCase:
    """One evaluation set: n cluster phrases plus one planted outlier."""

    topic: str
    words: list[str]
    outlier: str
    outlier_class: str

    def __post_init__(self):
        if len(self.words) < 2:
            raise ValueError("a case needs at least 2 cluster words")
        if self.outlier in self.words:
            raise ValueError(f"outlier {self.outlier!r} also appears in the cluster")

    @property
    def n(self) -> int:
        return len(self.words)


@dataclass
class CaseResult:
    case: OutlierCase
    compactness: dict[str, float]
    op: int
    od: int


@dataclass
class OutlierReport:
    """Aggregated outlier-detection results over a case set."""

    approach: str
    metric: str
    opp: float
    accuracy: float
    per_case: list[CaseResult]
    missed: list[tuple[str, str, str, int]] = field(default_factory=list)

    @property
    def n_cases(self) -> int:
        return len(self.per_case)

    def to_dict(self) -> dict:
        return {
            "approach": self.approach,
            "metric": self.metric,
            "opp": self.opp,
            "accuracy": self.accuracy,
            "n_cases": self.n_cases,
            "per_case": [
                {
                    "topic": r.case.topic,
                    "outlier": r.case.outlier,
                    "outlier_class": r.case.outlier_class,
                    "op": r.op,
                    "od": r.od,
                    "compactness": {w: r.compactness[w] for w in (*r.case.words, r.case.outlier)},
                }
                for r in self.per_case
            ],
            "missed": [list(m) for m in self.missed],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_tsv(self) -> str:
        header = "approach\tmetric\topp\taccuracy"
        row = f"{self.approach}\t{self.metric}\t{self.opp:.6f}\t{self.accuracy:.6f}"
        return header + "\n" + row + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

Source = Union[str, tuple[str, str]]


def parse_888(sources: Sequence[Source]) -> list[OutlierTopic]:
    """Parse topic files into :class:`OutlierTopic` records.

    ``sources`` is a list of file paths or (name, text) tuples.  Each
    source must contain 8 non-empty cluster lines, one blank separator,
    and 8 non-empty outlier lines; spaces inside a line belong to the
    phrase.
    """
    topics = []
    for source in sources:
        if isinstance(source, tuple):
            name, text = source
        else:
            name = _stem(str(source))
            with open(source, "rb") as fh:
                try:
                    text = fh.read().decode("utf-8")
                except UnicodeDecodeError as e:
                    raise FormatError(f"{source}: invalid UTF-8 ({e})") from None
        topics.append(_parse_topic(name, text))
    return topics


def _stem(path: str) -> str:
    base = path.replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def _parse_topic(name: str, text: str) -> OutlierTopic:
    sections: list[list[str]] = [[]]
    for line in text.splitlines():
        line = line.rstrip()
        if not line.strip():
            if sections[-1]:
                sections.append([])
            continue
        sections[-1].append(line)
    if sections and not sections[-1]:
        sections.pop()
    if len(sections) != 2:
        raise FormatError(
            f"{name}: expected two sections separated by one blank line, found {len(sections)}"
        )
    cluster_lines, outlier_lines = sections
    if len(cluster_lines) != CLUSTER_SIZE:
        raise FormatError(
            f"{name}: expected {CLUSTER_SIZE} cluster lines, found {len(cluster_lines)}"
        )
    if len(outlier_lines) != OUTLIERS_PER_TOPIC:
        raise FormatError(
            f"{name}: expected {OUTLIERS_PER_TOPIC} outlier lines, found {len(outlier_lines)}"
        )

    cluster = []
    for line in cluster_lines:
        if "\t" in line:
            raise FormatError(f"{name}: unexpected tab in cluster line {line!r}")
        cluster.append(" ".join(line.split()))

    outliers = []
    classes = {}
    for pos, line in enumerate(outlier_lines):
        cls = DIFFICULTY_CLASSES[pos // 2]
        if "\t" in line:
            phrase, _, annotation = line.partition("\t")
            annotation = annotation.strip()
            if annotation not in DIFFICULTY_CLASSES:
                raise FormatError(
                    f"{name}: invalid class annotation {annotation!r} on outlier {phrase!r}"
                )
            cls = annotation
        else:
            phrase = line
        phrase = " ".join(phrase.split())
        outliers.append(phrase)
        classes[phrase] = cls

    seen = set()
    for phrase in (*cluster, *outliers):
        if phrase in seen:
            raise FormatError(f"{name}: duplicate phrase {phrase!r}")
        seen.add(phrase)
    return OutlierTopic(name, cluster, outliers, classes)


def expand_cases(topics: Sequence[OutlierTopic]) -> list[OutlierCase]:
    """One case per (topic, outlier) pair, in file and position order."""
    cases = []
    for topic in topics:
        for outlier in topic.outliers:
            cases.append(
                OutlierCase(
                    topic=topic.name,
                    words=list(topic.cluster),
                    outlier=outlier,
                    outlier_class=topic.outlier_class[outlier],
                )
            )
    return cases


# ---------------------------------------------------------------------------
# Compactness and scoring
# ---------------------------------------------------------------------------


def _compactness_pairwise(scorer: MatrixScorer, refs: list) -> list[float]:
    m = len(refs)
    n = m - 1
    sims = np.zeros((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            s = scorer.score(refs[i], refs[j])
            sims[i, j] = s
            sims[j, i] = s
    scores = []
    for i in range(m):
        acc = 0.0
        for j in range(m):
            if j != i:
                acc += float(sims[i, j])
        scores.append(acc / n)
    return scores


def _compactness_prototype(scorer: MatrixScorer, refs: list) -> list[float]:
    vectors = [scorer.vector_of(r) for r in refs]
    scores = []
    for i in range(len(refs)):
        proto = mean_vector([v for j, v in enumerate(vectors) if j != i])
        # the prototype is a fresh vector: its profile is never cached
        scores.append(scorer.score(refs[i], proto))
    return scores


def compactness_pairwise(vectors: Sequence, spec: MetricSpec) -> list[float]:
    """Average similarity of each vector to the other vectors of the set."""
    scorer, refs = _adhoc_scorer(vectors, spec)
    return _compactness_pairwise(scorer, refs)


def compactness_prototype(vectors: Sequence, spec: MetricSpec) -> list[float]:
    """Similarity of each vector to the mean of the other vectors."""
    scorer, refs = _adhoc_scorer(vectors, spec)
    return _compactness_prototype(scorer, refs)


def _adhoc_scorer(vectors, spec):
    if len(vectors) < 3:
        raise ValueError("compactness requires at least 3 vectors")
    scorer = MatrixScorer(None, spec)
    refs = [scorer.register(v) for v in vectors]
    return scorer, refs


def outlier_position(scores: Sequence[float], outlier_index: int) -> int:
    """Number of set members scoring strictly above the outlier.

    The ideal value is n (the outlier is strictly least compact).  Ties
    with the outlier do not count, so a tied outlier ranks worse.
    """
    if not 0 <= outlier_index < len(scores):
        raise ValueError(f"outlier index {outlier_index} out of range")
    target = scores[outlier_index]
    return sum(
        1 for i, s in enumerate(scores) if i != outlier_index and s > target
    )


def build_report(
    per_case: Sequence[CaseResult], approach: str, metric: str
) -> OutlierReport:
    """Aggregate per-case results into position-percentage and accuracy."""
    if not per_case:
        raise ValueError("cannot aggregate an empty case list")
    opp = 100.0 * sum(r.op / r.case.n for r in per_case) / len(per_case)
    accuracy = 100.0 * sum(r.od for r in per_case) / len(per_case)
    missed = sorted(
        (
            (r.case.topic, r.case.outlier, r.case.outlier_class, 1)
            for r in per_case
            if r.od == 0
        ),
        key=lambda m: (-m[3], m[0], m[1]),
    )
    return OutlierReport(
        approach=approach,
        metric=metric,
        opp=opp,
        accuracy=accuracy,
        per_case=list(per_case),
        missed=missed,
    )


def evaluate_outliers(
    cases: Sequence[OutlierCase],
    matrix: EmbeddingMatrix,
    spec: MetricSpec,
    approach: str = "pairwise",
    policy: PhrasePolicy = DEFAULT_POLICY,
    lowercase: bool = False,
) -> OutlierReport:
    """Run the outlier-detection task over ``cases``.

    Every phrase must resolve: out-of-vocabulary items are an error here,
    never a silent skip, because dropping words would change the set size
    the scores are defined over.
    """
    if not cases:
        raise ValueError("evaluate_outliers requires at least one case")
    if approach not in ("pairwise", "prototype"):
        raise ValueError(f"unknown approach {approach!r}; expected pairwise or prototype")
    scorer = MatrixScorer(matrix, spec)
    compact = _compactness_pairwise if approach == "pairwise" else _compactness_prototype

    results = []
    for case in cases:
        refs = []
        for phrase in (*case.words, case.outlier):
            row = resolve_phrase_row(matrix, phrase, policy, lowercase=lowercase)
            if row is not None:
                refs.append(row)
                continue
            try:
                refs.append(scorer.register(resolve_phrase(matrix, phrase, policy, lowercase=lowercase)))
            except OOVError as e:
                raise OOVError(f"topic {case.topic!r}: {e}") from None
        scores = compact(scorer, refs)
        op = outlier_position(scores, case.n)
        od = 1 if op == case.n else 0
        compactness = {phrase: scores[i] for i, phrase in enumerate((*case.words, case.outlier))}
        results.append(CaseResult(case=case, compactness=compactness, op=op, od=od))
    return build_report(results, approach, spec.describe())


# ---------------------------------------------------------------------------
# Significance and error analysis
# ---------------------------------------------------------------------------


def chi_square_accuracy(k1: int, n1: int, k2: int, n2: int) -> tuple[float, float]:
    """2x2 contingency chi-square (no continuity correction) on two accuracies.

    Returns ``(chi2, p)`` with p from the 1-degree-of-freedom chi-square
    distribution.  A degenerate margin (all successes or all failures
    pooled) makes the statistic undefined: both values come back NaN.
    """
    for k, n in ((k1, n1), (k2, n2)):
        if n <= 0 or not 0 <= k <= n:
            raise ValueError("counts must satisfy 0 <= k <= n with n > 0")
    a, b = k1, n1 - k1
    c, d = k2, n2 - k2
    total = n1 + n2
    col1, col2 = a + c, b + d
    if col1 == 0 or col2 == 0:
        return math.nan, math.nan
    chi2 = total * (a * d - b * c) ** 2 / (n1 * n2 * col1 * col2)
    p = math.erfc(math.sqrt(chi2 / 2.0))  # survival of chi-square with 1 dof
    return chi2, p


def common_errors(
    reports: Sequence[OutlierReport],
) -> list[tuple[str, str, str, int]]:
    """Cases missed (OD = 0) across settings, most frequent first.

    All reports must cover the same case set.  Ties break by (topic,
    outlier) lexicographic order.
    """
    if not reports:
        return []
    case_keys = [
        {(r.case.topic, r.case.outlier) for r in report.per_case} for report in reports
    ]
    if any(keys != case_keys[0] for keys in case_keys[1:]):
        raise EvaluationError("reports cover different case sets")
    counts: dict[tuple[str, str], int] = {}
    classes: dict[tuple[str, str], str] = {}
    for report in reports:
        for r in report.per_case:
            key = (r.case.topic, r.case.outlier)
            classes[key] = r.case.outlier_class
            if r.od == 0:
                counts[key] = counts.get(key, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(topic, outlier, classes[(topic, outlier)], n) for (topic, outlier), n in ranked]

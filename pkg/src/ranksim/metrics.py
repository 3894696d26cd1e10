"""Rank profiles and the similarity metrics computed from them.

A *rank profile* assigns every dimension of a vector its 1-based position
when the values are sorted decreasingly; tied values share the average
(fractional) rank of the positions they occupy, so the profile is a pure
function of the value multiset.

Four metrics are provided:

* ``cosine`` — the usual angle cosine over raw values.
* ``apsyn`` — for every dimension ranked within the top ``N`` in *both*
  profiles, add the inverse of the average of its two ranks.
* ``apsynp`` — the power-smoothed variant: ranks are raised to a power
  ``p`` in (0, 1) before averaging and the sum runs over *all* dimensions,
  which widens the contribution beyond the top ranks.
* ``spearman`` — the Pearson correlation of the two rank profiles
  (tie-corrected Spearman over the dimension values).

All accumulations happen in float64 in dimension-index order, so scores
are deterministic across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ranksim import kernels
from ranksim.embeddings import EmbeddingMatrix

METRIC_KINDS = ("cosine", "apsyn", "apsynp", "spearman")

DEFAULT_POWER = 0.1

_KIND_ALIASES = {kind: kind for kind in METRIC_KINDS}
_KIND_ALIASES["spearman-metric"] = "spearman"


@dataclass(frozen=True)
class RankProfile:
    """Descending fractional ranks of a vector's values (1-based)."""

    ranks: np.ndarray

    @property
    def dims(self) -> int:
        return self.ranks.shape[0]


@dataclass(frozen=True)
class MetricSpec:
    """Which metric to compute plus its parameters.

    ``n_top`` applies to apsyn only (None means all dimensions, the
    convention for dense embeddings); ``p`` applies to apsynp only and
    must lie strictly inside (0, 1).
    """

    kind: str
    n_top: Optional[int] = None
    p: Optional[float] = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {METRIC_KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.n_top is not None:
            if kind != "apsyn":
                raise ValueError("n_top is only meaningful for the apsyn metric")
            if int(self.n_top) != self.n_top or self.n_top < 1:
                raise ValueError("n_top must be a positive integer")
            object.__setattr__(self, "n_top", int(self.n_top))
        if self.p is not None:
            if kind != "apsynp":
                raise ValueError("p is only meaningful for the apsynp metric")
            if not 0.0 < self.p < 1.0:
                raise ValueError("p must lie strictly between 0 and 1")
        elif kind == "apsynp":
            object.__setattr__(self, "p", DEFAULT_POWER)

    def describe(self) -> str:
        """Stable human-readable label used in reports."""
        if self.kind == "apsynp":
            return f"apsynp(p={self.p:g})"
        if self.kind == "apsyn":
            return f"apsyn(N={self.n_top})" if self.n_top else "apsyn(N=dims)"
        return self.kind


def _as_vector(v) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError("expected a non-empty 1-D vector")
    if not np.isfinite(arr).all():
        raise ValueError("vector contains NaN or infinite entries")
    return arr


def rank_profile(v) -> RankProfile:
    """Rank profile of ``v`` (descending, 1-based, ties averaged)."""
    return RankProfile(kernels.rank_profile(_as_vector(v)))


def _pair(x, y):
    x = _as_vector(x)
    y = _as_vector(y)
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return x, y


def cosine(x, y) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs are rejected."""
    x, y = _pair(x, y)
    return kernels.cosine(x, y)


def _profile_ranks(p: Union[RankProfile, np.ndarray]) -> np.ndarray:
    return p.ranks if isinstance(p, RankProfile) else np.asarray(p, dtype=np.float64)


def apsyn(px: RankProfile, py: RankProfile, n_top: Optional[int] = None) -> float:
    """Shared-top-rank score: sum of inverse average ranks over dimensions
    ranked <= n_top in both profiles (default: every dimension)."""
    rx, ry = _profile_ranks(px), _profile_ranks(py)
    if rx.shape[0] != ry.shape[0]:
        raise ValueError(f"profile dims mismatch: {rx.shape[0]} vs {ry.shape[0]}")
    dims = rx.shape[0]
    if n_top is None:
        n_top = dims
    if not 1 <= n_top <= dims:
        raise ValueError(f"N must lie in [1, {dims}], got {n_top}")
    return kernels.apsyn(rx, ry, float(n_top))


def apsynp(px: RankProfile, py: RankProfile, p: float = DEFAULT_POWER) -> float:
    """Power-smoothed rank overlap over all dimensions, p in (0, 1)."""
    rx, ry = _profile_ranks(px), _profile_ranks(py)
    if rx.shape[0] != ry.shape[0]:
        raise ValueError(f"profile dims mismatch: {rx.shape[0]} vs {ry.shape[0]}")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    return kernels.apsynp(rx, ry, p)


def spearman_metric(x, y) -> float:
    """Tie-corrected Spearman correlation of the two vectors' dimension values."""
    x, y = _pair(x, y)
    if x.shape[0] < 2:
        raise ValueError("spearman requires vectors of length >= 2")
    return kernels.pearson(kernels.rank_profile(x), kernels.rank_profile(y))


def similarity(spec: MetricSpec, x, y) -> float:
    """Score a vector pair under ``spec`` (fresh rank profiles)."""
    return MatrixScorer(None, spec).score(_as_vector(x), _as_vector(y))


class MatrixScorer:
    """Scores row/vector pairs under a fixed metric.

    Rank profiles of matrix rows are computed on demand and memoized per
    row id, since evaluation rescoring reuses them heavily.  Profiles for
    ad-hoc vectors (e.g. fresh mean prototypes) are computed fresh unless
    the vector is pinned with :meth:`register`.  The memo is safe under
    concurrent readers: a race can only duplicate an idempotent
    computation.

    A *ref* accepted by :meth:`score` is either an integer row id of the
    wrapped matrix, a negative id returned by :meth:`register`, or a plain
    vector.
    """

    def __init__(
        self,
        matrix: Optional[EmbeddingMatrix],
        spec: MetricSpec,
        profile_cache: Optional[dict] = None,
    ):
        self.matrix = matrix
        self.spec = spec
        self._profiles = profile_cache if profile_cache is not None else {}
        self._extra: dict[int, np.ndarray] = {}
        self._extra_profiles: dict[int, np.ndarray] = {}

    def register(self, vector) -> int:
        """Pin an ad-hoc vector and return a ref with profile memoization."""
        vid = -(len(self._extra) + 1)
        self._extra[vid] = _as_vector(vector)
        return vid

    def vector_of(self, ref) -> np.ndarray:
        """Materialize a ref as a float64 vector."""
        if isinstance(ref, (int, np.integer)):
            ref = int(ref)
            if ref < 0:
                return self._extra[ref]
            if self.matrix is None:
                raise ValueError("row refs require a matrix-backed scorer")
            return self.matrix.row(ref)
        return _as_vector(ref)

    def _profile_of(self, ref) -> np.ndarray:
        if isinstance(ref, (int, np.integer)):
            ref = int(ref)
            # registered vectors memoize per scorer; matrix rows may share
            # a cache across scorers keyed by row id
            memo = self._extra_profiles if ref < 0 else self._profiles
            prof = memo.get(ref)
            if prof is None:
                prof = kernels.rank_profile(self.vector_of(ref))
                memo[ref] = prof
            return prof
        return kernels.rank_profile(_as_vector(ref))

    def score(self, a, b) -> float:
        kind = self.spec.kind
        if kind == "cosine":
            x, y = self.vector_of(a), self.vector_of(b)
            if x.shape[0] != y.shape[0]:
                raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
            return kernels.cosine(x, y)
        rx, ry = self._profile_of(a), self._profile_of(b)
        if rx.shape[0] != ry.shape[0]:
            raise ValueError(f"length mismatch: {rx.shape[0]} vs {ry.shape[0]}")
        dims = rx.shape[0]
        if kind == "apsyn":
            n_top = self.spec.n_top if self.spec.n_top is not None else dims
            if not 1 <= n_top <= dims:
                raise ValueError(f"N must lie in [1, {dims}], got {n_top}")
            return kernels.apsyn(rx, ry, float(n_top))
        if kind == "apsynp":
            return kernels.apsynp(rx, ry, self.spec.p)
        if dims < 2:
            raise ValueError("spearman requires vectors of length >= 2")
        return kernels.pearson(rx, ry)

"""Pure-NumPy metric kernels.

Fallback backend used when the compiled extension is not built; also the
reference side of the backend parity tests.  All functions assume float64
input that has already been validated (finite entries, matching lengths) by
the callers in :mod:`ranksim.metrics`.
"""

import math

import numpy as np

NAME = "python"


def rank_profile(values):
    """Descending fractional ranks of ``values``.

    Rank 1 goes to the largest value; runs of tied values all receive the
    mean of the 1-based positions they occupy, so the result depends only on
    the multiset of values, not on their memory order.
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    n = v.shape[0]
    order = np.argsort(-v, kind="stable")
    sv = v[order]
    new_run = np.empty(n, dtype=bool)
    new_run[0] = True
    np.not_equal(sv[1:], sv[:-1], out=new_run[1:])
    run_id = np.cumsum(new_run) - 1
    counts = np.bincount(run_id)
    ends = np.cumsum(counts)  # 1-based end position of each tie run
    avg = ends - 0.5 * (counts - 1)
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = avg[run_id]
    return ranks


def apsyn(rx, ry, n_top):
    """Sum of inverse average ranks over dimensions ranked <= n_top in both."""
    rx = np.asarray(rx)
    ry = np.asarray(ry)
    mask = (rx <= n_top) & (ry <= n_top)
    if not mask.any():
        return 0.0
    return float(np.sum(2.0 / (rx[mask] + ry[mask])))


def apsynp(rx, ry, p):
    """Power-smoothed variant: sum over all dimensions of 2 / (rx^p + ry^p).

    ``p == 1.0`` is handled exactly (no pow round-off) so that the reduction
    to the top-N sum with N = dims holds bit-for-bit.
    """
    rx = np.asarray(rx)
    ry = np.asarray(ry)
    if p == 1.0:
        return float(np.sum(2.0 / (rx + ry)))
    return float(np.sum(2.0 / (rx**p + ry**p)))


def cosine(x, y):
    """Cosine of the angle between x and y, clamped to [-1, 1]."""
    x = np.asarray(x)
    y = np.asarray(y)
    nx = float(np.sum(x * x))
    ny = float(np.sum(y * y))
    if nx == 0.0 or ny == 0.0:
        raise ValueError("cosine is undefined for a zero-norm vector")
    c = float(np.sum(x * y)) / math.sqrt(nx * ny)
    return min(1.0, max(-1.0, c))


def pearson(a, b):
    """Pearson correlation coefficient, clamped to [-1, 1]."""
    a = np.asarray(a)
    b = np.asarray(b)
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.sum(da * da))
    vb = float(np.sum(db * db))
    if va == 0.0 or vb == 0.0:
        raise ValueError("correlation is undefined when a list has zero variance")
    r = float(np.sum(da * db)) / math.sqrt(va * vb)
    return min(1.0, max(-1.0, r))

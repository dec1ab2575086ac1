"""Rank statistics and classification metrics.

The Mann-Whitney machinery lives here so the propagation comparison and the
rank-based AUC share one ranking implementation.
"""

import math

from wsskit.errors import ArgumentError


def rankdata(values) -> list:
    """Fractional ranks (1-based); ties get the mean of their rank span."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_term(values) -> float:
    """Sum of t^3 - t over tie groups."""
    total = 0
    run = 1
    ordered = sorted(values)
    for i in range(1, len(ordered) + 1):
        if i < len(ordered) and ordered[i] == ordered[i - 1]:
            run += 1
        else:
            total += run ** 3 - run
            run = 1
    return float(total)


def normal_sf(x: float) -> float:
    """Survival function of the standard normal."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def mann_whitney_u(x, y):
    """Two-sided Mann-Whitney rank-sum test, normal approximation.

    Uses tie correction and a 0.5 continuity correction. Returns
    ``(u_statistic_for_x, p_value)``; degenerate inputs (all values tied)
    give p = 1.0.
    """
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise ArgumentError("mann_whitney_u requires non-empty samples")
    combined = list(x) + list(y)
    ranks = rankdata(combined)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    n = n1 + n2
    tie = _tie_term(combined)
    var = n1 * n2 / 12.0 * ((n + 1) - tie / (n * (n - 1.0)))
    if var <= 0.0:
        return u1, 1.0
    numer = max(u1, u2) - n1 * n2 / 2.0 - 0.5
    if numer < 0.0:
        numer = 0.0
    p = 2.0 * normal_sf(numer / math.sqrt(var))
    return u1, min(p, 1.0)


def auc_score(labels, scores) -> float:
    """Rank-statistic AUC of ``scores`` against binary ``labels`` (1 = positive)."""
    pos = [s for y, s in zip(labels, scores) if y]
    neg = [s for y, s in zip(labels, scores) if not y]
    if not pos or not neg:
        raise ArgumentError("AUC needs at least one positive and one negative")
    ranks = rankdata(list(pos) + list(neg))
    r_pos = sum(ranks[: len(pos)])
    return (r_pos - len(pos) * (len(pos) + 1) / 2.0) / (len(pos) * len(neg))


def accuracy(y_true, y_pred) -> float:
    if len(y_true) != len(y_pred):
        raise ArgumentError("length mismatch")
    if not y_true:
        raise ArgumentError("empty inputs")
    return sum(a == b for a, b in zip(y_true, y_pred)) / len(y_true)


def f1_score(y_true, y_pred, positive="fake") -> float:
    """F1 of the positive class; 0.0 when precision + recall is 0."""
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == positive and p == positive)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t != positive and p == positive)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == positive and p != positive)
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0

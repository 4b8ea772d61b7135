"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately written with plain Python loops, separate
from the library code paths it checks. The closed-form expressions match
the library's definitions, so results agree exactly (all intermediate sums
are exactly representable in float64 at the sizes tested).
"""

from __future__ import annotations

import math


def rank_average(values):
    """1-based ranks with ties averaged."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2  # mean of 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def pearson(x, y):
    n = len(x)
    sx = sum(x)
    sy = sum(y)
    sxx = sum(v * v for v in x)
    syy = sum(v * v for v in y)
    sxy = sum(a * b for a, b in zip(x, y))
    den = math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))
    return (n * sxy - sx * sy) / den


def spearman_rho(x, y):
    return pearson(rank_average(x), rank_average(y))


def pair_counts(x, y):
    """(concordant, discordant) over all unordered pairs."""
    concordant = discordant = 0
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            prod = (x[i] - x[j]) * (y[i] - y[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    return concordant, discordant


def kendall_tau_c(x, y):
    n = len(x)
    concordant, discordant = pair_counts(x, y)
    m = min(len(set(x)), len(set(y)))
    return (2 * m * (concordant - discordant)) / (n * n * (m - 1))

"""Optimal weights for the max/average length trade-off.

Minimising ``alpha * max l + (1 - alpha) * E[l]`` over real lengths is the
same as minimising ``sum w_alpha(x) l(x)`` for a re-weighted probability
vector ``w_alpha``. Starting from ``w_0 = p`` the lightest symbols are
progressively merged into a class sharing one common (minimum) weight;
between merges every weight moves affinely in alpha. The merge points
``alpha_1 <= alpha_2 <= ...`` are tabulated once per model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate
from numbers import Real
from typing import Sequence

import numpy as np

from .distributions import LengthVector, SourceModel, check_alpha, log_base

ALPHA_TOLERANCE = 1e-12


def breakpoint_recursion(probs: Sequence[Real]) -> tuple[list, list]:
    """Merge points and merged-class slopes for descending ``probs``.

    Works on any field type (float, Fraction). Returns ``(alphas, slopes)``
    with ``alphas[0] == 0`` and ``slopes[k]`` the rate at which the common
    weight of the ``k + 1`` lightest symbols grows with alpha.
    """
    n = len(probs)
    zero = probs[0] - probs[0]
    # head[j] = sum of the j heaviest probabilities
    head = [zero, *accumulate(probs)]
    alphas = [zero]
    slopes = []
    for k in range(n):
        outside = head[n - 1 - k]
        slope = outside / (k + 1)
        slopes.append(slope)
        if k == n - 1:
            break
        a = alphas[-1]
        nxt, cur = probs[n - 2 - k], probs[n - 1 - k]
        alphas.append(a + (1 - a) * (nxt - cur) / (slope + nxt))
    return alphas, slopes


@dataclass(frozen=True)
class BreakpointTable:
    alphas: np.ndarray
    slopes: np.ndarray
    # common weight of the merged class at alphas[k]
    anchors: np.ndarray

    def segment(self, alpha: float) -> int:
        """Largest k with alphas[k] <= alpha (ties resolve upward)."""
        return int(np.searchsorted(self.alphas, alpha + ALPHA_TOLERANCE, side="right")) - 1


@dataclass(frozen=True)
class WeightProfile:
    weights: np.ndarray
    k: int
    merged: tuple[int, ...]
    alpha: float

    @property
    def minimum(self) -> float:
        return float(self.weights[-1])


def breakpoints(m: SourceModel) -> BreakpointTable:
    alphas, slopes = breakpoint_recursion([float(p) for p in m.probs])
    alphas = np.minimum(np.maximum.accumulate(np.array(alphas)), 1.0)
    n = len(m)
    anchors = (1 - alphas) * m.probs[n - 1 - np.arange(n)]
    return BreakpointTable(alphas=alphas, slopes=np.array(slopes), anchors=anchors)


def _table(m: SourceModel, table: BreakpointTable | None) -> BreakpointTable:
    return breakpoints(m) if table is None else table


def merged_class(m: SourceModel, alpha: float, table: BreakpointTable | None = None) -> tuple[int, tuple[int, ...]]:
    """Segment index k and the k + 1 lightest (sorted) symbol indices."""
    alpha = check_alpha(alpha)
    k = _table(m, table).segment(alpha)
    n = len(m)
    return k, tuple(range(n - 1 - k, n))


def weights(m: SourceModel, alpha: float, table: BreakpointTable | None = None) -> WeightProfile:
    """Weight vector at ``alpha``: scaled probabilities outside the merged
    class, the common affinely-growing weight inside it."""
    alpha = check_alpha(alpha)
    table = _table(m, table)
    k, merged = merged_class(m, alpha, table)
    w = (1 - alpha) * m.probs
    w[merged[0]:] = table.anchors[k] + (alpha - table.alphas[k]) * table.slopes[k]
    return WeightProfile(weights=w, k=k, merged=merged, alpha=alpha)


def optimal_lengths_p1(m: SourceModel, alpha: float, table: BreakpointTable | None = None) -> LengthVector:
    """Real-valued lengths minimising alpha * max + (1 - alpha) * average.

    Uses the closed form on the merged class directly, i.e. the total mass
    ``alpha + (1 - alpha) * P(U_k)`` shared evenly, rather than the
    incremental update used by :func:`weights`.
    """
    alpha = check_alpha(alpha)
    k, merged = merged_class(m, alpha, table)
    l = -log_base((1 - alpha) * m.probs, m.D) if alpha < 1 else np.empty(len(m))
    start = merged[0]
    share = (alpha + (1 - alpha) * math.fsum(m.probs[start:])) / len(merged)
    l[start:] = -log_base(share, m.D)
    return LengthVector(l, D=m.D)

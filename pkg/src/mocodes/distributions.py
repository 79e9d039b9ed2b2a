"""Source models, length vectors and the four pay-off functionals.

Every per-symbol vector handled here is indexed in the model's sorted
(descending probability) order. ``SourceModel.perm`` maps a sorted index
back to the caller's original symbol id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import (
    AlphabetTooSmall,
    AlphaOutOfRange,
    NonPositiveProbability,
    SumNotOne,
    TOutOfRange,
)

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SourceModel:
    probs: np.ndarray
    perm: tuple[int, ...]
    D: int = 2

    def __post_init__(self):
        self.probs.setflags(write=False)

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def log_probs(self) -> np.ndarray:
        """log_D p, sorted order."""
        return log_base(self.probs, self.D)

    def to_original(self, values) -> dict[int, float]:
        """Map a sorted-order vector to ``{original symbol id: value}``."""
        return {sym: v for sym, v in zip(self.perm, np.asarray(values).tolist())}


@dataclass(frozen=True)
class LengthVector:
    lengths: np.ndarray
    D: int = 2
    integral: bool = False
    kraft: float = field(init=False)

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=np.int64 if self.integral else float)
        lengths.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "kraft", kraft_sum(lengths, self.D))

    def __len__(self) -> int:
        return len(self.lengths)

    def __iter__(self):
        return iter(self.lengths.tolist())

    @property
    def admissible(self) -> bool:
        return self.kraft <= 1 + 1e-9


Lengths = Union[LengthVector, Sequence[float], np.ndarray]


def log_base(x, D: int) -> np.ndarray:
    """log_D, exact to the last ulp for D = 2 where numpy has a dedicated routine."""
    if D == 2:
        return np.log2(x)
    return np.log(x) / math.log(D)


def _as_array(lengths: Lengths) -> np.ndarray:
    if isinstance(lengths, LengthVector):
        return lengths.lengths.astype(float)
    return np.asarray(lengths, dtype=float)


def validate_and_sort(raw_probs: Sequence[float], D: int = 2) -> SourceModel:
    """Build a :class:`SourceModel` from an unordered probability vector.

    Exact zeros are dropped (their ids never appear in ``perm``); the rest
    are stably sorted into descending order and renormalised. ``perm`` holds
    0-based positions in ``raw_probs``.
    """
    if D < 2:
        raise AlphabetTooSmall(f"code alphabet size must be >= 2, got {D}")
    raw = np.asarray(raw_probs, dtype=float).ravel()
    if not np.all(np.isfinite(raw)):
        raise NonPositiveProbability("probabilities must be finite")
    if np.any(raw < 0):
        raise NonPositiveProbability("negative probability")
    ids = np.flatnonzero(raw > 0)
    if len(ids) < 2:
        raise AlphabetTooSmall(f"need at least 2 symbols with positive probability, got {len(ids)}")
    total = math.fsum(raw[ids])
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise SumNotOne(f"probabilities sum to {total!r}")
    order = ids[np.argsort(-raw[ids], kind="stable")]
    probs = raw[order] / total
    return SourceModel(probs=probs, perm=tuple(int(i) for i in order), D=int(D))


def model_from_counts(counts: Sequence[float], D: int = 2) -> SourceModel:
    """Normalise non-negative counts (index = symbol id) into a model."""
    counts = np.asarray(counts, dtype=float)
    if np.any(counts < 0) or not np.all(np.isfinite(counts)):
        raise NonPositiveProbability("counts must be finite and non-negative")
    total = counts.sum()
    if total <= 0:
        raise AlphabetTooSmall("all counts are zero")
    return validate_and_sort(counts / total, D)


def shannon_lengths(m: SourceModel) -> np.ndarray:
    return -m.log_probs


def entropy(m: SourceModel) -> float:
    return float(-np.dot(m.probs, m.log_probs))


def kraft_sum(lengths: Lengths, D: int | None = None) -> float:
    """Sum of D**-l over the vector; D defaults to the LengthVector's base or 2."""
    if D is None:
        D = lengths.D if isinstance(lengths, LengthVector) else 2
    return float(np.sum(np.power(float(D), -_as_array(lengths))))


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {alpha!r}")
    return alpha


def check_t(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t <= -1.0:
        raise TOutOfRange(f"t must be finite and > -1, got {t!r}")
    return t


def payoff_max_avg(lengths: Lengths, m: SourceModel, alpha: float) -> float:
    alpha = check_alpha(alpha)
    l = _as_array(lengths)
    return alpha * float(l.max()) + (1 - alpha) * float(np.dot(l, m.probs))


def payoff_max_avg_redundancy(lengths: Lengths, m: SourceModel, alpha: float) -> float:
    alpha = check_alpha(alpha)
    l = _as_array(lengths)
    r = l + m.log_probs
    return alpha * float(r.max()) + (1 - alpha) * float(np.dot(r, m.probs))


def _exp_mean(values: np.ndarray, weights_log: np.ndarray, t: float, D: int) -> float:
    # (1/t) log_D sum exp(log w + t v ln D), stable for large |t|
    if t == 0.0:
        return float(np.dot(np.exp(weights_log), values))
    lnD = math.log(D)
    return float(logsumexp(weights_log + t * lnD * values)) / (t * lnD)


def payoff_exp_avg(lengths: Lengths, m: SourceModel, alpha: float, t: float) -> float:
    """alpha/t * log_D(sum p D^(t l)) + (1 - alpha) * average length.

    At t = 0 the exponential term is replaced by its limit, the average length.
    """
    alpha = check_alpha(alpha)
    t = check_t(t)
    l = _as_array(lengths)
    avg = float(np.dot(l, m.probs))
    return alpha * _exp_mean(l, np.log(m.probs), t, m.D) + (1 - alpha) * avg


def payoff_exp_avg_redundancy(lengths: Lengths, m: SourceModel, alpha: float, t: float) -> float:
    alpha = check_alpha(alpha)
    t = check_t(t)
    r = _as_array(lengths) + m.log_probs
    avg = float(np.dot(r, m.probs))
    return alpha * _exp_mean(r, np.log(m.probs), t, m.D) + (1 - alpha) * avg

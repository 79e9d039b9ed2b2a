"""From a source model and pay-off choice to real and integer code lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codebook import Codebook, canonical_assign, integer_lengths
from .distributions import (
    LengthVector,
    SourceModel,
    check_alpha,
    check_t,
    model_from_counts,
    payoff_exp_avg,
    payoff_exp_avg_redundancy,
    payoff_max_avg,
    payoff_max_avg_redundancy,
)
from .errors import InputError
from .merge_weights import optimal_lengths_p1, weights
from .tilted import solve_lengths_p2, solve_redundancy_p2

PAYOFFS = ("max-avg", "max-avg-red", "exp-avg", "exp-avg-red")
# the max-redundancy pay-off is designed through its exponential version at this t
LIMIT_T = 1000.0
DEFAULT_T = 1.0


@dataclass(frozen=True)
class Design:
    model: SourceModel
    payoff: str
    alpha: float
    t: float | None
    weights: np.ndarray  # implied probabilities D**-l, sorted order
    real: LengthVector
    integer: LengthVector

    def codebook(self) -> Codebook:
        return canonical_assign(self.integer, self.model.perm)

    def byte_table(self) -> dict[int, int]:
        return dict(zip(self.model.perm, self.integer.lengths.tolist()))


def needs_t(payoff: str) -> bool:
    return payoff.startswith("exp")


def real_lengths(m: SourceModel, payoff: str, alpha: float, t: float | None = None) -> tuple[LengthVector, np.ndarray]:
    """Optimal real lengths and the weight vector they are -log_D of."""
    alpha = check_alpha(alpha)
    if payoff == "max-avg":
        w = weights(m, alpha).weights
        return optimal_lengths_p1(m, alpha), w
    if payoff == "max-avg-red":
        sol = solve_redundancy_p2(m, alpha, LIMIT_T)
    elif payoff == "exp-avg":
        sol = solve_lengths_p2(m, alpha, check_t(DEFAULT_T if t is None else t))
    elif payoff == "exp-avg-red":
        sol = solve_redundancy_p2(m, alpha, check_t(DEFAULT_T if t is None else t))
    else:
        raise InputError(f"unknown pay-off {payoff!r}; expected one of {', '.join(PAYOFFS)}")
    return sol.lengths, np.power(float(m.D), -sol.lengths.lengths)


def design(m: SourceModel, payoff: str = "max-avg", alpha: float = 0.0, t: float | None = None) -> Design:
    if needs_t(payoff) and t is None:
        t = DEFAULT_T
    if not needs_t(payoff):
        t = None
    real, w = real_lengths(m, payoff, alpha, t)
    return Design(model=m, payoff=payoff, alpha=float(alpha), t=t, weights=w, real=real, integer=integer_lengths(real))


def all_payoffs(l, m: SourceModel, alpha: float, t: float | None) -> dict[str, float | None]:
    out = {
        "max-avg": payoff_max_avg(l, m, alpha),
        "max-avg-red": payoff_max_avg_redundancy(l, m, alpha),
        "exp-avg": None,
        "exp-avg-red": None,
    }
    if t is not None:
        out["exp-avg"] = payoff_exp_avg(l, m, alpha, t)
        out["exp-avg-red"] = payoff_exp_avg_redundancy(l, m, alpha, t)
    return out


def byte_histogram(data: bytes) -> np.ndarray:
    return np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)


def parse_counts(text: str) -> np.ndarray:
    try:
        counts = np.array([float(tok) for tok in text.split()], dtype=float)
    except ValueError as exc:
        raise InputError(f"bad frequency file: {exc}") from None
    if counts.size == 0:
        raise InputError("empty frequency file")
    return counts


def load_model(path: str | Path, counts_file: bool = False, D: int = 2) -> SourceModel:
    """Model from a text frequency file or from the byte histogram of a raw file."""
    path = Path(path)
    if counts_file:
        counts = parse_counts(path.read_text())
    else:
        counts = byte_histogram(path.read_bytes())
    return model_from_counts(counts, D)


def max_redundancy(l: np.ndarray, m: SourceModel) -> float:
    return float(np.max(np.asarray(l, dtype=float) + m.log_probs))


def avg_redundancy(l: np.ndarray, m: SourceModel) -> float:
    return float(np.dot(np.asarray(l, dtype=float), m.probs) + math.fsum(m.probs * m.log_probs))

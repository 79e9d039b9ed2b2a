"""Optimal lengths for the exponential-cost / average-length trade-off.

The optimum is characterised by a fixed point in the implied probabilities
``q(x) = D**-l(x)``::

    q = alpha * tilt(q) + (1 - alpha) * p,
    tilt(q)(x) = b(x) q(x)**-t / sum_y b(y) q(y)**-t

with ``b = p`` for the length pay-off and ``b = p**(t+1)`` for the
redundancy pay-off.

Two solvers are provided. ``"bracket"`` (the default) writes the fixed point
as ``q(x) = c b(x) q(x)**-t + (1 - alpha) p(x)``; for fixed ``c > 0`` each
equation has a single root (monotone in ``c``), and summing shows that
``sum q = 1`` forces ``c = alpha / sum b q**-t``. So one outer scalar root
in ``log c`` over an inner vectorised safeguarded Newton solve handles the system for any
``t > -1``. ``"damped"`` is the plain relaxation
``q <- (1 - g) q + g (alpha tilt(q) + (1 - alpha) p)``, which contracts
only for roughly ``g < 2 / (1 + t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, softmax

from .distributions import LengthVector, SourceModel, check_alpha, check_t
from .errors import NoConvergence
from .merge_weights import optimal_lengths_p1

RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TiltedSolution:
    lengths: LengthVector
    tilted: np.ndarray
    alpha: float
    t: float
    iterations: int
    residual: float


def _tilt(log_b: np.ndarray, l: np.ndarray, t: float, lnD: float) -> np.ndarray:
    # b D^{t l} normalised; softmax shifts by the max exponent
    return softmax(log_b + t * lnD * l)


def _residual(q: np.ndarray, tilted: np.ndarray, p: np.ndarray, alpha: float) -> float:
    return float(np.max(np.abs(q - alpha * tilted - (1 - alpha) * p)))


def _inner_roots(gamma: float, log_a: np.ndarray, log_b: np.ndarray, t: float, lnD: float) -> np.ndarray:
    """Solve D^u = A + D^(gamma + log_D b - t u) for u, elementwise.

    Works on g(u) = u - log(A + c b e^(-t u)) (natural logs), whose slope
    1 + t * share lies in (0, 1 + max(t, 0)] for every t > -1.
    Bracket: at ``lo`` one of the two right-hand terms already equals e^u,
    at ``hi`` each term is at most e^u / 2.
    """
    cb = gamma * lnD + log_b  # natural log of c*b
    s = 1.0 + t
    ln2 = math.log(2.0)
    lo = np.maximum(log_a, cb / s)
    hi = np.maximum(log_a + ln2, (cb + ln2) / s)
    u = 0.5 * (lo + hi)
    eps = 4 * np.finfo(float).eps
    # Newton inside the bracket, bisection whenever the step leaves it
    for _ in range(200):
        tilt_term = cb - t * u
        rhs = np.logaddexp(log_a, tilt_term)
        g = u - rhs
        pos = g > 0
        hi = np.where(pos, u, hi)
        lo = np.where(pos, lo, u)
        newton = u - g / (1.0 + t * np.exp(tilt_term - rhs))
        ok = (newton >= lo) & (newton <= hi)
        nxt = np.where(ok, newton, 0.5 * (lo + hi))
        done = np.abs(nxt - u) <= eps * np.maximum(1.0, np.abs(u))
        u = nxt
        if np.all(done | (hi - lo <= eps * np.maximum(1.0, np.abs(lo)))):
            break
    return u  # natural log of q


def _solve_bracket(p, log_b, alpha, t, lnD):
    with np.errstate(divide="ignore"):
        log_a = np.log((1 - alpha) * p)
    calls = 0

    def excess(gamma: float) -> float:
        # log of sum q; increasing in gamma, zero at the solution
        nonlocal calls
        calls += 1
        return float(logsumexp(_inner_roots(gamma, log_a, log_b, t, lnD)))

    # gamma_hi puts every root at q >= 1
    g_hi = float(-np.min(log_b)) / lnD
    if t > 0:
        # each root is at most A + (c b)^(1/(1+t)), so this keeps sum q < 1
        g_lo = (1 + t) * (math.log(alpha / 2) - float(logsumexp(log_b / (1 + t)))) / lnD
        f_lo = excess(g_lo)
    else:
        step, g_lo = 1.0, g_hi - 1.0
        f_lo = excess(g_lo)
        while f_lo >= 0:
            step *= 2
            g_lo = g_hi - step
            prev, f_lo = f_lo, excess(g_lo)
            if f_lo == prev or not math.isfinite(g_lo):
                break
    if f_lo >= 0:
        # alpha * tilt is below float resolution next to (1 - alpha) p
        gamma = g_lo
    else:
        gamma = brentq(excess, g_lo, g_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    log_q = _inner_roots(gamma, log_a, log_b, t, lnD)
    return -log_q / lnD, calls


def _solve_damped(p, log_b, alpha, t, lnD, damping=0.5, max_iter=100_000, tol=1e-12, halvings=4):
    for _ in range(halvings + 1):
        q = p.copy()
        for it in range(1, max_iter + 1):
            with np.errstate(divide="ignore"):
                l = -np.log(q) / lnD
            target = alpha * _tilt(log_b, l, t, lnD) + (1 - alpha) * p
            nxt = (1 - damping) * q + damping * target
            if not np.all(np.isfinite(nxt)):
                break
            if np.max(np.abs(nxt - q)) <= tol:
                return -np.log(nxt) / lnD, it
            q = nxt
        damping /= 2
    raise NoConvergence(f"damped iteration did not converge (alpha={alpha}, t={t})")


def _solve(m: SourceModel, alpha: float, t: float, redundancy: bool, method: str) -> TiltedSolution:
    alpha = check_alpha(alpha)
    t = check_t(t)
    p = m.probs
    lnD = math.log(m.D)
    log_b = (1 + t) * np.log(p) if redundancy else np.log(p)
    if alpha == 0.0 or t == 0.0 or np.all(p == p[0]):
        # tilt is p itself (t = 0, or uniform p) or ignored (alpha = 0)
        l, iterations = -m.log_probs, 0
    elif method == "bracket":
        l, iterations = _solve_bracket(p, log_b, alpha, t, lnD)
    elif method == "damped":
        l, iterations = _solve_damped(p, log_b, alpha, t, lnD)
    else:
        raise ValueError(f"unknown method {method!r}")
    tilted = _tilt(log_b, l, t, lnD)
    residual = _residual(np.exp(-l * lnD), tilted, p, alpha)
    if not residual <= RESIDUAL_TOLERANCE:
        raise NoConvergence(f"fixed-point residual {residual:.3g} (alpha={alpha}, t={t})")
    return TiltedSolution(
        lengths=LengthVector(l, D=m.D),
        tilted=tilted,
        alpha=alpha,
        t=t,
        iterations=iterations,
        residual=residual,
    )


def solve_lengths_p2(m: SourceModel, alpha: float, t: float, method: str = "bracket") -> TiltedSolution:
    """Minimise alpha/t log_D E[D^(t l)] + (1 - alpha) E[l] over real lengths."""
    return _solve(m, alpha, t, redundancy=False, method=method)


def solve_redundancy_p2(m: SourceModel, alpha: float, t: float, method: str = "bracket") -> TiltedSolution:
    """Same as :func:`solve_lengths_p2` for the pointwise-redundancy pay-off.

    The tilt weights are ``p**(t+1)``. For real-valued lengths the Shannon
    code has zero redundancy everywhere and is the fixed point.
    """
    return _solve(m, alpha, t, redundancy=True, method=method)


def closed_form_alpha1(m: SourceModel, t: float) -> LengthVector:
    """-(1/(1+t)) log_D p + log_D sum p^(1/(1+t)): the alpha = 1 optimum."""
    t = check_t(t)
    lnD = math.log(m.D)
    ln_p = np.log(m.probs)
    r = 1.0 / (1.0 + t)
    l = (-r * ln_p + logsumexp(r * ln_p)) / lnD
    return LengthVector(l, D=m.D)


def solve_p1_via_limit(m: SourceModel, alpha: float, t_max: float = 1000.0) -> tuple[LengthVector, float]:
    """Large-t exponential solution and its sup-norm gap to the merging solution.

    Intended as a cross-check, not as a production design path.
    """
    if t_max < 100:
        raise ValueError(f"t_max must be >= 100, got {t_max}")
    approx = solve_lengths_p2(m, alpha, t_max).lengths
    exact = optimal_lengths_p1(m, alpha).lengths
    return approx, float(np.max(np.abs(approx.lengths - exact)))

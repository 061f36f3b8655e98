"""Scalar log-domain helpers: log(e^x - 1), log(1 - e^-x), log-sum-exp."""

import math

from scipy.special import logsumexp as _logsumexp

NEG_INF = float("-inf")


def log_expm1(x: float) -> float:
    """log(e^x - 1) for x > 0 without overflow."""
    if x > 50.0:
        return x + math.log1p(-math.exp(-x))
    return math.log(math.expm1(x))


def log1mexp(x: float) -> float:
    """log(1 - e^-x) for x > 0."""
    if x < 0.6931471805599453:
        return math.log(-math.expm1(-x))
    return math.log1p(-math.exp(-x))


def log_coth(x: float) -> float:
    """log(coth x) for x > 0."""
    # coth x = 1 + 2/(e^{2x} - 1)
    if x > 350.0:
        return math.log1p(2.0 * math.exp(-2.0 * x))
    return math.log1p(2.0 / math.expm1(2.0 * x))


def log_abs_2sinh(x: float) -> float:
    """log|2 sinh x| for x != 0."""
    ax = abs(x)
    if ax < 1.0:
        return math.log(2.0 * math.sinh(ax))
    return ax + math.log1p(-math.exp(-2.0 * ax))


def logsumexp(values) -> float:
    values = [v for v in values if v != NEG_INF]
    if not values:
        return NEG_INF
    return float(_logsumexp(values))


def safe_exp(x: float) -> float:
    if x == NEG_INF:
        return 0.0
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf

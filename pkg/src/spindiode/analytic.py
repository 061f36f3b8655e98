"""Closed-form steady-state current for the three- and four-site chains.

This is a second, independent route to Γ. It works from fixed level
labels and tabulated Bohr frequencies, not from the transition graph. Each
cycle is a 4×4 linear system

    Γ^n_{i,k}/λ = a^n_{k,i} ρ_{i,i} − a^n_{i,k} ρ_{k,k},   a^n_{k,i} = ω_{k,i} n_n(ω_{k,i})

with ω_{k,i} = E_k − E_i. Cramer's rule gives the cycle populations as
ρ = −(Γ/λ) R_c / detcoef_c. Normalizing the total probability gives

    Γ = −λ / Σ_c R_c / detcoef_c.

All a and g coefficients are non-negative, so R_c is a positive sum. Each
detcoef is a positive product times e^{...}·2 sinh(...). Everything is
carried as (log|x|, sign), which keeps β·ζ in the hundreds representable.

Level labels are 1-based; the spin strings list site 1 first, ``+`` = up.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Mapping, Sequence

from ._logmath import NEG_INF, log_abs_2sinh, log_coth, logsumexp, safe_exp
from .bath import BathSpec, Side, log_a_coefficient
from .model import SpinConfig

__all__ = [
    "N3_LABELS",
    "N4_LABELS",
    "N3_FREQUENCIES",
    "N4_FREQUENCIES",
    "label_config",
    "frequency",
    "g_coefficient",
    "log_g_coefficient",
    "CramerBlockN3",
    "CramerBlockN4",
    "cramer_n3",
    "cramer_n4",
    "asymptotic_probe",
]

# level labels -> spins of sites 1..N
N3_LABELS = {
    1: "---", 2: "+--", 3: "-+-", 4: "--+",
    5: "-++", 6: "+-+", 7: "++-", 8: "+++",
}
N4_LABELS = {
    1: "----", 2: "+---", 3: "-+--", 4: "--+-",
    5: "---+", 6: "++--", 7: "+-+-", 8: "-++-",
    9: "+--+", 10: "-+-+", 11: "--++", 12: "+++-",
    13: "++-+", 14: "+-++", 15: "-+++", 16: "++++",
}

# Tabulated Bohr frequencies ω_{k,j} = E_k − E_j as functions of the parameters.
N3_FREQUENCIES: dict = {
    (6, 4): lambda p: 2 * (p["h"] - p["Delta"] - p["delta"] + p["theta"]),
    (4, 1): lambda p: 2 * (p["h"] + p["Delta"] + 2 * p["zeta"] - p["delta"] - p["theta"]),
    (2, 1): lambda p: 2 * (p["h"] - p["Delta"] - p["delta"] - p["theta"]),
    (6, 2): lambda p: 2 * (p["h"] + p["Delta"] + 2 * p["zeta"] - p["delta"] + p["theta"]),
    (8, 5): lambda p: 2 * (p["h"] + p["Delta"] + p["delta"] + p["theta"]),
    (5, 3): lambda p: 2 * (p["h"] - p["Delta"] + 2 * p["zeta"] + p["delta"] - p["theta"]),
    (7, 3): lambda p: 2 * (p["h"] + p["Delta"] + p["delta"] - p["theta"]),
    (8, 7): lambda p: 2 * (p["h"] - p["Delta"] + 2 * p["zeta"] + p["delta"] + p["theta"]),
}


def _w4(sign_d, sign_t, sign_g):
    # left-flip frequencies: 2(h ± (Δ+δ) ± θ ± γ)
    return lambda p: 2 * (
        p["h"] + sign_d * (p["Delta"] + p["delta"]) + sign_t * p["theta"] + sign_g * p["gamma"]
    )


def _v4(sign_d, sign_p, sign_g):
    # right-flip frequencies: 2(h + 4ζ ± (δ − 3Δ) ± φ ± γ)
    return lambda p: 2 * (
        p["h"] + 4 * p["zeta"] + sign_d * (p["delta"] - 3 * p["Delta"]) + sign_p * p["phi"] + sign_g * p["gamma"]
    )


N4_FREQUENCIES: dict = {
    (2, 1): _w4(-1, -1, -1),
    (5, 1): _v4(-1, -1, -1),
    (9, 5): _w4(-1, -1, +1),
    (9, 2): _v4(-1, -1, +1),
    (13, 10): _w4(+1, -1, +1),
    (13, 6): _v4(-1, +1, +1),
    (6, 3): _w4(+1, -1, -1),
    (10, 3): _v4(-1, +1, -1),
    (14, 11): _w4(-1, +1, +1),
    (11, 4): _v4(+1, -1, -1),
    (7, 4): _w4(-1, +1, -1),
    (14, 7): _v4(+1, -1, +1),
    (16, 15): _w4(+1, +1, +1),
    (15, 8): _v4(+1, +1, -1),
    (12, 8): _w4(+1, +1, -1),
    (16, 12): _v4(+1, +1, +1),
}

_TABLES = {3: (N3_LABELS, N3_FREQUENCIES), 4: (N4_LABELS, N4_FREQUENCIES)}


def label_config(n_sites: int, label: int) -> SpinConfig:
    """SpinConfig of a level label (N = 3 or 4)."""
    return SpinConfig.from_string(_TABLES[n_sites][0][label])


def frequency(table: Mapping, params: Mapping, k: int, j: int) -> float:
    """ω_{k,j} from a frequency table, using antisymmetry for reversed pairs."""
    if (k, j) in table:
        return float(table[(k, j)](params))
    if (j, k) in table:
        return -float(table[(j, k)](params))
    raise KeyError(f"omega_{k},{j} is not in the table")


def g_coefficient(omega: float, beta: float) -> float:
    """ω·coth(βω/2); 2/β at ω = 0 and |ω| at β = ∞."""
    w = abs(float(omega))
    if math.isinf(beta) and w > 0.0:
        return w
    if w == 0.0 or beta == 0.0 or math.isinf(beta):
        return safe_exp(log_g_coefficient(omega, beta))
    return w / math.tanh(beta * w / 2.0)


def log_g_coefficient(omega: float, beta: float) -> float:
    w = abs(float(omega))
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"beta must be >= 0, got {beta!r}")
    if w == 0.0:
        if math.isinf(beta):
            raise ValueError("g is undefined at omega = 0 and beta = inf")
        if beta == 0.0:
            return math.inf
        return math.log(2.0 / beta)
    if math.isinf(beta):
        return math.log(w)
    if beta == 0.0:
        return math.inf
    return math.log(w) + log_coth(beta * w / 2.0)


# ---------------------------------------------------------------------------
# block evaluation

@dataclasses.dataclass(frozen=True)
class _Block:
    p: int
    q: int
    r: int
    t: int
    s1: Side  # bath of the p-q and r-t edges
    s2: Side  # bath of the p-r and q-t edges
    det_pairs: tuple  # ((side, k, i), ...) of the four a-factors in detcoef
    det_exp: tuple  # (left exponent, right exponent) as functions of params


def _r_terms(b: _Block):
    p, q, r, t, s1, s2 = b.p, b.q, b.r, b.t, b.s1, b.s2
    a, g = "a", "g"
    return (
        ((g, s1, p, q), (a, s1, r, t), (a, s2, p, r)),
        ((a, s1, p, q), (g, s1, t, r), (a, s2, r, p)),
        ((g, s1, p, q), (a, s1, t, r), (a, s2, q, t)),
        ((a, s1, q, p), (g, s1, r, t), (a, s2, t, q)),
        ((a, s1, p, q), (g, s2, p, r), (a, s2, q, t)),
        ((a, s1, q, p), (a, s2, p, r), (g, s2, q, t)),
        ((a, s1, r, t), (g, s2, p, r), (a, s2, t, q)),
        ((a, s1, t, r), (g, s2, q, t), (a, s2, r, p)),
    )


class _Evaluator:
    def __init__(self, table, params, lam, beta_l, beta_r):
        if not (0 < beta_l < math.inf and 0 < beta_r < math.inf):
            raise ValueError("closed forms need finite, positive inverse temperatures (0 < T < inf)")
        self.table, self.params = table, params
        self.lam = float(lam)
        self.beta = {Side.LEFT: float(beta_l), Side.RIGHT: float(beta_r)}
        self.bath = {s: BathSpec(s, 1.0 / self.beta[s], self.lam) for s in Side}

    def omega(self, k, i):
        return frequency(self.table, self.params, k, i)

    def log_coef(self, kind, side, k, i):
        w = self.omega(k, i)
        if kind == "a":
            return log_a_coefficient(w, self.bath[side])
        return log_g_coefficient(w, self.beta[side])

    def block(self, b: _Block, coupling: float):
        log_r = logsumexp([sum(self.log_coef(*f) for f in term) for term in _r_terms(b)])
        x = 2.0 * coupling * (self.beta[Side.LEFT] - self.beta[Side.RIGHT])
        if x == 0.0:
            return log_r, NEG_INF, 0
        el, er = b.det_exp
        log_d = (
            sum(self.log_coef("a", s, k, i) for s, k, i in b.det_pairs)
            + self.beta[Side.LEFT] * el(self.params)
            + self.beta[Side.RIGHT] * er(self.params)
            + log_abs_2sinh(x)
        )
        return log_r, log_d, (1 if x > 0 else -1)


def _combine(lam, blocks):
    """Γ = −λ / Σ R/d in log form, plus per-block current per unit mass."""
    signs = {s for _, _, s in blocks}
    if 0 in signs:
        return NEG_INF, 0, [(NEG_INF, 0)] * len(blocks)
    (sign,) = signs  # every detcoef carries the same sinh factor
    log_sum = logsumexp([lr - ld for lr, ld, _ in blocks])
    log_gamma = math.log(lam) - log_sum
    per_mass = [(math.log(lam) + ld - lr, -sign) for lr, ld, _ in blocks]
    return log_gamma, -sign, per_mass


def _params(params: Mapping, keys: Sequence[str], optional: Mapping[str, float] = {}) -> dict:
    out = {}
    for k in keys:
        if k not in params:
            raise KeyError(f"missing parameter {k!r}")
        out[k] = float(params[k])
    for k, v in optional.items():
        out[k] = float(params.get(k, v))
    return out


def _signed(log_abs, sign):
    return sign * safe_exp(log_abs) if sign else 0.0


# ---------------------------------------------------------------------------
# N = 3

_N3_BLOCKS = (
    _Block(
        1, 2, 4, 6, Side.LEFT, Side.RIGHT,
        ((Side.LEFT, 2, 1), (Side.LEFT, 6, 4), (Side.RIGHT, 6, 2), (Side.RIGHT, 4, 1)),
        (
            lambda p: 2 * (p["h"] - p["Delta"] - p["delta"]),
            lambda p: 2 * (p["h"] + p["Delta"] + 2 * p["zeta"] - p["delta"]),
        ),
    ),
    _Block(
        5, 3, 8, 7, Side.RIGHT, Side.LEFT,
        ((Side.LEFT, 7, 3), (Side.LEFT, 8, 5), (Side.RIGHT, 5, 3), (Side.RIGHT, 8, 7)),
        (
            lambda p: 2 * (p["h"] + p["Delta"] + p["delta"]),
            lambda p: 2 * (p["h"] - p["Delta"] + 2 * p["zeta"] + p["delta"]),
        ),
    ),
)


@dataclasses.dataclass(frozen=True)
class CramerBlockN3:
    """Closed-form quantities of the three-site chain.

    Float fields may overflow or underflow; the ``log_*`` fields and signs
    are always meaningful. ``equilibrium`` is set when the sinh factor
    vanishes, in which case ``gamma_closed`` is 0 by continuity.
    """

    detcoef_1: float
    detcoef_2: float
    r_1: float
    r_2: float
    gamma_closed: float
    log_abs_detcoef: tuple
    detcoef_sign: int
    log_r: tuple
    log_abs_gamma: float
    gamma_sign: int
    gamma_per_mass: tuple
    equilibrium: bool


def cramer_n3(params: Mapping, lam: float, beta_l: float, beta_r: float) -> CramerBlockN3:
    """Closed-form Γ of the three-site chain (parameters h, zeta, Delta, delta, theta)."""
    p = _params(params, ("h", "zeta", "Delta", "delta", "theta"))
    ev = _Evaluator(N3_FREQUENCIES, p, lam, beta_l, beta_r)
    blocks = [ev.block(b, p["theta"]) for b in _N3_BLOCKS]
    log_gamma, sign, per_mass = _combine(ev.lam, blocks)
    d_sign = blocks[0][2]
    return CramerBlockN3(
        detcoef_1=_signed(blocks[0][1], d_sign),
        detcoef_2=_signed(blocks[1][1], d_sign),
        r_1=safe_exp(blocks[0][0]),
        r_2=safe_exp(blocks[1][0]),
        gamma_closed=_signed(log_gamma, sign),
        log_abs_detcoef=(blocks[0][1], blocks[1][1]),
        detcoef_sign=d_sign,
        log_r=(blocks[0][0], blocks[1][0]),
        log_abs_gamma=log_gamma,
        gamma_sign=sign,
        gamma_per_mass=tuple(_signed(lg, s) for lg, s in per_mass),
        equilibrium=d_sign == 0,
    )


# ---------------------------------------------------------------------------
# N = 4

def _n4_block(p, q, r, t, ex_l, ex_r):
    return _Block(
        p, q, r, t, Side.LEFT, Side.RIGHT,
        ((Side.LEFT, q, p), (Side.LEFT, t, r), (Side.RIGHT, t, q), (Side.RIGHT, r, p)),
        (ex_l, ex_r),
    )


def _el4(sd, st):
    return lambda p: 2 * (p["h"] + sd * (p["delta"] + p["Delta"]) + st * p["theta"])


def _er4(sd, sp):
    return lambda p: 2 * (p["h"] + 4 * p["zeta"] + sd * (p["delta"] - 3 * p["Delta"]) + sp * p["phi"])


_N4_BLOCKS = (
    _n4_block(1, 2, 5, 9, _el4(-1, -1), _er4(-1, -1)),
    _n4_block(3, 6, 10, 13, _el4(+1, -1), _er4(-1, +1)),
    _n4_block(4, 7, 11, 14, _el4(-1, +1), _er4(+1, -1)),
    _n4_block(8, 12, 15, 16, _el4(+1, +1), _er4(+1, +1)),
)


@dataclasses.dataclass(frozen=True)
class CramerBlockN4:
    """Closed-form quantities of the four-site chain, blocks A1..A4.

    ``x`` are the numerator sums of the blocks. They follow the three-site
    R template applied to each block's labels.
    """

    detcoef_a: tuple
    x: tuple
    gamma_closed: float
    log_abs_detcoef: tuple
    detcoef_sign: int
    log_x: tuple
    log_abs_gamma: float
    gamma_sign: int
    gamma_per_mass: tuple
    equilibrium: bool


def cramer_n4(params: Mapping, lam: float, beta_l: float, beta_r: float) -> CramerBlockN4:
    """Closed-form Γ of the four-site chain (h, zeta, Delta, delta, theta, phi, gamma)."""
    p = _params(params, ("h", "zeta", "Delta", "delta", "theta", "phi"), {"gamma": 0.0})
    ev = _Evaluator(N4_FREQUENCIES, p, lam, beta_l, beta_r)
    blocks = [ev.block(b, p["gamma"]) for b in _N4_BLOCKS]
    log_gamma, sign, per_mass = _combine(ev.lam, blocks)
    d_sign = blocks[0][2]
    return CramerBlockN4(
        detcoef_a=tuple(_signed(ld, d_sign) for _, ld, _ in blocks),
        x=tuple(safe_exp(lr) for lr, _, _ in blocks),
        gamma_closed=_signed(log_gamma, sign),
        log_abs_detcoef=tuple(ld for _, ld, _ in blocks),
        detcoef_sign=d_sign,
        log_x=tuple(lr for lr, _, _ in blocks),
        log_abs_gamma=log_gamma,
        gamma_sign=sign,
        gamma_per_mass=tuple(_signed(lg, s) for lg, s in per_mass),
        equilibrium=d_sign == 0,
    )


# ---------------------------------------------------------------------------

def _closed_form(params: Mapping) -> Callable:
    return cramer_n4 if "phi" in params else cramer_n3


def asymptotic_probe(params: Mapping, lam: float, fixed_side, T_sequence, T_fixed: float = 1.0, log: bool = False) -> list:
    """Closed-form Γ while one bath is cooled and the other held at ``T_fixed``.

    ``fixed_side`` names the bath whose temperature stays put. Returns
    ``(T, Γ)`` pairs, or ``(T, log|Γ|, sign)`` with ``log=True`` (useful
    once Γ underflows). Uses the four-site form when ``phi`` is among the
    parameters.
    """
    fixed = Side(fixed_side)
    temps = [float(t) for t in T_sequence]
    if any(b >= a for a, b in zip(temps, temps[1:])):
        raise ValueError("T_sequence must be strictly decreasing")
    if any(t <= 0 for t in temps):
        raise ValueError("closed forms need T > 0; use transport for exact T = 0")
    fn = _closed_form(params)
    out = []
    for t in temps:
        tl, tr = (T_fixed, t) if fixed is Side.LEFT else (t, T_fixed)
        blk = fn(params, lam, 1.0 / tl, 1.0 / tr)
        out.append((t, blk.log_abs_gamma, blk.gamma_sign) if log else (t, blk.gamma_closed))
    return out

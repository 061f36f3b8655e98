"""Stationary populations of the two-bath population dynamics.

Each 4-cycle is solved on its own. Its stationary distribution comes from
Kirchhoff's spanning-tree sums, which is Cramer's rule on the cycle's rate
matrix written so that every term is a product of rates. The cycle current
is (Π k⁺ − Π k⁻)/Z. Everything is kept in log form, so rates of e^-2000
and beyond still give meaningful currents. The affinity entering
Π k⁺ − Π k⁻ comes straight from the Bohr frequencies, which keeps
near-equilibrium currents free of cancellation.

Because interior spins are conserved, the global steady state is fixed only
after choosing how much probability sits in each cycle. The choice is made
by a normalization policy.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Mapping, Sequence

import numpy as np

from ._logmath import NEG_INF, log1mexp, logsumexp, safe_exp
from .bath import BathSpec, Side, log_rate, rate
from .exceptions import DegeneracyError, PolicyError
from .graph import FREQ_SNAP, Cycle, CycleDecomposition, TransitionGraph, build_graph, decompose_cycles
from .model import ChainSpec, SpinConfig

__all__ = [
    "PaperEqualCurrent",
    "EqualCycleMass",
    "InteriorDistribution",
    "parse_policy",
    "CycleSolution",
    "SteadyState",
    "solve_cycle",
    "assemble",
    "residual",
    "population_derivative",
]


# ---------------------------------------------------------------------------
# normalization policies

@dataclasses.dataclass(frozen=True)
class PaperEqualCurrent:
    """Cycle masses ∝ 1/(current per unit mass), so every cycle carries one Γ."""

    tag = "paper-equal-current"

    def __str__(self):
        return self.tag


@dataclasses.dataclass(frozen=True)
class EqualCycleMass:
    """Mass 2^-(N-2) in every cycle (maximally mixed interior spins)."""

    tag = "equal-cycle-mass"

    def __str__(self):
        return self.tag


@dataclasses.dataclass(frozen=True)
class InteriorDistribution:
    """Caller-chosen weights over interior configurations.

    ``weights`` is either a sequence indexed by the interior integer (bit 0
    = site 2) or a mapping from interior spin strings such as ``"+-"``
    (sites 2..N-1) to weights.
    """

    weights: tuple

    tag = "interior"

    def __init__(self, weights):
        if isinstance(weights, Mapping):
            weights = tuple(sorted(weights.items()))
        else:
            weights = tuple(float(w) for w in weights)
        object.__setattr__(self, "weights", weights)

    def masses(self, n_cycles: int, n_sites: int) -> np.ndarray:
        if self.weights and isinstance(self.weights[0], tuple):
            w = np.zeros(n_cycles)
            for key, value in self.weights:
                bits = SpinConfig.from_string(key).bits if isinstance(key, str) else tuple(key)
                if len(bits) != n_sites - 2:
                    raise PolicyError(f"interior key {key!r} must cover sites 2..{n_sites - 1}")
                w[SpinConfig.from_bits(bits).index if bits else 0] += float(value)
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.size != n_cycles:
                raise PolicyError(f"expected {n_cycles} interior weights, got {w.size}")
        if np.any(w < 0) or not np.isfinite(w).all() or w.sum() <= 0:
            raise PolicyError("interior weights must be finite, non-negative and not all zero")
        return w / w.sum()

    def __str__(self):
        if self.weights and isinstance(self.weights[0], tuple):
            body = ";".join(f"{k}:{v:.17g}" for k, v in self.weights)
        else:
            body = ";".join(f"{w:.17g}" for w in self.weights)
        return f"{self.tag}:{body}"


def parse_policy(text) -> object:
    """Policy object from a name: ``paper-equal-current``, ``equal-cycle-mass``
    or ``interior:w0;w1;...``."""
    if isinstance(text, (PaperEqualCurrent, EqualCycleMass, InteriorDistribution)):
        return text
    name = str(text).strip()
    key = name.lower().replace("_", "-")
    if key in ("paper-equal-current", "paper", "paperequalcurrent"):
        return PaperEqualCurrent()
    if key in ("equal-cycle-mass", "equal-mass", "equalcyclemass"):
        return EqualCycleMass()
    if key.startswith("interior:"):
        body = name.split(":", 1)[1]
        parts = [p for p in body.replace(",", ";").split(";") if p.strip()]
        return InteriorDistribution([float(p) for p in parts])
    raise ValueError(f"unknown policy {text!r}")


# ---------------------------------------------------------------------------
# per-cycle solution

@dataclasses.dataclass(frozen=True)
class CycleSolution:
    """Unit-mass stationary state of one cycle.

    ``populations`` follow the cycle's member order. ``gamma_per_mass`` is the
    current (positive circulation) per unit probability in the cycle;
    ``log_abs_gamma``/``gamma_sign`` hold it in log form, which survives
    underflow of the float value.
    """

    cycle: Cycle
    populations: np.ndarray
    gamma_per_mass: float
    log_abs_gamma: float
    gamma_sign: int
    log_populations: np.ndarray


def _bath_for(side: Side, left: BathSpec, right: BathSpec) -> BathSpec:
    return left if side is Side.LEFT else right


def _closed_classes(k: np.ndarray) -> list:
    """Closed communicating classes of a small rate matrix k[i, j] (i -> j)."""
    n = k.shape[0]
    reach = (k > 0) | np.eye(n, dtype=bool)
    for m in range(n):
        reach = reach | (reach[:, [m]] & reach[[m], :])
    classes = []
    seen = set()
    for i in range(n):
        if i in seen:
            continue
        cls = {j for j in range(n) if reach[i, j] and reach[j, i]}
        seen |= cls
        if all(not reach[a, b] or b in cls for a in cls for b in range(n)):
            classes.append(sorted(cls))
    return classes


def solve_cycle(cycle: Cycle, spec: ChainSpec | TransitionGraph, bath_left: BathSpec, bath_right: BathSpec) -> CycleSolution:
    g = spec if isinstance(spec, TransitionGraph) else build_graph(spec)
    p = cycle.positive_order
    sides, fwd, bwd, omegas = [], [], [], []
    for a, b in zip(p, p[1:] + p[:1]):
        side = g.side_of(a, b)
        bath = _bath_for(side, bath_left, bath_right)
        w = g.omega(a, b)
        sides.append(side)
        omegas.append(w)
        fwd.append(log_rate(w, bath))
        bwd.append(log_rate(-w, bath))

    # spanning trees of the ring: drop edge e, orient the remaining path to root r
    log_w = np.full(4, NEG_INF)
    for r in range(4):
        terms = []
        for e in range(4):
            path = [(e + 1 + k) % 4 for k in range(4)]  # node order along the path
            t = path.index(r)
            total = 0.0
            for pos in range(3):
                edge = path[pos]  # ring edge joining path[pos] and path[pos + 1]
                total += fwd[edge] if pos < t else bwd[edge]
            terms.append(total)
        log_w[r] = logsumexp(terms)
    log_z = logsumexp(log_w)
    if log_z == NEG_INF:
        k = np.zeros((4, 4))
        for e in range(4):
            k[e, (e + 1) % 4] = safe_exp(fwd[e])
            k[(e + 1) % 4, e] = safe_exp(bwd[e])
        classes = _closed_classes(k)
        names = [" / ".join(str(SpinConfig(g.n_sites, p[i])) for i in cls) for cls in classes]
        raise DegeneracyError(
            f"cycle interior={cycle.interior} has {len(classes)} closed classes: {names}",
            absorbing=names,
        )

    log_fwd, log_bwd = sum(fwd), sum(bwd)
    if log_fwd == NEG_INF or log_bwd == NEG_INF:
        if log_fwd == log_bwd:
            log_num, sign = NEG_INF, 0
        elif log_bwd == NEG_INF:
            log_num, sign = log_fwd, 1
        else:
            log_num, sign = log_bwd, -1
    else:
        # log(k+/k-) = omega/T edge by edge; the right steps release exactly
        # minus what the left steps release, so equal temperatures give 0
        tl, tr = bath_left.temperature, bath_right.temperature
        left_sum = sum(w for w, s in zip(omegas, sides) if s is Side.LEFT)
        if abs(left_sum) <= FREQ_SNAP * max(1.0, max(abs(w) for w in omegas)):
            left_sum = 0.0
        affinity = left_sum * (1.0 / tl - 1.0 / tr)
        if affinity > 0:
            log_num, sign = log_fwd + log1mexp(affinity), 1
        elif affinity < 0:
            log_num, sign = log_bwd + log1mexp(-affinity), -1
        else:
            log_num, sign = NEG_INF, 0

    log_pi = log_w - log_z
    log_gamma = log_num - log_z if sign else NEG_INF
    order = {idx: pos for pos, idx in enumerate(p)}
    member_pos = [order[i] for i in cycle.indices]
    log_pops = log_pi[member_pos]
    pops = np.exp(log_pops)
    return CycleSolution(
        cycle=cycle,
        populations=pops,
        gamma_per_mass=sign * safe_exp(log_gamma) if sign else 0.0,
        log_abs_gamma=log_gamma,
        gamma_sign=sign,
        log_populations=log_pops,
    )


# ---------------------------------------------------------------------------
# global assembly

@dataclasses.dataclass(frozen=True, eq=False)
class SteadyState:
    """Global stationary populations under a normalization policy.

    ``populations`` is indexed by config integer index. ``cycle_currents[c]``
    is Γ_c, the positive-circulation current of cycle ``c`` (in the
    decomposition order). ``log_abs_currents``/``current_signs`` carry the
    same numbers in log form.
    """

    spec: ChainSpec
    bath_left: BathSpec
    bath_right: BathSpec
    policy: object
    decomposition: CycleDecomposition
    solutions: tuple
    masses: np.ndarray
    populations: np.ndarray
    cycle_currents: np.ndarray
    log_abs_currents: np.ndarray
    current_signs: np.ndarray
    residual_norm: float

    @property
    def gamma(self) -> float:
        """Mean cycle current; the common Γ under :class:`PaperEqualCurrent`."""
        return float(np.mean(self.cycle_currents))

    @property
    def log_abs_gamma(self) -> float:
        """log|mean cycle current|, valid when the float value underflows."""
        signs = self.current_signs
        logs = self.log_abs_currents
        mask = signs != 0
        if not mask.any():
            return NEG_INF
        pos = logsumexp(logs[signs > 0])
        neg = logsumexp(logs[signs < 0])
        hi, lo = max(pos, neg), min(pos, neg)
        if lo == NEG_INF:
            total = hi
        elif hi == lo:
            return NEG_INF
        else:
            total = hi + log1mexp(hi - lo)
        return total - math.log(len(signs))

    @property
    def gamma_sign(self) -> int:
        signs, logs = self.current_signs, self.log_abs_currents
        pos = logsumexp(logs[signs > 0])
        neg = logsumexp(logs[signs < 0])
        return 0 if pos == neg else (1 if pos > neg else -1)

    @property
    def graph(self) -> TransitionGraph:
        return build_graph(self.spec)


def _gibbs_log_masses(g: TransitionGraph, decomposition: CycleDecomposition, T: float) -> np.ndarray:
    return np.array(
        [logsumexp([-g.energies[i] / T for i in cyc.indices]) for cyc in decomposition]
    )


def _log_masses(policy, sols: Sequence[CycleSolution], g, decomposition, left, right) -> np.ndarray:
    k = len(sols)
    if isinstance(policy, EqualCycleMass):
        return np.full(k, -math.log(k))
    if isinstance(policy, InteriorDistribution):
        with np.errstate(divide="ignore"):
            return np.log(policy.masses(k, g.n_sites))
    if not isinstance(policy, PaperEqualCurrent):
        raise PolicyError(f"unknown policy {policy!r}")

    signs = np.array([s.gamma_sign for s in sols])
    if not signs.any():
        # every cycle is current-free, so any masses satisfy the constraint
        if left.temperature == right.temperature and left.temperature > 0:
            lw = _gibbs_log_masses(g, decomposition, left.temperature)
            return lw - logsumexp(lw)
        return np.full(k, -math.log(k))
    if not signs.all():
        dead = [str(s.cycle.interior) for s in sols if s.gamma_sign == 0]
        raise PolicyError(
            "equal nonzero cycle currents are impossible: cycles with interior "
            f"{', '.join(dead)} carry no current"
        )
    if len(set(signs.tolist())) > 1:
        raise PolicyError("cycles circulate in opposite directions; equal currents impossible")
    inv = np.array([-s.log_abs_gamma for s in sols])
    return inv - logsumexp(inv)


def assemble(spec: ChainSpec, bath_left: BathSpec, bath_right: BathSpec, policy=None) -> SteadyState:
    policy = PaperEqualCurrent() if policy is None else parse_policy(policy)
    g = build_graph(spec)
    decomposition = decompose_cycles(g)
    sols = tuple(solve_cycle(c, g, bath_left, bath_right) for c in decomposition)
    log_m = _log_masses(policy, sols, g, decomposition, bath_left, bath_right)
    masses = np.exp(log_m)

    pops = np.zeros(g.energies.size)
    for m, lm, sol in zip(masses, log_m, sols):
        pops[list(sol.cycle.indices)] = np.exp(lm + sol.log_populations)
    log_currents = np.array(
        [lm + s.log_abs_gamma if s.gamma_sign and m > 0 else NEG_INF for m, lm, s in zip(masses, log_m, sols)]
    )
    signs = np.array([s.gamma_sign if lc > NEG_INF else 0 for s, lc in zip(sols, log_currents)])
    currents = np.array([sg * safe_exp(lc) if sg else 0.0 for sg, lc in zip(signs, log_currents)])
    res = float(np.max(np.abs(population_derivative(pops, g, bath_left, bath_right))))
    return SteadyState(
        spec=spec,
        bath_left=bath_left,
        bath_right=bath_right,
        policy=policy,
        decomposition=decomposition,
        solutions=sols,
        masses=masses,
        populations=pops,
        cycle_currents=currents,
        log_abs_currents=log_currents,
        current_signs=signs,
        residual_norm=res,
    )


def _rate_arrays(g: TransitionGraph, left: BathSpec, right: BathSpec):
    kl = np.array([rate(w, left) for w in g.left_omega])
    kr = np.array([rate(w, right) for w in g.right_omega])
    return kl, kr


def population_derivative(populations, spec: ChainSpec | TransitionGraph, bath_left: BathSpec, bath_right: BathSpec) -> np.ndarray:
    """Right-hand side dρ_jj/dt of the population master equation."""
    g = spec if isinstance(spec, TransitionGraph) else build_graph(spec)
    p = np.asarray(populations, dtype=float)
    kl, kr = _rate_arrays(g, bath_left, bath_right)
    # k[i] is the rate out of i towards its partner
    return (kl * p)[g.left_partner] - kl * p + (kr * p)[g.right_partner] - kr * p


def residual(state, spec: ChainSpec | None = None, bath_left: BathSpec | None = None, bath_right: BathSpec | None = None) -> float:
    """Max-norm of dρ/dt for a state (a :class:`SteadyState` or population array)."""
    if isinstance(state, SteadyState):
        spec = spec or state.spec
        bath_left = bath_left or state.bath_left
        bath_right = bath_right or state.bath_right
        pops = state.populations
    else:
        pops = state
    if spec is None or bath_left is None or bath_right is None:
        raise ValueError("spec and both baths are required for a bare population array")
    return float(np.max(np.abs(population_derivative(pops, spec, bath_left, bath_right))))

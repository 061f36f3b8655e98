"""Heat currents, bath-swap rectification and the perfect-diode locus.

Heat currents count energy entering the chain from a bath. In a steady
state each cycle carries a single current Γ_c, so the left current is
Σ_c Γ_c · (heat drawn from the left bath per turn). That per-turn heat is
4·Δ_{1,N} for every cycle, which is the origin of J = 2^N Γ Δ_{1,N}.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from ._logmath import NEG_INF
from .bath import BathSpec, Side, rate
from .exceptions import ContractError, NotApplicableError
from .graph import TransitionGraph, build_graph, cycle_energy_mismatch
from .model import ChainSpec
from .steadystate import SteadyState, assemble, parse_policy

__all__ = [
    "STATIONARY_TOL",
    "heat_current_left",
    "heat_current_right",
    "heat_current_from_populations",
    "TransportReport",
    "rectify",
    "current_law_check",
    "perfect_condition",
    "decay_diagnostic",
]

STATIONARY_TOL = 1e-10


def _check(state: SteadyState, spec: ChainSpec | None, bath: BathSpec | None, side: Side):
    if not isinstance(state, SteadyState):
        raise TypeError("expected a SteadyState")
    if spec is not None and spec != state.spec:
        raise ContractError("spec does not match the one the state was solved for")
    own = state.bath_left if side is Side.LEFT else state.bath_right
    if bath is not None and bath != own:
        raise ContractError(f"{side.value} bath does not match the one the state was solved for")
    if not state.residual_norm <= STATIONARY_TOL:
        raise ContractError(f"state is not stationary: residual {state.residual_norm:.3e} > {STATIONARY_TOL:g}")


def _right_step_sum(cycle, g: TransitionGraph) -> float:
    idx = cycle.indices
    return sum(
        g.omega(a, b) for a, b in zip(idx, idx[1:] + idx[:1]) if g.side_of(a, b) is Side.RIGHT
    )


def heat_current_left(state: SteadyState, spec: ChainSpec | None = None, bath_left: BathSpec | None = None) -> float:
    """Energy per unit time entering from the left bath."""
    _check(state, spec, bath_left, Side.LEFT)
    g = state.graph
    return float(sum(gc * cycle_energy_mismatch(c, g) for gc, c in zip(state.cycle_currents, state.decomposition)))


def heat_current_right(state: SteadyState, spec: ChainSpec | None = None, bath_right: BathSpec | None = None) -> float:
    """Energy per unit time leaving into the right bath; equals the left current."""
    _check(state, spec, bath_right, Side.RIGHT)
    g = state.graph
    return float(-sum(gc * _right_step_sum(c, g) for gc, c in zip(state.cycle_currents, state.decomposition))) + 0.0


def heat_current_from_populations(populations, spec: ChainSpec | TransitionGraph, bath: BathSpec) -> float:
    """tr[H 𝒟(ρ)] for a diagonal state, from edge-by-edge population flows.

    Independent of the cycle bookkeeping and valid for any populations,
    stationary or not. Positive when energy enters from ``bath``. Loses
    relative precision when the net current is far below the gross flows.
    """
    g = spec if isinstance(spec, TransitionGraph) else build_graph(spec)
    p = np.asarray(populations, dtype=float)
    partner = g.left_partner if bath.side is Side.LEFT else g.right_partner
    omega = g.left_omega if bath.side is Side.LEFT else g.right_omega
    k = np.array([rate(w, bath) for w in omega])
    # each jump j -> partner(j) releases omega[j] into the bath
    return float(-np.sum(k * p * omega))


@dataclasses.dataclass(frozen=True, eq=False)
class TransportReport:
    """Forward/reverse heat currents of one chain.

    ``j_left``/``j_right`` are the two boundary currents of the forward
    configuration (T_L, T_R) = (T_a, T_b). ``j_reverse`` is the current
    with the two temperatures exchanged.
    """

    j_left: float
    j_right: float
    j_forward: float
    j_reverse: float
    rectification_factor: float
    perfect: bool
    no_transport: bool
    forward: SteadyState
    reverse: SteadyState


def rectify(spec: ChainSpec, T_a: float, T_b: float, lam: float = 1.0, policy=None) -> TransportReport:
    if T_a == T_b:
        raise ValueError("rectification needs two different temperatures")
    policy = parse_policy(policy or "paper-equal-current")
    fwd = assemble(spec, BathSpec(Side.LEFT, T_a, lam), BathSpec(Side.RIGHT, T_b, lam), policy)
    rev = assemble(spec, BathSpec(Side.LEFT, T_b, lam), BathSpec(Side.RIGHT, T_a, lam), policy)
    jl, jr = heat_current_left(fwd), heat_current_right(fwd)
    jrev = heat_current_left(rev)
    big = max(abs(jl), abs(jrev))
    no_transport = big == 0.0
    factor = 0.0 if no_transport else abs(jl + jrev) / big
    perfect = (jl == 0.0) != (jrev == 0.0)
    return TransportReport(jl, jr, jl, jrev, factor, perfect, no_transport, fwd, rev)


def current_law_check(spec: ChainSpec, state: SteadyState) -> tuple:
    """(2^N·Γ·Δ_{1,N}, measured left current) with Γ the mean cycle current.

    Holds for any mass policy since every cycle moves 4·Δ_{1,N} per turn.
    """
    measured = heat_current_left(state, spec)
    n = spec.n_sites
    predicted = (2.0 ** n) * state.gamma * spec.coupling_between(1, n)
    scale = max(abs(predicted), abs(measured))
    if scale > 0 and abs(predicted - measured) > 1e-10 * scale:
        raise ContractError(f"current law violated: predicted {predicted!r}, measured {measured!r}")
    return predicted, measured


def perfect_condition(spec: ChainSpec) -> float:
    """γ_N − (h + γ_2 + … + γ_{N−1}); zero on the perfect-rectification locus."""
    p = dict(spec.params)
    if spec.name == "H3":
        gammas = [p["Delta"] + p["delta"], p["theta"]]
    elif spec.name == "H4":
        gammas = [p["Delta"] + p["delta"], p["theta"], p["gamma"]]
    elif spec.name == "generic":
        gammas = list(p["gammas"])
    else:
        raise NotApplicableError(
            f"perfect-rectification condition is defined for H3, H4 and generic presets, not {spec.name!r}"
        )
    if len(gammas) < 2:
        raise NotApplicableError("condition needs at least three sites")
    return float(gammas[-1] - (p["h"] + sum(gammas[:-1])))


def decay_diagnostic(spec: ChainSpec, T_hot: float, T_cold=(1e-1, 5e-2), lam: float = 1.0, policy=None) -> dict:
    """How fast Γ dies when either bath is cooled, from two cold temperatures.

    For each side the exponent is the slope of −ln|Γ| against 1/T_cold, so
    a larger value means faster vanishing. Entries for an exactly vanishing
    current are ``inf``.
    """
    policy = parse_policy(policy or "paper-equal-current")
    t1, t2 = T_cold
    out = {}
    for side in (Side.LEFT, Side.RIGHT):
        logs = []
        for t in (t1, t2):
            tl, tr = (t, T_hot) if side is Side.LEFT else (T_hot, t)
            st = assemble(spec, BathSpec(Side.LEFT, tl, lam), BathSpec(Side.RIGHT, tr, lam), policy)
            logs.append(st.log_abs_gamma)
        if NEG_INF in logs:
            slope = math.inf
        else:
            slope = -(logs[1] - logs[0]) / (1.0 / t2 - 1.0 / t1)
        out[side.value] = {"T": (t1, t2), "log_abs_gamma": tuple(logs), "exponent": slope}
    return out

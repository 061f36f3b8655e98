"""Boundary-flip transition graph and its decomposition into 4-state cycles.

The left bath can only flip site 1 and the right bath only site N, so the
interior spins 2..N-1 never change. Every interior configuration therefore
spans one closed 4-cycle

    c0 --L-- c1 --R-- c2 --L-- c3 --R-- c0

with c0 the member of lowest index (both boundary spins down). Cycles are
listed in that order. Cycle currents are counted positive for the opposite
circulation c0 -> c3 -> c2 -> c1 -> c0. In that direction, heat drawn from
the left bath per turn is ``4 Δ_{1,N}``.
"""

from __future__ import annotations

import dataclasses
from typing import Iterator, Sequence

import numpy as np

from .bath import Side
from .exceptions import DimensionError
from .model import ChainSpec, SpinConfig, energies

__all__ = [
    "flip",
    "TransitionGraph",
    "Cycle",
    "CycleDecomposition",
    "build_graph",
    "decompose_cycles",
    "cycle_energy_mismatch",
    "dump",
]

# Bohr frequencies below this fraction of the energy scale are exact zeros.
FREQ_SNAP = 1e-12


def flip(c: SpinConfig, site: int) -> SpinConfig:
    """Apply σˣ on a 1-based site to a basis state."""
    if not 1 <= site <= c.n_sites:
        raise DimensionError(f"site {site} outside 1..{c.n_sites}")
    return SpinConfig(c.n_sites, c.index ^ (1 << (site - 1)))


@dataclasses.dataclass(frozen=True, eq=False)
class TransitionGraph:
    """Partner maps of the two baths plus every edge's Bohr frequency.

    ``omega(i, j)`` is E_i - E_j, i.e. the energy released by the system
    in the jump i -> j. Frequencies are snapped to exactly zero when they
    vanish to round-off.
    """

    spec: ChainSpec
    energies: np.ndarray
    left_partner: np.ndarray
    right_partner: np.ndarray
    left_omega: np.ndarray
    right_omega: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.spec.n_sites

    def partner(self, index: int, side: Side) -> int:
        return int((self.left_partner if Side(side) is Side.LEFT else self.right_partner)[index])

    def omega(self, i: int, j: int) -> float:
        """Energy released in the jump i -> j (must be a graph edge)."""
        if self.left_partner[i] == j:
            return float(self.left_omega[i])
        if self.right_partner[i] == j:
            return float(self.right_omega[i])
        raise ValueError(f"{i} -> {j} is not a bath transition")

    def side_of(self, i: int, j: int) -> Side:
        if self.left_partner[i] == j:
            return Side.LEFT
        if self.right_partner[i] == j:
            return Side.RIGHT
        raise ValueError(f"{i} -> {j} is not a bath transition")

    def edges(self, side: Side) -> list:
        """Undirected edges ``(i, j, omega(i, j))`` with ``i < j``."""
        partner = self.left_partner if Side(side) is Side.LEFT else self.right_partner
        omega = self.left_omega if Side(side) is Side.LEFT else self.right_omega
        return [(i, int(partner[i]), float(omega[i])) for i in range(partner.size) if i < partner[i]]


def _snapped_differences(e: np.ndarray, partner: np.ndarray) -> np.ndarray:
    w = e - e[partner]
    scale = max(1.0, float(np.max(np.abs(e))))
    w[np.abs(w) <= FREQ_SNAP * scale] = 0.0
    return w


def build_graph(spec: ChainSpec) -> TransitionGraph:
    if spec.n_sites < 2:
        raise DimensionError("a two-bath chain needs at least 2 sites")
    e = np.array(energies(spec))
    idx = np.arange(e.size)
    left = idx ^ 1
    right = idx ^ (1 << (spec.n_sites - 1))
    return TransitionGraph(
        spec=spec,
        energies=e,
        left_partner=left,
        right_partner=right,
        left_omega=_snapped_differences(e, left),
        right_omega=_snapped_differences(e, right),
    )


@dataclasses.dataclass(frozen=True)
class Cycle:
    """Four configs [c0, L(c0), R(L(c0)), L(R(L(c0)))] sharing interior spins."""

    members: tuple
    interior: tuple

    def __iter__(self) -> Iterator[SpinConfig]:
        return iter(self.members)

    def __len__(self):
        return 4

    @property
    def indices(self) -> tuple:
        return tuple(c.index for c in self.members)

    @property
    def positive_order(self) -> tuple:
        """Indices in the direction of positive current: c0, c3, c2, c1."""
        i = self.indices
        return (i[0], i[3], i[2], i[1])


@dataclasses.dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple

    def __iter__(self):
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)

    @property
    def interior_signatures(self) -> list:
        return [c.interior for c in self.cycles]

    def cycle_of(self, index: int) -> int:
        """Position of the cycle containing a config index."""
        for k, cyc in enumerate(self.cycles):
            if index in cyc.indices:
                return k
        raise ValueError(f"config {index} not found")


def decompose_cycles(g: TransitionGraph) -> CycleDecomposition:
    n = g.n_sites
    cycles = []
    # c0 has both boundary spins down; the interior bits enumerate the cycles
    for interior in range(1 << (n - 2)):
        c0 = interior << 1
        c1 = int(g.left_partner[c0])
        c2 = int(g.right_partner[c1])
        c3 = int(g.left_partner[c2])
        assert int(g.right_partner[c3]) == c0
        members = tuple(SpinConfig(n, i) for i in (c0, c1, c2, c3))
        cycles.append(Cycle(members, members[0].bits[1:-1]))
    return CycleDecomposition(tuple(cycles))


def cycle_energy_mismatch(cycle: Sequence[SpinConfig] | Cycle, spec: ChainSpec | TransitionGraph) -> float:
    """Heat drawn from the left bath per turn of positive circulation.

    Computed as the energy released on the left-bath steps of the listed
    sequence. The value does not depend on which member the listing starts
    from. It equals 4·Δ_{1,N} for every chain.
    """
    g = spec if isinstance(spec, TransitionGraph) else build_graph(spec)
    idx = [c.index for c in cycle]
    if len(idx) != 4:
        raise ValueError("a cycle has exactly 4 members")
    total = 0.0
    for a, b in zip(idx, idx[1:] + idx[:1]):
        if g.side_of(a, b) is Side.LEFT:
            total += g.omega(a, b)
    if abs(total) <= FREQ_SNAP * max(1.0, float(np.max(np.abs(g.energies)))):
        return 0.0
    return total


def dump(g: TransitionGraph, decomposition: CycleDecomposition | None = None) -> str:
    """Text listing of cycles: member bitstrings, energies and edge frequencies."""
    decomposition = decomposition or decompose_cycles(g)
    lines = [f"# N={g.n_sites} cycles={len(decomposition)}"]
    for k, cyc in enumerate(decomposition):
        interior = "".join("+" if b else "-" for b in cyc.interior) or "(none)"
        lines.append(f"cycle {k} interior={interior} mismatch={cycle_energy_mismatch(cyc, g):.17g}")
        idx = cyc.indices
        for a, b in zip(idx, idx[1:] + idx[:1]):
            side = g.side_of(a, b).site_label
            ca, cb = SpinConfig(g.n_sites, a), SpinConfig(g.n_sites, b)
            lines.append(
                f"  {ca} -{side}-> {cb}  E={g.energies[a]:.17g}  omega={g.omega(a, b):.17g}"
            )
    return "\n".join(lines)

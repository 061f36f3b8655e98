"""Classical (σᶻ-diagonal) Ising chain Hamiltonians and their eigensystems.

The Hamiltonian is

    H = Σ_i h_i σᶻ_i + Σ_{i<k} Δ_{i,k} σᶻ_i σᶻ_k

which is diagonal in the product basis, so every spin configuration is an
eigenstate. Sites are 1-based in the public API. A configuration is encoded
by an integer whose bit ``i-1`` is 1 when site ``i`` points up.
"""

from __future__ import annotations

import dataclasses
import functools
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import DimensionError, PresetError, SizeError

__all__ = [
    "ChainSpec",
    "SpinConfig",
    "EigenSystem",
    "DEFAULT_MAX_SITES",
    "energy",
    "energies",
    "eigensystem",
    "preset",
    "PRESETS",
]

DEFAULT_MAX_SITES = 16


@dataclasses.dataclass(frozen=True, eq=False)
class ChainSpec:
    """Site count, local fields and the symmetric ZZ coupling table.

    Parameters
    ----------
    n_sites : int
    field : sequence of float
        ``field[i-1]`` is the magnetic field on site ``i``.
    coupling : mapping
        ``{(i, k): Δ_ik}`` with ``1 <= i < k <= n_sites``. Keys given as
        ``(k, i)`` are normalized; zero entries are dropped.
    name, params
        Preset provenance, kept for reporting. Ignored by ``==``.
    """

    n_sites: int
    field: tuple
    coupling: Mapping = dataclasses.field(default_factory=dict)
    name: str | None = None
    params: Mapping = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise DimensionError(f"n_sites must be >= 1, got {n}")
        field = tuple(float(x) for x in self.field)
        if len(field) != n:
            raise DimensionError(f"expected {n} field values, got {len(field)}")
        table = {}
        for key, value in dict(self.coupling).items():
            i, k = (int(key[0]), int(key[1]))
            if i > k:
                i, k = k, i
            if not (1 <= i < k <= n):
                raise DimensionError(f"coupling key {key!r} outside 1 <= i < k <= {n}")
            value = float(value) + table.get((i, k), 0.0)
            table[(i, k)] = value
        table = {key: table[key] for key in sorted(table) if table[key] != 0.0}
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coupling", MappingProxyType(table))
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return (
            self.n_sites == other.n_sites
            and self.field == other.field
            and dict(self.coupling) == dict(other.coupling)
        )

    def __hash__(self):
        return hash((self.n_sites, self.field, tuple(self.coupling.items())))

    def coupling_between(self, i: int, k: int) -> float:
        """Δ_{i,k} for 1-based sites, zero when absent."""
        if i > k:
            i, k = k, i
        return self.coupling.get((i, k), 0.0)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def describe(self) -> str:
        if self.name:
            args = ", ".join(f"{k}={v}" for k, v in self.params.items())
            return f"{self.name}({args})"
        return f"ChainSpec(N={self.n_sites})"


@dataclasses.dataclass(frozen=True, order=True)
class SpinConfig:
    """A σᶻ product state, stored as its integer index."""

    n_sites: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < (1 << self.n_sites):
            raise DimensionError(f"index {self.index} out of range for N={self.n_sites}")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SpinConfig":
        index = 0
        for pos, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bits must be 0/1, got {b!r}")
            index |= int(b) << pos
        return cls(len(bits), index)

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> "SpinConfig":
        return cls.from_bits([1 if s > 0 else 0 for s in spins])

    @classmethod
    def from_string(cls, text: str) -> "SpinConfig":
        """Parse ``"-+-"`` (also accepts ``"−"`` and ``"↑↓"``); site 1 first."""
        table = {"+": 1, "-": 0, "−": 0, "↑": 1, "↓": 0, "1": 1, "0": 0}
        try:
            return cls.from_bits([table[ch] for ch in text.strip()])
        except KeyError as exc:
            raise ValueError(f"cannot parse spin string {text!r}") from exc

    @property
    def bits(self) -> tuple:
        return tuple((self.index >> pos) & 1 for pos in range(self.n_sites))

    @property
    def spins(self) -> tuple:
        return tuple(2 * b - 1 for b in self.bits)

    def spin(self, site: int) -> int:
        """σᶻ eigenvalue of a 1-based site."""
        return 2 * ((self.index >> (site - 1)) & 1) - 1

    def __str__(self):
        return "".join("+" if b else "-" for b in self.bits)


@dataclasses.dataclass(frozen=True)
class EigenSystem:
    """All 2^N eigenstates in ascending energy (ties broken by config index)."""

    configs: tuple
    energies: np.ndarray

    @property
    def levels(self) -> list:
        return list(zip(self.configs, (float(e) for e in self.energies)))

    def __len__(self):
        return len(self.configs)

    def level_of(self, config: SpinConfig) -> int:
        """1-based position of ``config`` in the energy ordering."""
        return self.configs.index(config) + 1


def _spin_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return 2 * ((idx[:, None] >> np.arange(n)[None, :]) & 1) - 1


def _check_cap(spec: ChainSpec, max_sites: int):
    if spec.n_sites > max_sites:
        raise SizeError(f"N={spec.n_sites} exceeds the cap of {max_sites} sites")


@functools.lru_cache(maxsize=256)
def _energies_cached(spec: ChainSpec) -> np.ndarray:
    s = _spin_table(spec.n_sites).astype(float)
    e = np.zeros(1 << spec.n_sites)
    # same accumulation order as energy() so both agree bit for bit
    for i, h in enumerate(spec.field):
        e += h * s[:, i]
    for (i, k), v in spec.coupling.items():
        e += v * (s[:, i - 1] * s[:, k - 1])
    e.setflags(write=False)
    return e


def energies(spec: ChainSpec, max_sites: int = DEFAULT_MAX_SITES) -> np.ndarray:
    """Energy of every configuration, indexed by config integer index."""
    _check_cap(spec, max_sites)
    return _energies_cached(spec)


def energy(spec: ChainSpec, c: SpinConfig) -> float:
    if c.n_sites != spec.n_sites:
        raise DimensionError(f"config has {c.n_sites} sites, chain has {spec.n_sites}")
    s = c.spins
    e = 0.0
    for i, h in enumerate(spec.field):
        e += h * s[i]
    for (i, k), v in spec.coupling.items():
        e += v * float(s[i - 1] * s[k - 1])
    return e


def _sort_key(e: np.ndarray) -> np.ndarray:
    # ties within round-off count as exact degeneracies
    scale = max(1.0, float(np.max(np.abs(e)))) if e.size else 1.0
    return np.round(e / scale, 12)


def eigensystem(spec: ChainSpec, max_sites: int = DEFAULT_MAX_SITES) -> EigenSystem:
    e = energies(spec, max_sites)
    order = np.lexsort((np.arange(e.size), _sort_key(e)))
    configs = tuple(SpinConfig(spec.n_sites, int(i)) for i in order)
    return EigenSystem(configs, e[order].copy())


# ---------------------------------------------------------------------------
# presets

def _take(params: Mapping, required: Iterable[str], optional: Mapping[str, object]):
    params = dict(params)
    out = {}
    for key in required:
        if key not in params:
            raise PresetError(f"missing parameter {key!r}")
        out[key] = params.pop(key)
    for key, default in optional.items():
        out[key] = params.pop(key, default)
    if params:
        raise PresetError(f"unexpected parameter(s): {', '.join(sorted(params))}")
    return out


def _h1(p):
    p = _take(p, ("h", "Delta", "delta"), {})
    h, D, d = (float(p[k]) for k in ("h", "Delta", "delta"))
    return ChainSpec(3, (h, h, h), {(1, 2): D + d, (2, 3): D - d}, "H1", p)


def _h2(p):
    p = _take(p, ("h", "zeta", "Delta", "delta"), {})
    return _h3({**p, "theta": 0.0}, name="H2", keep=p)


def _h3(p, name="H3", keep=None):
    p = _take(p, ("h", "zeta", "Delta", "delta"), {"theta": 0.0})
    h, z, D, d, th = (float(p[k]) for k in ("h", "zeta", "Delta", "delta", "theta"))
    coupling = {(1, 2): D + d, (2, 3): -D + d, (1, 3): th}
    return ChainSpec(3, (h, h + z, h + 2 * z), coupling, name, keep if keep is not None else p)


def _h4(p):
    p = _take(p, ("h", "zeta", "Delta", "delta", "theta", "phi"), {"gamma": 0.0})
    h, z, D, d, th, ph, g = (
        float(p[k]) for k in ("h", "zeta", "Delta", "delta", "theta", "phi", "gamma")
    )
    coupling = {
        (1, 2): D + d,
        (2, 3): -D + d,
        (3, 4): -3 * D + d,
        (1, 3): th,
        (2, 4): ph,
        (1, 4): g,
    }
    return ChainSpec(4, (h, h + z, h + 2 * z, h + 4 * z), coupling, "H4", p)


def _generic(p):
    """Long-range family: site-1 bonds γ_2..γ_N on a doubling field staircase.

    Fields are h, h+ζ, h+2ζ, h+4ζ, ..., i.e. h_i = h + 2^(i-2) ζ for i >= 2,
    which reproduces the H3/H4 staircases. ``extra`` adds bonds not touching
    site 1.
    """
    p = _take(p, ("h", "zeta", "gammas"), {"extra": {}})
    h, z = float(p["h"]), float(p["zeta"])
    gammas = [float(g) for g in p["gammas"]]
    n = len(gammas) + 1
    if n < 2:
        raise PresetError("generic preset needs at least one coupling (gamma_2)")
    field = [h] + [h + (2 ** (i - 2)) * z for i in range(2, n + 1)]
    coupling = {(1, k): g for k, g in zip(range(2, n + 1), gammas)}
    for key, value in dict(p["extra"]).items():
        i, k = sorted((int(key[0]), int(key[1])))
        if i == 1:
            raise PresetError("extra couplings must not involve site 1 (use gammas)")
        coupling[(i, k)] = coupling.get((i, k), 0.0) + float(value)
    params = {"h": h, "zeta": z, "gammas": tuple(gammas)}
    if p["extra"]:
        params["extra"] = dict(p["extra"])
    return ChainSpec(n, tuple(field), coupling, "generic", params)


PRESETS = {"H1": _h1, "H2": _h2, "H3": _h3, "H4": _h4, "generic": _generic}
_PRESET_ALIASES = {k.lower(): k for k in PRESETS}


def preset(name: str, params: Mapping | None = None, **kwargs) -> ChainSpec:
    """Build one of the named chain Hamiltonians.

    ``H1``: uniform field, couplings Δ+δ and Δ−δ. ``H2``: field staircase
    h, h+ζ, h+2ζ with couplings Δ+δ and −Δ+δ. ``H3``: H2 plus θσᶻ₁σᶻ₃.
    ``H4``: four sites, fields h, h+ζ, h+2ζ, h+4ζ, nearest-neighbour bonds
    Δ+δ, −Δ+δ, −3Δ+δ, next-nearest θ (1,3) and φ (2,4), optional γ (1,4).
    ``generic``: see :func:`_generic`.

    Parameter names are ``h, zeta, Delta, delta, theta, phi, gamma``
    (``gammas`` for the generic family).
    """
    merged = {**(params or {}), **kwargs}
    key = _PRESET_ALIASES.get(str(name).lower())
    if key is None:
        raise PresetError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[key](merged)

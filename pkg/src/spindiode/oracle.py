"""Brute-force Lindblad oracle on the full operator space.

Nothing here assumes diagonal states or cycles. The generator is a dense
complex 4^N × 4^N matrix acting on row-major vectorized density matrices,
using vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ). Hard-capped at N = 6.

Jump operators follow the secular prescription. All boundary flips with
the same Bohr frequency ω > 0 are summed into one A(ω) that lowers the
energy by ω. With ``secular=False`` every flip gets its own operator
instead, which lets the diagonality of the steady sector be probed without
the grouping. Flips with ω = 0 go into a single Hermitian operator A(0)
whose rate is λT in both directions.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .bath import BathSpec, Side, rate
from .exceptions import RankAmbiguityError, SizeError, StabilityError
from .graph import FREQ_SNAP, build_graph, decompose_cycles
from .model import ChainSpec, energies

__all__ = [
    "MAX_SITES",
    "build_lindblad_operators",
    "superoperator",
    "apply_generator",
    "DenseSteadyState",
    "steady_state_dense",
    "state_with_masses",
    "evolve",
    "current_dense",
]

MAX_SITES = 6
GAP_RATIO = 1e6


def _cap(spec: ChainSpec):
    if spec.n_sites > MAX_SITES:
        raise SizeError(f"dense oracle is capped at N <= {MAX_SITES}, got N = {spec.n_sites}")


def build_lindblad_operators(spec: ChainSpec, side, secular: bool = True) -> list:
    """``(omega, A)`` pairs for one bath.

    Each A has ω > 0 and maps higher to lower energy. A final pair with
    ω = 0 is present when some flips are degenerate; its operator is
    Hermitian. Summing A + A† over the ω > 0 entries, plus the ω = 0
    operator, gives σˣ on the boundary site.
    """
    _cap(spec)
    side = Side(side)
    e = np.asarray(energies(spec))
    dim = e.size
    site_bit = 0 if side is Side.LEFT else spec.n_sites - 1
    scale = max(1.0, float(np.max(np.abs(e))))
    tol = FREQ_SNAP * scale

    dyads = []  # (omega > 0, high, low)
    zero = []
    for k in range(dim):
        i = k ^ (1 << site_bit)
        w = e[k] - e[i]
        if abs(w) <= tol:
            if k < i:
                zero.append((k, i))
        elif w > 0:
            dyads.append((float(w), k, i))

    groups: list = []
    for w, k, i in sorted(dyads):
        if secular and groups and w - groups[-1][0] <= tol:
            groups[-1][1].append((k, i))
        else:
            groups.append((w, [(k, i)]))

    ops = []
    for w, pairs in groups:
        a = np.zeros((dim, dim))
        for k, i in pairs:
            a[i, k] = 1.0
        ops.append((w, a))
    if zero:
        if secular:
            blocks = [zero]
        else:
            blocks = [[pair] for pair in zero]
        for block in blocks:
            a = np.zeros((dim, dim))
            for k, i in block:
                a[i, k] = a[k, i] = 1.0
            ops.append((0.0, a))
    return ops


def _dissipator_terms(spec: ChainSpec, bath: BathSpec, secular: bool):
    """(rate, A) channels of one bath."""
    out = []
    for w, a in build_lindblad_operators(spec, bath.side, secular):
        if w == 0.0:
            out.append((rate(0.0, bath), a))
        else:
            out.append((rate(w, bath), a))
            out.append((rate(-w, bath), a.T.copy()))
    return [(g, a) for g, a in out if g > 0.0]


def superoperator(spec: ChainSpec, bath_left: BathSpec, bath_right: BathSpec, secular: bool = True) -> np.ndarray:
    """Dense Lindblad generator (complex, 4^N × 4^N, row-major vec)."""
    _cap(spec)
    e = np.asarray(energies(spec))
    dim = e.size
    eye = np.eye(dim)
    h = np.diag(e)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for bath in (bath_left, bath_right):
        for g, a in _dissipator_terms(spec, bath, secular):
            ada = a.conj().T @ a
            gen += g * (np.kron(a, a.conj()) - 0.5 * np.kron(ada, eye) - 0.5 * np.kron(eye, ada.T))
    return gen


def apply_generator(gen: np.ndarray, rho: np.ndarray) -> np.ndarray:
    dim = rho.shape[0]
    return (gen @ rho.reshape(-1)).reshape(dim, dim)


@dataclasses.dataclass(frozen=True, eq=False)
class DenseSteadyState:
    """Null space of the generator.

    ``populations`` has one row per cycle: the unit-mass diagonal of the
    null-space state confined to that cycle. ``coherence_norm`` is the
    largest off-diagonal modulus over an orthonormal null basis. Unpacks as
    ``(populations, coherence_norm, nullspace_dim)``.
    """

    populations: np.ndarray
    coherence_norm: float
    nullspace_dim: int
    basis: np.ndarray
    singular_values: np.ndarray
    cycle_rank_ratio: float

    def __iter__(self):
        return iter((self.populations, self.coherence_norm, self.nullspace_dim))


def _refine(gen: np.ndarray, basis: np.ndarray, u: np.ndarray, s: np.ndarray, vh: np.ndarray, d: int, sweeps: int = 3) -> np.ndarray:
    """Mixed-precision iterative refinement of null vectors.

    Residuals are formed in extended precision and corrected with the
    pseudo-inverse from the double-precision SVD. This pushes the error
    below eps·‖L‖/σ_gap, which matters when slow modes sit close to the
    null space.
    """
    r = s.size - d
    if r == 0 or not np.finfo(np.longdouble).eps < np.finfo(np.float64).eps:
        return basis
    ur, sr, vr = u[:, :r], s[:r], vh[:r].conj().T
    gen_ext = gen.astype(np.clongdouble)
    v = basis.copy()
    for _ in range(sweeps):
        res = (gen_ext @ v.astype(np.clongdouble)).astype(complex)
        v = v - vr @ ((ur.conj().T @ res) / sr[:, None])
    q, _ = np.linalg.qr(v)
    return q


def _null_space(gen: np.ndarray, rtol: float):
    u, s, vh = np.linalg.svd(gen)
    n = s.size
    top = s[0] if s[0] > 0 else 1.0
    d = int(np.sum(s <= rtol * top))
    if d == 0:
        raise RankAmbiguityError("generator has no null space", singular_values=tuple(s[-8:]))
    above = s[n - d - 1] if d < n else top
    below = s[n - d]
    if below > 0 and above / below < GAP_RATIO:
        raise RankAmbiguityError(
            f"singular-value gap {above / below:.3g} below {GAP_RATIO:g} at null dimension {d}",
            singular_values=tuple(s[max(0, n - d - 4):]),
        )
    return _refine(gen, vh[n - d:].conj().T, u, s, vh, d), s


def steady_state_dense(spec: ChainSpec, bath_left: BathSpec, bath_right: BathSpec, secular: bool = True, rtol: float = 1e-10) -> DenseSteadyState:
    gen = superoperator(spec, bath_left, bath_right, secular)
    basis, s = _null_space(gen, rtol)
    dim = 1 << spec.n_sites
    mats = basis.T.reshape(-1, dim, dim)
    off = mats.copy()
    for m in off:
        np.fill_diagonal(m, 0.0)
    coherence = float(np.max(np.abs(off))) if off.size else 0.0

    diag = np.array([np.diag(m) for m in mats]).T  # dim × d
    decomposition = decompose_cycles(build_graph(spec))
    pops = np.zeros((len(decomposition), dim))
    worst = 0.0
    for c, cyc in enumerate(decomposition):
        idx = list(cyc.indices)
        u, sv, _ = np.linalg.svd(diag[idx, :])
        if sv[0] == 0:
            raise RankAmbiguityError(f"null space has no weight on cycle {c}")
        if sv.size > 1:
            worst = max(worst, float(sv[1] / sv[0]))
        v = u[:, 0] / np.sum(u[:, 0])
        pops[c, idx] = v.real
    return DenseSteadyState(pops, coherence, basis.shape[1], basis, s, worst)


def state_with_masses(result: DenseSteadyState, spec: ChainSpec, masses) -> np.ndarray:
    """Null-space density matrix with the given probability in each cycle.

    Built from the raw null basis, so any coherences it carries are kept.
    """
    dim = 1 << spec.n_sites
    decomposition = decompose_cycles(build_graph(spec))
    mats = result.basis.T.reshape(-1, dim, dim)
    diag = np.array([np.diag(m) for m in mats]).T
    mass_map = np.array([diag[list(c.indices), :].sum(axis=0) for c in decomposition])
    coef = np.linalg.lstsq(mass_map, np.asarray(masses, dtype=complex), rcond=None)[0]
    rho = np.tensordot(coef, mats, axes=1)
    return 0.5 * (rho + rho.conj().T)


def evolve(spec: ChainSpec, bath_left: BathSpec, bath_right: BathSpec, rho0, t_final: float, dt: float, secular: bool = True) -> np.ndarray:
    """Fixed-step classical RK4 integration of the master equation.

    The RK4 update is linear, so it is one matrix; many steps are taken by
    matrix powers. Raises StabilityError when ‖L‖₁·dt > 0.1 or the trace
    drifts by more than 1e-9.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    dim = 1 << spec.n_sites
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 must be {dim}x{dim}")
    if t_final < 0 or dt <= 0:
        raise ValueError("need t_final >= 0 and dt > 0")
    gen = superoperator(spec, bath_left, bath_right, secular)
    norm = float(np.linalg.norm(gen, 1))
    if norm * dt > 0.1:
        raise StabilityError(f"generator norm x dt = {norm * dt:.3g} > 0.1; reduce dt below {0.1 / norm:.3g}")

    def step_matrix(h):
        x = h * gen
        x2 = x @ x
        x3 = x2 @ x
        return np.eye(gen.shape[0]) + x + x2 / 2 + x3 / 6 + x3 @ x / 24

    n_steps = int(np.floor(t_final / dt + 1e-12))
    rest = t_final - n_steps * dt
    v = rho0.reshape(-1)
    if n_steps:
        v = np.linalg.matrix_power(step_matrix(dt), n_steps) @ v
    if rest > 0:
        v = step_matrix(rest) @ v
    rho = v.reshape(dim, dim)
    drift = abs(np.trace(rho) - np.trace(rho0))
    if drift > 1e-9:
        raise StabilityError(f"trace drift {drift:.3g} exceeds 1e-9")
    return rho


def _dissipate(spec, bath, rho, secular):
    out = np.zeros_like(rho, dtype=complex)
    for g, a in _dissipator_terms(spec, bath, secular):
        ad = a.conj().T
        ada = ad @ a
        out += g * (a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada))
    return out


def current_dense(rho, spec: ChainSpec, bath_left: BathSpec, bath_right: BathSpec, secular: bool = True) -> tuple:
    """(tr[H 𝒟_L(ρ)], −tr[H 𝒟_R(ρ)]): heat in from the left, out to the right."""
    _cap(spec)
    rho = np.asarray(rho, dtype=complex)
    h = np.diag(np.asarray(energies(spec)))
    jl = np.trace(h @ _dissipate(spec, bath_left, rho, secular)).real
    jr = -np.trace(h @ _dissipate(spec, bath_right, rho, secular)).real
    return float(jl), float(jr)

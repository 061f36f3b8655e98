"""Command-line front end: ``spindiode {solve,rectify,sweep,verify,inspect}``.

CSV output starts with the version line ``# spin-diode csv v1`` and writes
every number with 17 significant digits, so equal inputs give identical
bytes. Exit codes: 0 success, 1 verification failure, 2 configuration
error, 3 solver degeneracy.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analytic import cramer_n3, cramer_n4
from .bath import BathSpec, Side
from .config import ExperimentConfig, load_config
from .exceptions import ConfigError, DegeneracyError, PolicyError, SpinDiodeError
from .graph import build_graph, decompose_cycles, dump
from .model import ChainSpec, eigensystem
from .steadystate import PaperEqualCurrent, assemble, parse_policy, solve_cycle
from .transport import heat_current_left, heat_current_right, rectify

__all__ = ["main", "solve_row", "rectify_row", "run_checks", "Check"]

CSV_HEADER = "# spin-diode csv v1"
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3
ORACLE_MAX_SITES = 4


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _split(cfg: ExperimentConfig, overrides: dict):
    t_left = overrides.get("T_left", cfg.T_left)
    t_right = overrides.get("T_right", cfg.T_right)
    lam = overrides.get("lambda", cfg.lam)
    return cfg.spec(overrides), float(t_left), float(t_right), float(lam)


def _param_values(cfg: ExperimentConfig, overrides: dict) -> list:
    return [float(overrides.get(name, value)) for name, value in cfg.parameter_columns()]


def solve_header(cfg: ExperimentConfig) -> list:
    return ["N"] + [n for n, _ in cfg.parameter_columns()] + [
        "T_L", "T_R", "lambda", "policy", "Gamma", "J_left", "J_right", "residual"]


def rectify_header(cfg: ExperimentConfig) -> list:
    return ["N"] + [n for n, _ in cfg.parameter_columns()] + [
        "T_L", "T_R", "lambda", "policy", "J_forward", "J_reverse", "factor", "perfect"]


def solve_row(cfg: ExperimentConfig, overrides: dict | None = None) -> list:
    overrides = overrides or {}
    spec, tl, tr, lam = _split(cfg, overrides)
    st = assemble(spec, BathSpec(Side.LEFT, tl, lam), BathSpec(Side.RIGHT, tr, lam), cfg.policy)
    return [spec.n_sites, *_param_values(cfg, overrides), tl, tr, lam, str(cfg.policy),
            st.gamma, heat_current_left(st), heat_current_right(st), st.residual_norm]


def rectify_row(cfg: ExperimentConfig, overrides: dict | None = None) -> list:
    overrides = overrides or {}
    spec, tl, tr, lam = _split(cfg, overrides)
    rep = rectify(spec, tl, tr, lam, cfg.policy)
    return [spec.n_sites, *_param_values(cfg, overrides), tl, tr, lam, str(cfg.policy),
            rep.j_forward, rep.j_reverse, rep.rectification_factor, rep.perfect]


def _worker(args):
    kind, cfg, overrides = args
    try:
        return ("ok", (solve_row if kind == "solve" else rectify_row)(cfg, overrides))
    except SpinDiodeError as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


def _write_csv(stream, header, rows):
    stream.write(CSV_HEADER + "\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(x) for x in row) + "\n")


def _run_points(kind, cfg, points, jobs):
    tasks = [(kind, cfg, p) for p in points]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, tasks))
    else:
        results = [_worker(t) for t in tasks]
    for status, value in results:
        if status == "error":
            raise _PointError(value)
    return [value for _, value in results]


class _PointError(Exception):
    pass


# ---------------------------------------------------------------------------
# verification

@dataclasses.dataclass
class Check:
    name: str
    status: str  # PASS, FAIL, SKIP or N/A
    error: float = math.nan
    tolerance: float = math.nan
    detail: str = ""


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _log_rel(la, sa, lb, sb) -> float:
    if sa != sb:
        return math.inf
    if sa == 0:
        return 0.0
    return abs(math.expm1(la - lb))


def _judge(name, err, tol, detail=""):
    return Check(name, "PASS" if err <= tol else "FAIL", err, tol, detail)


def _analytic_check(label, spec, bl, br, scale):
    name = f"{label}: analytic vs numeric Gamma"
    p = dict(spec.params)
    if spec.name in ("H2", "H3") and spec.n_sites == 3:
        fn = cramer_n3
        p = {**p, "theta": p.get("theta", 0.0)}
    elif spec.name == "H4":
        fn = cramer_n4
    else:
        return Check(name, "N/A", detail="closed forms exist for the H2/H3 and H4 presets only")
    if bl.temperature == 0 or br.temperature == 0:
        return Check(name, "N/A", detail="closed forms need T > 0")
    blk = fn(p, bl.lam, bl.beta, br.beta)
    st = assemble(spec, bl, br, PaperEqualCurrent())
    err = _log_rel(blk.log_abs_gamma, blk.gamma_sign, st.log_abs_gamma, st.gamma_sign)
    return _judge(name, err, 1e-9 * scale, f"closed={blk.gamma_closed:.6e} numeric={st.gamma:.6e}")


def _oracle_checks(label, spec, bl, br, scale):
    from .oracle import steady_state_dense

    names = [f"{label}: null-space dimension", f"{label}: diagonality", f"{label}: oracle populations"]
    if spec.n_sites > ORACLE_MAX_SITES:
        return [Check(n, "SKIP", detail=f"oracle legs run for N <= {ORACLE_MAX_SITES}") for n in names]
    if bl.temperature == 0 or br.temperature == 0:
        return [Check(n, "SKIP", detail="oracle legs need T > 0") for n in names]
    try:
        res = steady_state_dense(spec, bl, br)
    except SpinDiodeError as exc:
        return [Check(n, "FAIL", detail=str(exc)) for n in names]
    expected = 1 << (spec.n_sites - 2)
    out = [Check(names[0], "PASS" if res.nullspace_dim == expected else "FAIL",
                 abs(res.nullspace_dim - expected), 0.0, f"dim={res.nullspace_dim} expected={expected}")]
    out.append(_judge(names[1], res.coherence_norm, 1e-10 * scale))
    g = build_graph(spec)
    err = 0.0
    for c, cyc in enumerate(decompose_cycles(g)):
        sol = solve_cycle(cyc, g, bl, br)
        err = max(err, float(np.max(np.abs(res.populations[c][list(cyc.indices)] - sol.populations))))
    out.append(_judge(names[2], err, 1e-8 * scale))
    return out


def _current_law_check(label, spec, bl, br, policy, scale):
    name = f"{label}: current law 2^N Gamma Delta_1N"
    try:
        st = assemble(spec, bl, br, policy)
    except PolicyError:
        st = assemble(spec, bl, br, "equal-cycle-mass")
    measured = heat_current_left(st)
    predicted = (2.0 ** spec.n_sites) * st.gamma * spec.coupling_between(1, spec.n_sites)
    return _judge(name, _rel(predicted, measured), 1e-10 * scale, f"J={measured:.6e}")


def _nn_check(seed, scale, count=60):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(3, 6))
        field = rng.uniform(-1, 1, n)
        coupling = {(i, i + 1): rng.uniform(-1, 1) for i in range(1, n)}
        spec = ChainSpec(n, field, coupling)
        tl, tr = rng.uniform(0.2, 3.0, 2)
        st = assemble(spec, BathSpec(Side.LEFT, tl), BathSpec(Side.RIGHT, tr), "equal-cycle-mass")
        g = build_graph(spec)
        wmax = max(np.max(np.abs(g.left_omega)), np.max(np.abs(g.right_omega)))
        worst = max(worst, abs(heat_current_left(st)) / wmax)
    return _judge(f"nearest-neighbour zero current ({count} random chains)", worst, 1e-12 * scale)


def _default_cases():
    base = dict(n_sites=None, fields=(), couplings={}, lam=1.0, policy=PaperEqualCurrent())
    return [
        ("H3", ExperimentConfig(preset="H3", params=dict(h=0.3, zeta=5.0, Delta=0.7, delta=0.2, theta=1.2),
                                T_left=2.0, T_right=1.0, **base)),
        ("H4", ExperimentConfig(preset="H4", params=dict(h=0.3, zeta=2.0, Delta=0.6, delta=0.25, theta=0.8,
                                                         phi=0.35, gamma=0.9),
                                T_left=1.5, T_right=0.7, **base)),
        ("N2", ExperimentConfig(preset=None, params={}, n_sites=2, fields=(0.4, 0.9), couplings={(1, 2): 0.3},
                                T_left=2.0, T_right=1.0, lam=1.0, policy=PaperEqualCurrent())),
        ("generic N=5", ExperimentConfig(preset="generic", params=dict(h=0.3, zeta=1.0, gammas=(0.5, -0.4, 0.7, 0.9)),
                                         T_left=2.0, T_right=0.8, **base)),
    ]


def run_checks(cfg: ExperimentConfig | None = None, seed: int = 0, tol_scale: float = 1.0) -> list:
    cases = [("config", cfg)] if cfg is not None else _default_cases()
    checks = []
    for label, c in cases:
        spec = c.spec()
        bl, br = BathSpec(Side.LEFT, c.T_left, c.lam), BathSpec(Side.RIGHT, c.T_right, c.lam)
        checks.append(_analytic_check(label, spec, bl, br, tol_scale))
        checks.extend(_oracle_checks(label, spec, bl, br, tol_scale))
        checks.append(_current_law_check(label, spec, bl, br, c.policy, tol_scale))
    checks.append(_nn_check(seed, tol_scale))
    return checks


def format_checks(checks) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  status  {'error':>10}  {'tolerance':>10}  detail"]
    for c in checks:
        err = "" if math.isnan(c.error) else f"{c.error:.3e}"
        tol = "" if math.isnan(c.tolerance) else f"{c.tolerance:.1e}"
        lines.append(f"{c.name.ljust(width)}  {c.status:<6}  {err:>10}  {tol:>10}  {c.detail}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration file")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--jobs", type=int, default=1, help="parallel worker processes for sweeps")
    common.add_argument("--seed", type=int, help="seed for randomized checks (overrides [run] seed)")
    common.add_argument("--policy", help="paper-equal-current, equal-cycle-mass or interior:w0;w1;...")

    parser = argparse.ArgumentParser(prog="spindiode", description="Two-bath quantum Ising chain heat transport.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="steady state and heat currents at one point")
    sub.add_parser("rectify", parents=[common], help="forward/reverse currents under bath exchange")
    sw = sub.add_parser("sweep", parents=[common], help="solve or rectify along the [sweep] axis")
    sw.add_argument("--mode", choices=("solve", "rectify"), default="solve")
    ver = sub.add_parser("verify", parents=[common], help="analytic and oracle cross-checks")
    ver.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance by this factor")
    sub.add_parser("inspect", parents=[common], help="eigensystem and cycle decomposition")
    return parser


def _load(args, required=True) -> ExperimentConfig | None:
    if not args.config:
        if required:
            raise ConfigError("--config is required for this command")
        return None
    cfg = load_config(args.config)
    if args.policy:
        try:
            cfg = cfg.with_overrides(policy=parse_policy(args.policy))
        except ValueError as exc:
            raise ConfigError(f"--policy: {exc}") from exc
    if args.seed is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(args, text: str):
    # keep stdout clean when it carries the CSV
    (sys.stderr if not args.out else sys.stdout).write(text + "\n")


def _cmd_rows(args, kind, sweep):
    cfg = _load(args)
    if sweep:
        if cfg.sweep is None:
            raise ConfigError(f"{args.config}: the sweep command needs a [sweep] section")
        points = [{cfg.sweep.parameter: float(v)} for v in cfg.sweep.values()]
    else:
        points = [{}]
    rows = _run_points(kind, cfg, points, args.jobs)
    header = solve_header(cfg) if kind == "solve" else rectify_header(cfg)
    buf = io.StringIO()
    _write_csv(buf, header, rows)
    _emit(args, buf.getvalue())
    spec = cfg.spec()
    if kind == "solve":
        last = rows[-1]
        _summary(args, f"{spec.describe()}: {len(rows)} point(s), policy {cfg.policy}; "
                       f"last Gamma={last[-4]:.6e} J_left={last[-3]:.6e} J_right={last[-2]:.6e}")
    else:
        last = rows[-1]
        _summary(args, f"{spec.describe()}: {len(rows)} point(s); last J_forward={last[-4]:.6e} "
                       f"J_reverse={last[-3]:.6e} factor={last[-2]:.6f} perfect={_fmt(last[-1])}")
    return EXIT_OK


def _cmd_verify(args):
    cfg = _load(args, required=False)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    checks = run_checks(cfg, seed, args.tol_scale)
    text = format_checks(checks) + "\n"
    failed = [c for c in checks if c.status == "FAIL"]
    text += f"{len(checks) - len(failed)}/{len(checks)} checks without failure\n"
    _emit(args, text)
    if args.out:
        sys.stdout.write(text)
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_inspect(args):
    cfg = _load(args)
    spec = cfg.spec()
    eig = eigensystem(spec)
    lines = [f"# {spec.describe()}", "# level config energy"]
    for k, (c, e) in enumerate(eig.levels, start=1):
        lines.append(f"{k} {c} {e:.17g}")
    if spec.n_sites >= 2:
        lines.append(dump(build_graph(spec)))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_rows(args, "solve", sweep=False)
        if args.command == "rectify":
            return _cmd_rows(args, "rectify", sweep=False)
        if args.command == "sweep":
            return _cmd_rows(args, args.mode, sweep=True)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_inspect(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _PointError as exc:
        msg = str(exc)
        print(f"solver error: {msg}", file=sys.stderr)
        return EXIT_DEGENERATE if msg.startswith(("DegeneracyError", "PolicyError")) else EXIT_CONFIG
    except (DegeneracyError, PolicyError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (SpinDiodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

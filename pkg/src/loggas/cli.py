"""Batch command-line front end.

Every command writes its outputs and a ``manifest.json`` into ``--out``.
Exit codes: 0 success, 1 numeric failure, 2 usage error. Settings resolve
as flags > ``--config`` file (``key = value`` lines) > defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import assumptions as A
from . import dynamics as D
from . import kernels as K
from . import pointfield as P
from . import samplers as S
from .errors import LoggasError, SubstepCapExceeded
from .io import Manifest, dump_json, read_manifest, write_rows, write_samples, write_trajectory
from .verify import SUITES, run_suite

WORKERS_ENV = "LOGGAS_WORKERS"


class UsageError(Exception):
    pass


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        w = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    if w < 1:
        raise UsageError(f"{WORKERS_ENV} must be >= 1")
    return w


def _pmap(fn, items: Sequence, min_parallel: int = 32) -> list:
    """Ordered map; parallel over processes when worth it. Results never depend on the worker count."""
    w = workers()
    if w == 1 or len(items) < min_parallel:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * w))))


# parser -------------------------------------------------------------------------------------

DEFAULTS = {
    "common": {"out": ".", "seed": 0, "format": "csv", "torus_size": None, "dry_run": False},
    "sample": {"ensemble": "ginibre", "n": 16, "beta": 2, "replicas": 1, "steps": 400, "burn_in": 200,
               "step_size": 0.5},
    "simulate": {"model": "dyson-periodic", "beta": 2.0, "n": 16, "R": None, "dt": 1e-4, "T": 0.5,
                 "record_every": 1, "eps": 1e-6, "max_substeps": 1024, "init": "stationary"},
    "correlation": {"kernel": "sine-finite", "beta": 2, "n": 16, "N": 4, "measure": "lebesgue", "points": None},
    "variance": {"kind": "periodic", "n": 16, "beta": 2, "width": 2.0, "N": 2, "r": [1.0]},
    "cluster": {"beta": 2, "n": 16, "grid_points": 64},
    "table": {"kind": "rotation", "ensemble": "ginibre", "N": 32, "replicas": 200, "family": "Ubar",
              "k_grid": [1, 2, 4, 8], "r_grid": [1, 2, 4], "r": [1, 2, 4, 8], "samples": 100},
    "verify": {"suite": "all"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _nonneg_float(s: str) -> float:
    v = float(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    common = _Parser(add_help=False, argument_default=sup)
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("--seed", type=_u64, help="64-bit seed (default 0)")
    common.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--resume", help="re-run the command recorded in a manifest and compare digests")
    common.add_argument("--dry-run", action="store_true", help="print the plan without computing")
    common.add_argument("--torus-size", type=_positive_int, help="torus size replacing 2^(4N) for N >= 3")

    p = _Parser(prog="loggas", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", parents=[common], argument_default=sup, help="draw ensemble samples")
    s.add_argument("--ensemble", choices=["ginibre", "circular", "circular-mcmc", "sine-window"])
    s.add_argument("--n", type=_positive_int, help="matrix size, torus size, or window level N")
    s.add_argument("--beta", type=int, choices=[1, 2, 4])
    s.add_argument("--replicas", type=_positive_int)
    s.add_argument("--steps", type=_positive_int, help="MCMC sweeps")
    s.add_argument("--burn-in", type=int, help="MCMC adaptation sweeps")
    s.add_argument("--step-size", type=_positive_float, help="initial MCMC step size")

    s = sub.add_parser("simulate", parents=[common], argument_default=sup, help="Euler-Maruyama trajectories")
    s.add_argument("--model", choices=list(D.MODELS))
    s.add_argument("--beta", type=_positive_float)
    s.add_argument("--n", type=_positive_int, help="particle count (also the torus size for dyson-periodic)")
    s.add_argument("--R", type=_positive_float, help="interaction cutoff")
    s.add_argument("--dt", type=_positive_float)
    s.add_argument("--T", type=_nonneg_float)
    s.add_argument("--record-every", type=_positive_int)
    s.add_argument("--eps", type=_positive_float, help="minimum gap triggering substeps")
    s.add_argument("--max-substeps", type=_positive_int)
    s.add_argument("--init", choices=["stationary", "lattice"])

    s = sub.add_parser("correlation", parents=[common], argument_default=sup, help="evaluate rho^n")
    s.add_argument("--kernel", choices=["sine", "sine-finite", "ginibre", "ginibre-finite", "ginibre-monomial",
                                        "ginibre-tail"])
    s.add_argument("--beta", type=int, choices=[1, 2, 4])
    s.add_argument("--n", type=_positive_int, help="torus size for sine-finite")
    s.add_argument("--N", type=_positive_int, help="particle number for finite Ginibre kernels")
    s.add_argument("--measure", choices=["lebesgue", "gaussian"])
    s.add_argument("--points", nargs="+", type=complex, help="points (complex literals allowed, e.g. 1+2j)")

    s = sub.add_parser("variance", parents=[common], argument_default=sup, help="variance identities")
    s.add_argument("--kind", choices=["periodic", "rotation", "decomposition"])
    s.add_argument("--n", type=_positive_int, help="torus size (periodic)")
    s.add_argument("--beta", type=int, choices=[1, 2, 4])
    s.add_argument("--width", type=_positive_float, help="bump half-width (periodic)")
    s.add_argument("--N", type=_positive_int, help="Ginibre particle number (decomposition)")
    s.add_argument("--r", type=_positive_float, nargs="+", help="disk radii")

    s = sub.add_parser("cluster", parents=[common], argument_default=sup, help="cluster function by three routes")
    s.add_argument("--beta", type=int, choices=[1, 2, 4])
    s.add_argument("--n", type=_positive_int, help="even torus size")
    s.add_argument("--grid-points", type=_positive_int)

    s = sub.add_parser("table", parents=[common], argument_default=sup, help="Monte Carlo and study tables")
    s.add_argument("--kind", choices=["assumption", "rotation", "drift", "bounds"])
    s.add_argument("--ensemble", choices=["ginibre", "sine"])
    s.add_argument("--N", type=_positive_int, help="particle number (ginibre) or window level (sine)")
    s.add_argument("--replicas", type=_positive_int)
    s.add_argument("--family", choices=["H", "U", "Ubar"])
    s.add_argument("--k-grid", type=float, nargs="+")
    s.add_argument("--r-grid", type=float, nargs="+")
    s.add_argument("--r", type=_positive_float, nargs="+", help="radii for the rotation table")
    s.add_argument("--samples", type=_positive_int, help="samples for the drift table")

    s = sub.add_parser("verify", parents=[common], argument_default=sup, help="run cross-check suites")
    s.add_argument("--suite", choices=list(SUITES) + ["all"])
    return p


def parse_config_file(path: str, parser: argparse.ArgumentParser, command: str) -> dict:
    """Parse ``key = value`` lines using the subcommand's argument types."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (t.strip() for t in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest not in actions or dest in ("config", "resume", "help"):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r} for {command}")
        act = actions[dest]
        conv = act.type or (lambda v: v)
        try:
            if isinstance(act, argparse._StoreTrueAction):
                out[dest] = val.lower() in ("1", "true", "yes", "on")
            elif act.nargs in ("+", "*"):
                out[dest] = [conv(v) for v in val.replace(",", " ").split()]
            else:
                out[dest] = conv(val)
        except (ValueError, argparse.ArgumentTypeError) as e:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {e}")
        if act.choices is not None:
            vals = out[dest] if isinstance(out[dest], list) else [out[dest]]
            if any(v not in act.choices for v in vals):
                raise UsageError(f"{path}:{lineno}: {key} must be one of {list(act.choices)}")
    return out


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    flags = vars(args).copy()
    command = flags.pop("command")
    file_cfg = parse_config_file(flags.pop("config"), parser, command) if "config" in flags else {}
    cfg = {**DEFAULTS["common"], **DEFAULTS[command], **file_cfg, **flags}
    cfg.pop("resume", None)
    return cfg


# commands -----------------------------------------------------------------------------------


def _sampler_spec(cfg: dict) -> S.SamplerSpec:
    if cfg["ensemble"] == "circular" and cfg["beta"] != 2:
        raise UsageError("--ensemble circular requires --beta 2; use circular-mcmc for beta 1 or 4")
    if cfg["burn_in"] > cfg["steps"]:
        raise UsageError("--burn-in must not exceed --steps")
    mc = S.MCMCOptions(steps=cfg["steps"], burn_in=cfg["burn_in"], step_size=cfg["step_size"])
    return S.SamplerSpec(cfg["ensemble"], cfg["n"], cfg["beta"], cfg["seed"], cfg["torus_size"], mc)


def _draw_points(job):
    spec, r = job
    return S.draw(spec, r).points


def cmd_sample(cfg: dict, out: Path, manifest: Manifest) -> int:
    spec = _sampler_spec(cfg)
    if spec.kind == "sine-window":
        S.default_torus_size(spec.n, spec.torus_size)
    if cfg["dry_run"]:
        print(f"sample: {cfg['replicas']} replicas of {spec.kind} n={spec.n} beta={spec.beta} seed={spec.seed}")
        return 0
    samples = _pmap(_draw_points, [(spec, r) for r in range(cfg["replicas"])])
    ext = "csv" if cfg["format"] == "csv" else "json"
    meta = {"spec": {k: v for k, v in cfg.items() if k not in ("out", "dry_run")},
            "rng": "numpy PCG64, SeedSequence(seed, spawn_key=(replica,))"}
    manifest.add(write_samples(out / f"samples.{ext}", samples, meta, cfg["format"]), out)
    return 0


def _initial_state(cfg: dict, sde: D.SdeConfig) -> tuple[np.ndarray, bool]:
    n = cfg["n"]
    rng = S.replica_rng(cfg["seed"], 2**32)
    if cfg["init"] == "lattice":
        if sde.is_complex:
            side = int(np.ceil(np.sqrt(n)))
            g = (np.arange(side) - (side - 1) / 2) * 1.5
            pts = (g[:, None] + 1j * g[None, :]).ravel()[:n]
            return pts, False
        return -n / 2 + np.arange(n) + 0.5, False
    if sde.model == "dyson-periodic":
        if cfg["beta"] == 2:
            return S.sample_circular_beta2(n, rng).points, True
        if cfg["beta"] in (1, 4):
            return S.sample_circular_mcmc(n, int(cfg["beta"]), rng)[0].points, True
        raise UsageError("stationary periodic starts need beta in {1, 2, 4}")
    if sde.model == "dyson-cutoff":
        # circular beta=2 points read on the line: approximately sine-process distributed in the bulk
        return S.sample_circular_beta2(n, rng).points, False
    return S.sample_ginibre(n, rng).points, sde.model == "ginibre-finite"


def cmd_simulate(cfg: dict, out: Path, manifest: Manifest) -> int:
    model = cfg["model"]
    if model in ("dyson-cutoff", "ginibre-a", "ginibre-b") and cfg["R"] is None:
        raise UsageError(f"--R is required for {model}")
    try:
        sde = D.SdeConfig(model=model, beta=cfg["beta"], R=cfg["R"], n=cfg["n"], dt=cfg["dt"], T=cfg["T"],
                          seed=cfg["seed"], eps=cfg["eps"], max_substeps=cfg["max_substeps"],
                          record_every=cfg["record_every"])
    except ValueError as e:
        raise UsageError(str(e))
    frames = sde.n_steps // sde.record_every + 1
    if cfg["dry_run"]:
        print(f"simulate: model={model} n={cfg['n']} dt={sde.dt} T={sde.T} steps={sde.n_steps} "
              f"frames={frames} record_every={sde.record_every} eps={sde.eps} max_substeps={sde.max_substeps}")
        return 0
    x0, stationary = _initial_state(cfg, sde)
    sde = D.SdeConfig(**{**sde.to_dict(), "stationary_start": stationary})
    traj = D.simulate_ensemble(sde, x0[None, :])[0]
    ext = "csv" if cfg["format"] == "csv" else "json"
    meta = {"config": sde.to_dict(), "seed": cfg["seed"], "scheme": "Euler-Maruyama with Brownian-bridge substeps",
            "stationary_start": stationary, "frames": int(traj.times.size), "aborted": traj.aborted,
            "diagnostics": {"min_gap": float(traj.min_gaps.min()) if traj.min_gaps.size else None,
                            "max_substeps_used": int(traj.substeps.max()) if traj.substeps.size else 1}}
    manifest.add(write_trajectory(out / f"trajectory.{ext}", traj.times, traj.states, meta, cfg["format"]), out)
    if traj.aborted:
        print("simulate: substep cap reached; partial trajectory written", file=sys.stderr)
        return 1
    return 0


def cmd_correlation(cfg: dict, out: Path, manifest: Manifest) -> int:
    if not cfg["points"]:
        raise UsageError("--points is required")
    kind = cfg["kernel"].replace("-", "_")
    pts = np.array(cfg["points"])
    if kind.startswith("sine"):
        if np.any(pts.imag != 0):
            raise UsageError("sine kernels take real points")
        pts = pts.real
        params = K.FiniteNParams(cfg["n"]) if kind == "sine_finite" else None
        spec = K.KernelSpec(kind, beta=cfg["beta"], params=params)
    else:
        spec = K.KernelSpec(kind, N=cfg["N"] if kind != "ginibre" else None,
                            measure="gaussian" if kind in ("ginibre_monomial", "ginibre_tail") else cfg["measure"])
    if cfg["dry_run"]:
        print(f"correlation: rho^{pts.size} for {spec.kind} ({spec.measure})")
        return 0
    val = P.rho_n(spec, pts)
    row = {"kernel": cfg["kernel"], "beta": spec.beta, "measure": spec.measure, "n_points": pts.size,
           "points": " ".join(map(str, cfg["points"])), "rho": val}
    manifest.add(write_rows(out / f"correlation.{cfg['format']}", [row], list(row), cfg["format"]), out)
    print(f"rho^{pts.size} = {val!r} ({spec.measure})")
    return 0


def cmd_variance(cfg: dict, out: Path, manifest: Manifest) -> int:
    kind = cfg["kind"]
    if cfg["dry_run"]:
        print(f"variance: kind={kind}")
        return 0
    rows = []
    if kind == "periodic":
        params = K.FiniteNParams(cfg["n"])
        w = cfg["width"]
        if w >= cfg["n"] / 2:
            raise UsageError("--width must be below n/2")
        from .verify import bump
        h = bump(w)
        vf = P.var_linear_stat_fourier(params, cfg["beta"], h)
        vd = P.var_linear_stat_direct(params, cfg["beta"], h, (-w, w))
        rows.append({"kind": kind, "n": cfg["n"], "beta": cfg["beta"], "width": w, "fourier": vf, "direct": vd})
    elif kind == "rotation":
        for r in cfg["r"]:
            N = max(1, int(round(2 * r * r)))
            v = P.var_rotation_statistic(N, r)
            rows.append({"kind": kind, "N": N, "r": r, "var": v, "var_over_r": v / r})
    else:
        for r in cfg["r"]:
            rep = P.var_decomposition_check(cfg["N"], P.h_r(r))
            rows.append({"kind": kind, "r": r, **{k: v for k, v in rep.items()}})
    cols = list(rows[0])
    manifest.add(write_rows(out / f"variance.{cfg['format']}", rows, cols, cfg["format"]), out)
    return 0


def cmd_cluster(cfg: dict, out: Path, manifest: Manifest) -> int:
    if cfg["n"] % 2:
        raise UsageError("--n must be even")
    if cfg["dry_run"]:
        print(f"cluster: beta={cfg['beta']} n={cfg['n']} points={cfg['grid_points']}")
        return 0
    p = K.FiniteNParams(cfg["n"])
    x = np.linspace(-cfg["n"] / 2, cfg["n"] / 2, cfg["grid_points"])
    b = cfg["beta"]
    c, q, f = K.cluster_TN_closed(b, p, x), K.cluster_TN_quaternion(b, p, x), K.cluster_TN_fourier(b, p, x)
    rows = [{"x": xi, "closed": ci, "quaternion": qi, "fourier": fi} for xi, ci, qi, fi in zip(x, c, q, f)]
    manifest.add(write_rows(out / f"cluster.{cfg['format']}", rows, ["x", "closed", "quaternion", "fourier"],
                            cfg["format"]), out)
    err = max(float(np.max(np.abs(c - q))), float(np.max(np.abs(c - f))))
    print(f"max route disagreement {err:.3e}")
    return 0 if err <= 1e-8 else 1


def _drift_samples(n_samples: int, seed: int, torus: int) -> tuple[list, list]:
    sine = [S.sample_circular_beta2(torus, S.replica_rng(seed, r)).points for r in range(n_samples)]
    pois = [S.sample_poisson_window(torus / 2, 1.0, S.replica_rng(seed, 10**6 + r)).points for r in range(n_samples)]
    return sine, pois


def drift_table(n_samples: int, seed: int, torus: int = 512, R0=(10, 20, 40), Rmax: float = 100.0) -> list[dict]:
    sine, pois = _drift_samples(n_samples, seed, torus)
    rows = []
    for name, samples in (("sine", sine), ("poisson", pois)):
        rep = D.drift_convergence_study(samples, R0, Rmax)
        for R0_, med in zip(rep["R0"], rep["median"]):
            rows.append({"ensemble": name, "R0": R0_, "Rmax": Rmax, "median_sup_oscillation": float(med),
                         "samples": n_samples})
    return rows


def _assumption_configs(cfg: dict):
    R = cfg["replicas"]
    if cfg["ensemble"] == "ginibre":
        confs = [S.sample_ginibre(cfg["N"], S.replica_rng(cfg["seed"], r)).points for r in range(R)]
        return confs, A.PlanarEmbedding(), A.PotentialPair("ginibre")
    n = S.default_torus_size(cfg["N"], cfg["torus_size"])
    emb = A.EmbeddingVarpi(cfg["N"], n)
    confs = [S.sample_sine_window(cfg["N"], S.replica_rng(cfg["seed"], r), n).points for r in range(R)]
    return confs, emb, A.PotentialPair("finite", 2.0, emb)


def cmd_table(cfg: dict, out: Path, manifest: Manifest) -> int:
    kind = cfg["kind"]
    if cfg["dry_run"]:
        print(f"table: kind={kind}")
        return 0
    fmt_ = cfg["format"]
    if kind == "assumption":
        confs, emb, pp = _assumption_configs(cfg)
        rows = []
        fams = [cfg["family"]]
        for fam in fams:
            if fam == "U":
                for ell in (1, 2):
                    for i in ((1,), (-1,)):
                        rows += A.mc_assumption_tables(confs, cfg["ensemble"], cfg["N"], emb, pp, fam, cfg["k_grid"],
                                                       cfg["r_grid"], ell=ell, i=i)
            else:
                rows += A.mc_assumption_tables(confs, cfg["ensemble"], cfg["N"], emb, pp, fam, cfg["k_grid"],
                                               cfg["r_grid"])
        manifest.add(write_rows(out / f"assumption_table.{fmt_}", rows, A.TABLE_COLUMNS, fmt_), out)
    elif kind == "rotation":
        rows = []
        for r in cfg["r"]:
            N = max(1, int(round(2 * r * r)))
            v = P.var_rotation_statistic(N, r)
            rows.append({"N": N, "r": r, "var": v, "var_over_r": v / r})
        manifest.add(write_rows(out / f"rotation_table.{fmt_}", rows, ["N", "r", "var", "var_over_r"], fmt_), out)
    elif kind == "drift":
        rows = drift_table(cfg["samples"], cfg["seed"], cfg["torus_size"] or 512)
        manifest.add(write_rows(out / f"drift_table.{fmt_}", rows, list(rows[0]), fmt_), out)
    else:
        rows = [{"N": N, "r": r, "M": P.M_N_r(N, r), "M_quadrature": P.M_N_r_quadrature(N, r),
                 "bound": P.M_bound(N, r)} for N in range(1, 9) for r in (0.5, 1.0, 2.0, 4.0)]
        for row in rows:
            row["margin"] = row["bound"] - abs(row["M"])
        manifest.add(write_rows(out / f"bounds_table.{fmt_}", rows, list(rows[0]), fmt_), out)
    return 0


def cmd_verify(cfg: dict, out: Path, manifest: Manifest) -> int:
    if cfg["dry_run"]:
        print(f"verify: suite={cfg['suite']}")
        return 0
    checks = run_suite(cfg["suite"], cfg["seed"])
    path = out / "verify_report.json"
    dump_json({"suite": cfg["suite"], "checks": checks, "all_pass": all(c["pass"] for c in checks)}, path)
    manifest.add([path], out)
    for c in checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}: {c['value']:.3e} {c['comparison']} {c['tolerance']:.1e}")
    return 0 if all(c["pass"] for c in checks) else 1


COMMANDS = {"sample": cmd_sample, "simulate": cmd_simulate, "correlation": cmd_correlation,
            "variance": cmd_variance, "cluster": cmd_cluster, "table": cmd_table, "verify": cmd_verify}


def _run(command: str, cfg: dict) -> tuple[int, Path, Optional[Path]]:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(command, {k: v for k, v in cfg.items() if k != "out"}, cfg["seed"], __version__)
    try:
        code = COMMANDS[command](cfg, out, manifest)
    except (LoggasError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"{command}: numeric failure: {e}", file=sys.stderr)
        if not cfg["dry_run"]:
            manifest.write(out, status="failed")
        return 1, out, None
    if cfg["dry_run"]:
        return code, out, None
    return code, out, manifest.write(out, status="ok" if code == 0 else "failed")


def _resume(manifest_path: str, out_override: Optional[str]) -> int:
    old = read_manifest(Path(manifest_path))
    cfg = dict(old["config"])
    cfg["out"] = out_override or str(Path(manifest_path).parent)
    code, out, _ = _run(old["command"], cfg)
    new = read_manifest(out / "manifest.json")
    before = {f["path"]: f["sha256"] for f in old["files"]}
    after = {f["path"]: f["sha256"] for f in new["files"]}
    mismatched = sorted(p for p in before if before[p] != after.get(p))
    for p in mismatched:
        print(f"digest mismatch: {p}", file=sys.stderr)
    return 1 if (mismatched or code) else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "resume", None):
            return _resume(args.resume, getattr(args, "out", None))
        cfg = resolve(args, parser)
        workers()
        code, _, _ = _run(args.command, cfg)
        return code
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except SubstepCapExceeded as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

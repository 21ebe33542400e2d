"""Command-line front end: ``resist-curve <command> ...``.

Every command writes its outputs plus ``manifest.json`` into ``--out``.
The manifest records the command, all parameters, input and output hashes;
``resist-curve rerun manifest.json --out DIR`` replays it and ``--check``
compares the new outputs byte for byte.

Exit codes: 0 success, 2 input error, 3 numerical or statistical failure,
4 flow blow-up.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import curvature_report
from .erg import monte_carlo_profile
from .errors import BlowUpDetected, FlowHalt, GraphError, NumericalError
from .experiments import er_sweep, hist_csv_rows, log_grid, sweep_csv_rows, zero_crossings, SWEEP_HEADER
from .flow import FlowTrajectory, integrate_flow, integrate_normalized_flow, snapshot_json
from .generators import ErgConfig
from .graph import laplacian
from .io import dumps_json, read_graph, write_csv, write_json
from .reference import COMPARISON_HEADER, comparison_table
from .resistance import ApproxConfig, EXACT_MAX_N, approx_effective_resistance, effective_resistance
from .trees import inclusion_report

log = logging.getLogger("resist_curve")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_BLOWUP = 0, 2, 3, 4


class CommandFailed(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _threads() -> int:
    raw = os.environ.get("RESIST_CURVE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pool_map():
    """A deterministic (order-preserving) map capped by RESIST_CURVE_THREADS."""
    k = _threads()
    if k == 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=k)
    return pool.map, pool


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Outputs:
    """Collects files written by a command, relative to the output dir."""

    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        self.paths: list[str] = []

    def csv(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.paths.append(name)

    def json(self, name, obj):
        write_json(obj, self.out / name)
        self.paths.append(name)


# -- commands ---------------------------------------------------------------

def cmd_compute(args, out: Outputs):
    g = read_graph(args.graph)
    if args.epsilon is not None or g.n > EXACT_MAX_N:
        prof = approx_effective_resistance(g, ApproxConfig(epsilon=args.epsilon or 0.1, seed=args.seed))
    else:
        prof = effective_resistance(g)
    rep = curvature_report(g, prof)
    if args.format == "json":
        out.json("curvature.json", rep.to_json(g))
    else:
        out.csv("nodes.csv", ("node", "p"), rep.node_rows())
        rows = [(i, j, w, q, k, kn) for (i, j, k, kn), w, q in zip(rep.link_rows(g), prof.link_omega, prof.relative)]
        out.csv("links.csv", ("i", "j", "omega", "relative", "kappa", "kappa_normalized"), rows)
    return {"n": g.n, "m": g.m, "beta": prof.beta, "exact": prof.exact}


def cmd_compare(args, out: Outputs):
    g = read_graph(args.graph)
    rows = comparison_table(g)
    out.csv("compare.csv", COMPARISON_HEADER, rows)
    return {"links": len(rows), "sandwich_ok": all(r[-1] for r in rows)}


def cmd_flow(args, out: Outputs):
    g = read_graph(args.graph)
    q0 = laplacian(g)
    times = np.linspace(0.0, args.t_end, args.samples)
    run = integrate_normalized_flow if args.normalized else integrate_flow
    code, traj = EXIT_OK, None
    try:
        traj = run(q0, args.t_end, sample_times=times, on_merge=args.on_merge, on_cone_exit=args.on_cone_exit)
    except FlowHalt as exc:
        traj = exc.trajectory or FlowTrajectory()
        code = EXIT_BLOWUP if isinstance(exc, BlowUpDetected) else EXIT_NUMERIC
        log.warning("flow halted: %s", exc)
        halt = type(exc).__name__
    else:
        halt = traj.halt_reason
    out.csv("trajectory.csv", FlowTrajectory.CSV_HEADER, traj.csv_rows())
    snaps = None if args.snapshot_times is None else [float(x) for x in args.snapshot_times.split(",")]
    if snaps is not None:
        out.json("snapshots.json", snapshot_json(traj, snaps))
    last = traj.samples[-1].t if traj.samples else None
    summary = {"halt_reason": halt, "halt_time": traj.halt_time, "last_t": last,
               "steps": traj.steps, "rejected": traj.rejected, "potential_monotone": traj.potential_monotone}
    out.json("flow_summary.json", summary)
    if code:
        raise CommandFailed(code, f"flow halted ({halt})")
    return summary


def cmd_erg(args, out: Outputs):
    cfg = ErgConfig(R=args.R, r=args.r, N=args.N, seed=args.seed)
    pmap, pool = _pool_map()
    try:
        run = monte_carlo_profile(cfg, args.samples, args.bins, map_fn=pmap, skip_failures=True)
    finally:
        if pool:
            pool.shutdown()
    for k in run.skipped:
        log.warning("erg sample %d skipped after a solver failure", k)
    if len(run.skipped) > 0.1 * args.samples:
        raise CommandFailed(EXIT_NUMERIC, f"{len(run.skipped)} of {args.samples} samples failed")
    out.csv("profile.csv", run.CSV_HEADER, run.csv_rows())
    summary = {
        "bulk_mean": run.bulk_mean(),
        "bulk_count": int(np.sum(run.D_over_r >= 2.0)),
        "nodes": int(len(run.p)),
        "skipped": list(run.skipped),
        "sup_model_deviation": float(np.nanmax(np.abs(run.bins.mean - run.model))),
    }
    out.json("erg_summary.json", summary)
    return summary


def cmd_er_sweep(args, out: Outputs):
    rhos = log_grid(args.rho_min, args.rho_max, args.rho_count)
    pmap, pool = _pool_map()
    try:
        rows = er_sweep(args.n, rhos, args.samples, args.seed, map_fn=pmap)
    finally:
        if pool:
            pool.shutdown()
    out.csv("sweep.csv", SWEEP_HEADER, sweep_csv_rows(rows))
    out.csv("p_histogram.csv", ("rho", "bin_lo", "bin_hi", "count"), hist_csv_rows(rows))
    return {"zero_crossings": zero_crossings(rows)}


def cmd_sample_trees(args, out: Outputs):
    g = read_graph(args.graph)
    rep = inclusion_report(g, args.samples, args.seed)
    out.json("inclusion.json", rep)
    if not rep["all_pass"]:
        raise CommandFailed(EXIT_NUMERIC, "some inclusion frequencies fall outside 3 sigma")
    return {"all_pass": True}


COMMANDS = {
    "compute": cmd_compute,
    "compare": cmd_compare,
    "flow": cmd_flow,
    "erg": cmd_erg,
    "er-sweep": cmd_er_sweep,
    "sample-trees": cmd_sample_trees,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resist-curve", description="Resistance curvature of graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("graph", help="edge list (.txt/.edges) or JSON graph")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compute", help="node and link curvature")
    common(p)
    p.add_argument("--epsilon", type=float, default=None, help="use sketched resistances with this accuracy")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("compare", help="Forman / resistance / Ollivier sandwich table")
    common(p)

    p = sub.add_parser("flow", help="integrate the resistance Ricci flow")
    common(p)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--samples", type=int, default=101, help="number of evenly spaced sample times")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--on-merge", choices=("halt", "merge"), default="halt")
    p.add_argument("--on-cone-exit", choices=("continue", "halt"), default="continue")
    p.add_argument("--snapshot-times", default=None, help="comma-separated sample times for full snapshots")

    p = sub.add_parser("erg", help="boundary profile of Euclidean random graphs")
    common(p, graph=False)
    p.add_argument("--R", type=float, default=4.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--N", type=float, default=800.0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--bins", type=int, default=40)

    p = sub.add_parser("er-sweep", help="mean link curvature across Erdos-Renyi densities")
    common(p, graph=False)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--rho-min", type=float, default=1e-5)
    p.add_argument("--rho-max", type=float, default=1.0)
    p.add_argument("--rho-count", type=int, default=40)
    p.add_argument("--samples", type=int, default=10)

    p = sub.add_parser("sample-trees", help="random spanning tree inclusion vs relative resistance")
    common(p)
    p.add_argument("--samples", type=int, default=100_000)

    p = sub.add_parser("rerun", help="replay a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--check", action="store_true", help="fail unless outputs match the manifest hashes")
    return ap


def _params(args) -> dict:
    skip = {"command", "out", "verbose", "manifest", "check"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run_command(command: str, params: dict, out_dir) -> tuple[int, dict]:
    """Run one command, write outputs and the manifest; returns (exit code, manifest)."""
    args = argparse.Namespace(**params)
    out = Outputs(Path(out_dir))
    inputs = {}
    if "graph" in params:
        inputs[str(params["graph"])] = _sha256(params["graph"])
    code, result, error = EXIT_OK, None, None
    try:
        result = COMMANDS[command](args, out)
    except CommandFailed as exc:
        code, error = exc.code, str(exc)
    manifest = {
        "command": command,
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "inputs": inputs,
        "outputs": {name: _sha256(out.out / name) for name in out.paths},
        "result": result,
        "exit_code": code,
        "error": error,
    }
    write_json(manifest, out.out / "manifest.json")
    return code, manifest


def rerun(manifest_path, out_dir, check: bool) -> int:
    man = json.loads(Path(manifest_path).read_text())
    for path, digest in man["inputs"].items():
        if not Path(path).exists() or _sha256(path) != digest:
            raise CommandFailed(EXIT_INPUT, f"input {path} is missing or changed since the manifest was written")
    code, new = run_command(man["command"], man["parameters"], out_dir)
    if check and new["outputs"] != man["outputs"]:
        bad = sorted(k for k in set(new["outputs"]) | set(man["outputs"])
                     if new["outputs"].get(k) != man["outputs"].get(k))
        raise CommandFailed(EXIT_NUMERIC, f"outputs differ from manifest: {', '.join(bad)}")
    return code


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "rerun":
            return rerun(args.manifest, args.out, args.check)
        code, man = run_command(args.command, _params(args), args.out)
        if man["error"]:
            print(f"error: {man['error']}", file=sys.stderr)
        elif man["result"] is not None:
            print(dumps_json(man["result"]))
        return code
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GraphError, ValueError, OSError) as exc:
        line = getattr(exc, "line", None)
        print(f"error: {exc}" + ("" if line is None or str(line) in str(exc) else f" (line {line})"), file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

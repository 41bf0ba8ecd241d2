"""Command line interface: scenario runner and per-kind shortcuts.

``tclab run config.json`` executes every scenario in the config and
writes one artifact per scenario plus a summary CSV.  The shortcut
subcommands (``epi``, ``decay``, ``flat``, ``calib``, ``split``) build a
one-scenario config from flags and run it the same way.  Exit codes:
0 all verdicts pass, 1 any verdict failed or a scenario errored, 2 the
config was malformed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError, ScenarioError
from .scenarios import (Scenario, load_config, run_scenario, render_artifact,
                        render_summary, artifact_name, summary_rows,
                        SUMMARY_COLUMNS)


def _ints(text: str) -> list:
    return [int(tok) for tok in text.split(",") if tok]


def _floats(text: str) -> list:
    return [float(tok) for tok in text.split(",") if tok]


def _add_common(sub):
    sub.add_argument("--out", default="out", help="artifact directory")
    sub.add_argument("--seed", type=int, default=None,
                     help="override scenario seeds")
    sub.add_argument("--quad-order", type=int, default=None,
                     help="quadrature order hint for surface families")
    sub.add_argument("--jobs", type=int, default=1,
                     help="scenarios to run in parallel")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tclab",
        description="numerical laboratory for currents near cones")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run every scenario in a JSON config")
    run.add_argument("config", help="path to the config file")
    _add_common(run)

    epi = subs.add_parser("epi", help="cone vs competitor gap ratios")
    epi.add_argument("--name", default="epi")
    epi.add_argument("--qs", type=_ints, default=[1, 2, 3])
    epi.add_argument("--ratios", type=_ints, default=[2, 3, 4])
    epi.add_argument("--amplitudes", type=_floats, default=[1e-3, 1e-2])
    epi.add_argument("--random", type=int, default=0)
    epi.add_argument("--lip-max", type=float, default=0.1)
    epi.add_argument("--eps-target", type=float, default=1e-2)
    _add_common(epi)

    decay = subs.add_parser("decay", help="mass profile decay envelopes")
    decay.add_argument("--name", default="decay")
    decay.add_argument("--family", choices=["extension", "ode"],
                       default="extension")
    decay.add_argument("--q", type=int, default=1)
    decay.add_argument("--mode", type=int, default=2)
    decay.add_argument("--amplitude", type=float, default=1e-2)
    decay.add_argument("--levels", type=int, default=8)
    decay.add_argument("--epsilon12", type=float, default=0.1)
    decay.add_argument("--alpha0", type=float, default=1.0)
    decay.add_argument("--cbar", type=float, default=0.0)
    decay.add_argument("--eps", type=float, default=0.5)
    decay.add_argument("--e0", type=float, default=1e-2)
    decay.add_argument("--r0", type=float, default=1.0)
    decay.add_argument("--budget", type=float, default=10.0)
    _add_common(decay)

    flat = subs.add_parser("flat", help="radial homotopy flat-gap bounds")
    flat.add_argument("--name", default="flat")
    flat.add_argument("--q", type=int, default=1)
    flat.add_argument("--mode", type=int, default=2)
    flat.add_argument("--amplitude", type=float, default=1e-2)
    flat.add_argument("--levels", type=int, default=6)
    flat.add_argument("--tnodes", type=int, default=12)
    _add_common(flat)

    calib = subs.add_parser("calib", help="mass comparison probes")
    calib.add_argument("--name", default="calib")
    calib.add_argument("--surface", choices=["disk", "sphere", "equator"],
                       default="disk")
    calib.add_argument("--omega", type=float, default=0.0)
    calib.add_argument("--probes", type=int, default=20)
    calib.add_argument("--eps", type=_floats, default=[0.05])
    calib.add_argument("--radius", type=float, default=1.0)
    calib.add_argument("--form-scale", type=float, default=1.0)
    _add_common(calib)

    split = subs.add_parser("split", help="plane clustering decomposition")
    split.add_argument("--name", default="split")
    split.add_argument("--qs", type=_ints, default=[1, 1])
    split.add_argument("--width", type=float, default=0.05)
    _add_common(split)

    return parser


def _shortcut_config(args) -> dict:
    seed = args.seed if args.seed is not None else 0
    if args.command == "epi":
        params = {"Q": args.qs, "ratios": args.ratios,
                  "amplitudes": args.amplitudes, "random": args.random,
                  "lip_max": args.lip_max, "eps_target": args.eps_target}
    elif args.command == "decay":
        params = {"family": args.family, "Q": args.q, "mode": args.mode,
                  "amplitude": args.amplitude, "levels": args.levels,
                  "epsilon12": args.epsilon12, "alpha0": args.alpha0,
                  "cbar": args.cbar, "eps": args.eps, "e0": args.e0,
                  "r0": args.r0, "budget": args.budget}
    elif args.command == "flat":
        params = {"Q": args.q, "mode": args.mode,
                  "amplitude": args.amplitude, "levels": args.levels,
                  "tnodes": args.tnodes}
    elif args.command == "calib":
        params = {"surface": args.surface, "omega": args.omega,
                  "probes": args.probes, "eps": args.eps,
                  "radius": args.radius, "form_scale": args.form_scale}
    else:
        params = {"Q": args.qs, "width": args.width}
    return {"scenarios": [{"name": args.name, "kind": args.command,
                           "seed": seed, "params": params}]}


def _apply_overrides(scenarios, seed, quad_order):
    out = []
    for k, sc in enumerate(scenarios):
        params = dict(sc.params)
        new_seed = sc.seed if seed is None else seed + k
        if quad_order is not None:
            params["quad_order"] = quad_order
        out.append(Scenario(name=sc.name, kind=sc.kind, seed=new_seed,
                            params=params))
    return out


def _format_summary(results) -> str:
    rows = [SUMMARY_COLUMNS]
    for row in summary_rows(results):
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append(f"{v:.6g}")
            else:
                cells.append(str(v))
        rows.append(tuple(cells))
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
             for r in rows]
    return "\n".join(lines)


def _execute(scenarios, out_dir: str, jobs: int) -> int:
    os.makedirs(out_dir, exist_ok=True)
    results = []
    failed_scenarios = []
    if jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_scenario, sc) for sc in scenarios]
            for sc, fut in zip(scenarios, futures):
                try:
                    results.append(fut.result())
                except ScenarioError as err:
                    failed_scenarios.append(sc)
                    results.append(None)
                    print(str(err), file=sys.stderr)
    else:
        for sc in scenarios:
            try:
                results.append(run_scenario(sc))
            except ScenarioError as err:
                failed_scenarios.append(sc)
                results.append(None)
                print(str(err), file=sys.stderr)

    ok_results = []
    any_fail = bool(failed_scenarios)
    for sc, res in zip(scenarios, results):
        if res is None:
            continue
        ok_results.append(res)
        path = os.path.join(out_dir, artifact_name(res))
        with open(path, "w", newline="") as fh:
            fh.write(render_artifact(res))
        if res.nfail:
            any_fail = True

    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        fh.write(render_summary(ok_results))
    print(_format_summary(ok_results))
    if failed_scenarios:
        names = ", ".join(sc.name for sc in failed_scenarios)
        print(f"errored scenarios: {names}", file=sys.stderr)
    return 1 if any_fail else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config) as fh:
                text = fh.read()
            scenarios = load_config(text)
        else:
            scenarios = load_config(_shortcut_config(args))
    except OSError as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return 2
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    scenarios = _apply_overrides(scenarios, args.seed, args.quad_order)
    try:
        return _execute(scenarios, args.out, args.jobs)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

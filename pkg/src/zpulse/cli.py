"""Command-line client for the synthesis service.

The CLI is a thin HTTP client: every subcommand builds a request from the
run configuration, sends it to the service, and writes the documented
artifacts.  By default the ASGI app is driven in-process (no server
needed); pass ``--server URL`` to talk to a running instance instead.

Exit codes: 0 success, 1 quantitative target missed, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import DEFAULT_CONFIG_TEXT, RunConfig, default_config, load_config
from .errors import ConfigError
from .problem import PROBLEM_NAMES

EXIT_OK = 0
EXIT_TARGET_MISSED = 1
EXIT_USAGE = 2

CHECKGRAD_THRESHOLD = 1e-5


class _RequestFailed(Exception):
    """Service rejected the request; message already printed."""


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # starlette's TestClient import warns about its httpx dependency;
        # irrelevant for our in-process transport use
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "problem", None):
        cfg.problem = args.problem
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "gate_time", None) is not None:
        from dataclasses import replace

        from .errors import InvalidParameterError

        try:
            cfg.schedule = replace(cfg.schedule, gate_time=args.gate_time)
        except InvalidParameterError as exc:
            raise ConfigError(f"--gate-time {args.gate_time}: {exc}") from exc
        if cfg.schedule.n_active <= 2:
            raise ConfigError(
                f"--gate-time {args.gate_time} leaves only {cfg.schedule.n_active} "
                "active samples; must exceed 2*buffer + 2*coarse_dt"
            )
    return cfg


def _out_dir(args, cfg: RunConfig) -> Path:
    out = args.out or os.environ.get("ZPULSE_OUT") or cfg.out_dir
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _base_payload(cfg: RunConfig) -> dict:
    return {
        "device": {
            "bus_freq_ghz": cfg.device.bus_freq,
            "qubit_freqs_ghz": list(cfg.device.qubit_freqs),
            "anharmonicities_ghz": list(cfg.device.anharmonicities),
            "couplings_ghz": list(cfg.device.couplings),
            "levels": list(cfg.device.dims.levels),
        },
        "schedule": {
            "gate_time_ns": cfg.schedule.gate_time,
            "coarse_dt_ns": cfg.schedule.coarse_dt,
            "fine_dt_ns": cfg.schedule.fine_dt,
            "buffer_ns": cfg.schedule.buffer,
            "filter_sigma_ns": cfg.schedule.filter_sigma,
        },
        "optimizer": {
            "target_fidelity": cfg.optimizer.target_fidelity,
            "max_iterations": cfg.optimizer.max_iterations,
            "restarts": cfg.optimizer.restarts,
            "init_scale_ghz": cfg.optimizer.init_scale,
            "init_anchor": cfg.optimizer.init_anchor,
            "grad_tol": cfg.optimizer.grad_tol,
            "stall_window": cfg.optimizer.stall_window,
            "stall_tol": cfg.optimizer.stall_tol,
            "box_min_ghz": cfg.bounds[0],
            "box_max_ghz": cfg.bounds[1],
        },
        "problem": cfg.problem,
        "seed": cfg.seed,
    }


def _post(client, endpoint: str, payload: dict):
    resp = client.post(endpoint, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise _RequestFailed(endpoint)
    return resp.json()


def cmd_optimize(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    with _client(args.server) as client:
        data = _post(client, "/optimize", _base_payload(cfg))

    io.write_pulse_csv(
        out / "pulse_coarse.csv",
        np.asarray(data["coarse"]["t_ns"]),
        np.asarray(
            [data["coarse"][f"delta_{q}_GHz"] for q in ("P", "S1", "S2")]
        ),
    )
    io.write_pulse_csv(
        out / "pulse_fine.csv",
        np.asarray(data["fine"]["t_ns"]),
        np.asarray([data["fine"][f"delta_{q}_GHz"] for q in ("P", "S1", "S2")]),
    )
    with open(out / "fidelity_trace.csv", "w") as fh:
        fh.write(io.TRACE_HEADER + "\n")
        for r in data["trace"]:
            fh.write(
                f"{r['restart']},{r['iteration']},{r['fidelity']:.17g},"
                f"{r['step_size']:.17g},{r['grad_norm']:.17g}\n"
            )
    with open(out / "optimize.log", "w") as fh:
        for r in data["trace"]:
            fh.write(
                f"restart={r['restart']} iter={r['iteration']} "
                f"phi={r['fidelity']:.12f} step={r['step_size']:.6g} "
                f"gnorm={r['grad_norm']:.6g}\n"
            )
    result = {
        "schema": io.RESULT_SCHEMA,
        "problem": data["problem"],
        "gate_time_ns": data["gate_time_ns"],
        "seed": data["seed"],
        "fidelity": data["fidelity"],
        "infidelity": data["infidelity"],
        "target_fidelity": data["target_fidelity"],
        "reached_target": data["reached_target"],
        "termination": data["termination"],
        "iterations": data["iterations"],
        "restarts_used": data["restarts_used"],
        "best_restart": data["best_restart"],
        "wall_time_s": data["wall_time_s"],
    }
    io.write_result_json(out / "result.json", result)
    print(
        f"{data['problem']}: fidelity {data['fidelity']:.6f} "
        f"(target {data['target_fidelity']}) after {data['iterations']} iterations, "
        f"{data['restarts_used']} restart(s); artifacts in {out}"
    )
    return EXIT_OK if data["reached_target"] else EXIT_TARGET_MISSED


def cmd_trajectory(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    try:
        times, samples = io.read_pulse_csv(args.pulse)
    except Exception as exc:
        print(f"error: cannot read pulse file {args.pulse}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = _base_payload(cfg)
    payload.pop("optimizer")
    payload.pop("problem")
    payload.pop("seed")
    payload["pulse"] = {
        "t_ns": times.tolist(),
        "delta_P_GHz": samples[0].tolist(),
        "delta_S1_GHz": samples[1].tolist(),
        "delta_S2_GHz": samples[2].tolist(),
    }
    payload["initial"] = args.initial
    payload["watch"] = [w.strip() for w in args.watch.split(",") if w.strip()]
    with _client(args.server) as client:
        data = _post(client, "/trajectory", payload)

    t = np.asarray(data["t_ns"])
    names = list(data["columns"].keys())
    with open(out / "trajectory.csv", "w") as fh:
        fh.write("t_ns," + ",".join(io.trajectory_column(n) for n in names) + "\n")
        cols = [data["columns"][n] for n in names]
        for m in range(len(t)):
            fh.write(",".join([f"{t[m]:.17g}"] + [f"{c[m]:.17g}" for c in cols]) + "\n")
    final = {n: data["columns"][n][-1] for n in names}
    summary = ", ".join(f"{io.trajectory_column(n)}={v:.6f}" for n, v in final.items())
    print(f"trajectory written to {out / 'trajectory.csv'}; final populations: {summary}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    if args.t_step <= 0 or args.t_max < args.t_min:
        print("error: empty gate-time range", file=sys.stderr)
        return EXIT_USAGE
    payload = _base_payload(cfg)
    payload.update(
        {
            "t_min_ns": args.t_min,
            "t_max_ns": args.t_max,
            "t_step_ns": args.t_step,
            "warm_start": not args.no_warm_start,
            "stop_after_feasible": args.stop_after,
        }
    )
    with _client(args.server) as client:
        data = _post(client, "/sweep", payload)

    from .experiments import SweepPoint

    points = [
        SweepPoint(
            gate_time=d["t_g_ns"],
            best_fidelity=d["best_fidelity"],
            restarts_used=d["restarts_used"],
            iterations=d["iterations_total"],
            warm_started=bool(d["warm_started"]),
        )
        for d in data["rows"]
    ]
    io.write_sweep_csv(out / "sweep.csv", points)
    minimal = data["minimal_feasible_ns"]
    if minimal is None:
        print(
            f"no gate time in [{args.t_min}, {args.t_max}] reached "
            f"fidelity {data['target_fidelity']}"
        )
        return EXIT_TARGET_MISSED
    print(f"minimal feasible gate time: {minimal} ns (target {data['target_fidelity']})")
    return EXIT_OK


def cmd_checkgrad(args) -> int:
    cfg = _load(args)
    payload = _base_payload(cfg)
    payload.pop("optimizer")
    payload.update(
        {
            "probes": args.probes,
            "fd_step": args.fd_step,
            "corrupt_adjoint": args.corrupt_adjoint,
        }
    )
    with _client(args.server) as client:
        data = _post(client, "/checkgrad", payload)
    err = data["max_rel_error"]
    print(
        f"max relative gradient error over {data['probes']} probes "
        f"(fd step {data['fd_step']:g}): {err:.3e}"
    )
    return EXIT_OK if err < CHECKGRAD_THRESHOLD else EXIT_TARGET_MISSED


def cmd_print_target(args) -> int:
    cfg = _load(args)
    with _client(args.server) as client:
        resp = client.get(f"/target/{cfg.problem}")
        if resp.status_code != 200:
            print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
            return EXIT_USAGE
        data = resp.json()
    print(f"{data['name']} on qubits {tuple(data['qubits'])} ({data['dim']}x{data['dim']}):")
    re_m = data["matrix_real"]
    im_m = data["matrix_imag"]
    for r in range(data["dim"]):
        cells = []
        for c in range(data["dim"]):
            val = complex(re_m[r][c], im_m[r][c])
            if val == 0:
                cells.append("   0  ")
            elif val.imag == 0:
                cells.append(f"{val.real:+5.1f} ")
            else:
                cells.append(f"{val.imag:+4.1f}i ")
        print("  [" + " ".join(cells) + "]")
    return EXIT_OK


def cmd_print_config(_args) -> int:
    print(DEFAULT_CONFIG_TEXT, end="")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, gate_time: bool = True):
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--seed", type=int, help="override [run] seed")
    p.add_argument("--out", help="output directory (or env ZPULSE_OUT)")
    p.add_argument("--server", help="URL of a running service (default: in-process)")
    p.add_argument(
        "--problem",
        choices=PROBLEM_NAMES,
        help="override [run] problem",
    )
    if gate_time:
        p.add_argument("--gate-time", type=float, help="override gate duration (ns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zpulse", description="Detuning-pulse synthesis for bus-coupled qubits"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="synthesize a gate pulse")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("trajectory", help="propagate a pulse and record populations")
    p.add_argument("pulse", help="pulse CSV (coarse or fine grid)")
    p.add_argument("--initial", default="0|110", help="initial basis label")
    p.add_argument(
        "--watch",
        default="0|110,0|101,1|100",
        help="comma-separated basis labels to record",
    )
    _add_common(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("sweep", help="speed-limit sweep over gate times")
    p.add_argument("--t-min", type=float, default=40.0)
    p.add_argument("--t-max", type=float, default=70.0)
    p.add_argument("--t-step", type=float, default=1.0)
    p.add_argument("--no-warm-start", action="store_true")
    p.add_argument(
        "--stop-after",
        type=int,
        default=None,
        help="stop this many points after the first feasible gate time",
    )
    _add_common(p, gate_time=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("checkgrad", help="validate gradients against finite differences")
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--fd-step", type=float, default=1e-6)
    p.add_argument(
        "--corrupt-adjoint",
        action="store_true",
        help="negative control: deliberately corrupt the filter adjoint",
    )
    _add_common(p)
    p.set_defaults(func=cmd_checkgrad)

    p = sub.add_parser("print-target", help="print the target unitary")
    _add_common(p, gate_time=False)
    p.set_defaults(func=cmd_print_target)

    p = sub.add_parser("print-config", help="print the default configuration file")
    p.set_defaults(func=cmd_print_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _RequestFailed:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

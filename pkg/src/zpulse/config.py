"""Flat key-value run configuration with [section] headers.

Grammar: blank lines and `#` comments are ignored; a line is either
`[section]` or `key = value`; values are scalars or comma-separated lists.
Sections: [device], [schedule], [optimizer], [run].  Every key is optional;
defaults reproduce the reference three-qubit experiment, so a bare
`optimize` run is the headline synthesis.  Parse and validation errors
carry the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .device import DeviceParams
from .errors import ConfigError, InvalidParameterError, ZPulseError
from .operators import SubsystemDims
from .optimize import OptimizerOptions
from .problem import DEFAULT_BOUNDS, PROBLEM_NAMES
from .schedule import ScheduleSpec

SECTIONS = ("device", "schedule", "optimizer", "run")

_DEVICE_KEYS = {
    "bus_freq_ghz",
    "qubit_freqs_ghz",
    "anharmonicities_ghz",
    "couplings_ghz",
    "levels",
}
_SCHEDULE_KEYS = {"gate_time_ns", "coarse_dt_ns", "fine_dt_ns", "buffer_ns", "filter_sigma_ns"}
_OPTIMIZER_KEYS = {
    "target_fidelity",
    "max_iterations",
    "restarts",
    "init_scale_ghz",
    "init_anchor",
    "grad_tol",
    "stall_window",
    "stall_tol",
    "box_min_ghz",
    "box_max_ghz",
}
_RUN_KEYS = {"problem", "seed", "out_dir"}


@dataclass
class RunConfig:
    """Validated configuration for one CLI/service invocation."""

    device: DeviceParams
    schedule: ScheduleSpec
    optimizer: OptimizerOptions
    bounds: tuple[float, float]
    problem: str = "ifredkin+"
    seed: int = 1234
    out_dir: str = "runs/latest"
    raw: dict = field(default_factory=dict, repr=False)


def _parse_lines(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {s: {} for s in SECTIONS}
    current: str | None = None
    for n, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {n}: malformed section header {raw_line.strip()!r}")
            name = line[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ConfigError(
                    f"line {n}: unknown section [{name}]; expected one of "
                    + ", ".join(f"[{s}]" for s in SECTIONS)
                )
            current = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw_line.strip()!r}")
        if current is None:
            raise ConfigError(f"line {n}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in sections[current]:
            raise ConfigError(f"line {n}: duplicate key {key!r} in [{current}]")
        sections[current][key] = (value, n)
    return sections


def _floats(value: str, n: int, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"line {n}: {key} expects comma-separated numbers") from exc


def _float(value: str, n: int, key: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"line {n}: {key} expects a number, got {value!r}") from exc


def _int(value: str, n: int, key: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"line {n}: {key} expects an integer, got {value!r}") from exc


def _check_keys(section: str, entries: dict, allowed: set):
    for key, (_, n) in entries.items():
        if key not in allowed:
            raise ConfigError(
                f"line {n}: unknown key {key!r} in [{section}]; allowed: "
                + ", ".join(sorted(allowed))
            )


def parse_config(text: str) -> RunConfig:
    sections = _parse_lines(text)
    dev = sections["device"]
    sch = sections["schedule"]
    opt = sections["optimizer"]
    run = sections["run"]
    _check_keys("device", dev, _DEVICE_KEYS)
    _check_keys("schedule", sch, _SCHEDULE_KEYS)
    _check_keys("optimizer", opt, _OPTIMIZER_KEYS)
    _check_keys("run", run, _RUN_KEYS)

    def line_of(entries, key):
        return entries[key][1] if key in entries else 0

    device_kwargs = {}
    if "bus_freq_ghz" in dev:
        device_kwargs["bus_freq"] = _float(*dev["bus_freq_ghz"], "bus_freq_ghz")
    if "qubit_freqs_ghz" in dev:
        device_kwargs["qubit_freqs"] = _floats(*dev["qubit_freqs_ghz"], "qubit_freqs_ghz")
    if "anharmonicities_ghz" in dev:
        device_kwargs["anharmonicities"] = _floats(
            *dev["anharmonicities_ghz"], "anharmonicities_ghz"
        )
    if "couplings_ghz" in dev:
        device_kwargs["couplings"] = _floats(*dev["couplings_ghz"], "couplings_ghz")
    if "levels" in dev:
        levels = _floats(*dev["levels"], "levels")
        if any(lv != int(lv) for lv in levels):
            raise ConfigError(f"line {line_of(dev, 'levels')}: levels must be integers")
        device_kwargs["dims"] = _guarded(
            lambda: SubsystemDims(tuple(int(lv) for lv in levels)),
            line_of(dev, "levels"),
        )
    device = _guarded(
        lambda: DeviceParams(**device_kwargs),
        min((n for _, n in dev.values()), default=0),
    )

    schedule_kwargs = {"gate_time": 56.0}
    key_map = {
        "gate_time_ns": "gate_time",
        "coarse_dt_ns": "coarse_dt",
        "fine_dt_ns": "fine_dt",
        "buffer_ns": "buffer",
        "filter_sigma_ns": "filter_sigma",
    }
    for key, attr in key_map.items():
        if key in sch:
            schedule_kwargs[attr] = _float(*sch[key], key)
    schedule = _guarded(
        lambda: ScheduleSpec(**schedule_kwargs),
        min((n for _, n in sch.values()), default=0),
    )
    # a meaningful optimization needs more than two free coarse samples
    if schedule.n_active <= 2:
        raise ConfigError(
            f"line {line_of(sch, 'gate_time_ns')}: schedule leaves only "
            f"{schedule.n_active} active samples; gate_time_ns must exceed "
            f"2*buffer + 2*coarse_dt = {2 * schedule.buffer + 2 * schedule.coarse_dt} ns"
        )

    opt_kwargs = {}
    if "target_fidelity" in opt:
        opt_kwargs["target_fidelity"] = _float(*opt["target_fidelity"], "target_fidelity")
    if "max_iterations" in opt:
        opt_kwargs["max_iterations"] = _int(*opt["max_iterations"], "max_iterations")
    if "restarts" in opt:
        opt_kwargs["restarts"] = _int(*opt["restarts"], "restarts")
    if "init_scale_ghz" in opt:
        opt_kwargs["init_scale"] = _float(*opt["init_scale_ghz"], "init_scale_ghz")
    if "init_anchor" in opt:
        opt_kwargs["init_anchor"] = opt["init_anchor"][0]
    if "grad_tol" in opt:
        opt_kwargs["grad_tol"] = _float(*opt["grad_tol"], "grad_tol")
    if "stall_window" in opt:
        opt_kwargs["stall_window"] = _int(*opt["stall_window"], "stall_window")
    if "stall_tol" in opt:
        opt_kwargs["stall_tol"] = _float(*opt["stall_tol"], "stall_tol")

    seed = _int(*run["seed"], "seed") if "seed" in run else 1234
    opt_kwargs["seed"] = seed
    optimizer = _guarded(
        lambda: OptimizerOptions(**opt_kwargs),
        min((n for _, n in opt.values()), default=0),
    )

    lo = _float(*opt["box_min_ghz"], "box_min_ghz") if "box_min_ghz" in opt else DEFAULT_BOUNDS[0]
    hi = _float(*opt["box_max_ghz"], "box_max_ghz") if "box_max_ghz" in opt else DEFAULT_BOUNDS[1]
    if lo >= hi:
        raise ConfigError(
            f"line {line_of(opt, 'box_min_ghz')}: empty detuning box [{lo}, {hi}]"
        )

    problem = run["problem"][0] if "problem" in run else "ifredkin+"
    if problem not in PROBLEM_NAMES:
        raise ConfigError(
            f"line {line_of(run, 'problem')}: unknown problem {problem!r}; "
            f"expected one of {', '.join(PROBLEM_NAMES)}"
        )
    out_dir = run["out_dir"][0] if "out_dir" in run else "runs/latest"

    return RunConfig(
        device=device,
        schedule=schedule,
        optimizer=optimizer,
        bounds=(lo, hi),
        problem=problem,
        seed=seed,
        out_dir=out_dir,
        raw={s: {k: v for k, (v, _) in entries.items()} for s, entries in sections.items()},
    )


def _guarded(builder, line: int):
    try:
        return builder()
    except (InvalidParameterError, ZPulseError) as exc:
        raise ConfigError(f"line {line}: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def default_config() -> RunConfig:
    return parse_config("")


DEFAULT_CONFIG_TEXT = """\
# zpulse run configuration (defaults shown; every key is optional)

[device]
bus_freq_ghz = 6.5
qubit_freqs_ghz = 7.5, 8.0, 8.5
anharmonicities_ghz = -0.2, -0.3, -0.4
couplings_ghz = 0.03, 0.045, 0.06
levels = 3, 3, 3, 3

[schedule]
gate_time_ns = 56.0
coarse_dt_ns = 1.0
fine_dt_ns = 0.1
buffer_ns = 4.0
filter_sigma_ns = 0.4

[optimizer]
target_fidelity = 0.9999
max_iterations = 2000
restarts = 20
init_scale_ghz = 0.3
init_anchor = resonance
grad_tol = 1e-9
stall_window = 0        # iterations; > 0 cuts restarts whose projected
stall_tol = 0.1         # time-to-target exceeds stall_window / stall_tol
box_min_ghz = -0.5
box_max_ghz = 3.5

[run]
problem = ifredkin+
seed = 1234
out_dir = runs/latest
"""

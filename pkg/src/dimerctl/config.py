"""TOML experiment configuration.

A complete example lives in ``configs/dimerization_example.toml``. Times are in
abstract model units (a sampling period of 10 ms is written ``ts = 0.01``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .controller import ControllerState
from .network import NetworkParams
from .ssa import SimulationConfig

KINDS = ("closed-loop-ssa", "open-loop-sweep", "moment-ode", "stability-report",
         "ergodicity-report", "full-paper-repro")

_REQUIRED = {
    "closed-loop-ssa": ("network", "controller", "simulation"),
    "open-loop-sweep": ("network", "sweep"),
    "moment-ode": ("network", "moments"),
    "stability-report": ("network", "controller"),
    "ergodicity-report": ("network",),
    "full-paper-repro": ("network", "controller", "simulation"),
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class SweepSettings:
    k1_values: tuple[float, ...]
    horizon: float = 50.0
    n_cells: int = 500
    sample_dt: float = 0.1
    burn_in: float = 0.5


@dataclass(frozen=True)
class MomentSettings:
    mode: str = "closed-loop"  # or "open-loop"
    t_final: float = 50.0
    dt: float = 1e-3
    variance: object = "replay"  # float, "zero", "replay" or a CSV path via variance_csv
    variance_csv: str | None = None
    x1: float = 0.0
    x2: float = 0.0
    i: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    output_dir: Path
    network: NetworkParams
    seed: int = 0
    controller: ControllerState | None = None
    simulation: SimulationConfig | None = None
    sweep: SweepSettings | None = None
    moments: MomentSettings | None = None
    v_star: float | None = None
    trace_csv: str | None = None
    grid_bound: int = 200
    tail_fraction: float = 1.0 / 3.0
    source: dict = field(default_factory=dict, compare=False)


def load_config(path, *, kind=None, seed=None, n_cells=None, output_dir=None) -> ExperimentConfig:
    try:
        raw = tomllib.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    return parse_config(raw, kind=kind, seed=seed, n_cells=n_cells, output_dir=output_dir,
                        base_dir=Path(path).parent)


def parse_config(raw: dict, *, kind=None, seed=None, n_cells=None, output_dir=None,
                 base_dir=Path(".")) -> ExperimentConfig:
    """Validate a raw mapping; every problem found is reported at once."""
    problems: list[str] = []
    kind = kind or raw.get("kind")
    if kind not in KINDS:
        raise ConfigError([f"kind must be one of {KINDS}, got {kind!r}"])
    for section in _REQUIRED[kind]:
        if section not in raw:
            problems.append(f"[{section}] section is required for kind {kind!r}")
    if problems:
        raise ConfigError(problems)

    def build(label, fn):
        try:
            return fn()
        except (TypeError, ValueError, KeyError) as exc:
            problems.append(f"[{label}] {exc}")
            return None

    seed = int(seed if seed is not None else raw.get("seed", 0))
    out = Path(output_dir or raw.get("output_dir", f"out/{kind}"))

    net = raw.get("network", {})
    network = build("network", lambda: NetworkParams(
        float(net.get("k1", 0.0)), float(net["b"]), float(net["gamma1"]),
        float(net["gamma2"])).require_positive())

    controller = None
    if "controller" in raw:
        c = raw["controller"]
        ts = float(raw.get("simulation", {}).get("ts", c.get("ts", 0.01)))
        controller = build("controller", lambda: ControllerState(
            float(c.get("integrator0", 0.0)), float(c["kc"]), float(c["mu"]), ts))

    simulation = None
    if "simulation" in raw:
        s = raw["simulation"]
        simulation = build("simulation", lambda: SimulationConfig(
            n_cells=int(n_cells if n_cells is not None else s["n_cells"]),
            t_final=float(s["t_final"]), ts=float(s["ts"]), seed=seed,
            initial_states=s.get("initial_states", "random01"),
            record_cell=s.get("record_cell", 0)))

    sweep = None
    if "sweep" in raw:
        w = raw["sweep"]

        def make_sweep():
            values = tuple(float(v) for v in w["k1_values"])
            if any(v < 0 for v in values) or list(values) != sorted(values):
                raise ValueError("k1_values must be nonnegative and sorted")
            return SweepSettings(values, float(w.get("horizon", 50.0)),
                                 int(n_cells if n_cells is not None else w.get("n_cells", 500)),
                                 float(w.get("sample_dt", 0.1)), float(w.get("burn_in", 0.5)))
        sweep = build("sweep", make_sweep)

    moments = None
    if "moments" in raw:
        m = raw["moments"]

        def make_moments():
            ms = MomentSettings(**m)
            if ms.mode not in ("closed-loop", "open-loop"):
                raise ValueError(f"mode must be 'closed-loop' or 'open-loop', got {ms.mode!r}")
            if not ms.dt > 0 or not ms.t_final > 0:
                raise ValueError("dt and t_final must be > 0")
            if ms.variance_csv is not None:
                ms = replace(ms, variance_csv=str(base_dir / ms.variance_csv))
            elif isinstance(ms.variance, str):
                if ms.variance not in ("zero", "replay"):
                    raise ValueError(f"variance must be a number, 'zero' or 'replay'")
                if ms.variance == "replay" and kind == "moment-ode":
                    raise ValueError("variance='replay' needs variance_csv for kind moment-ode")
            elif not float(ms.variance) >= 0:
                raise ValueError("variance must be >= 0")
            if ms.mode == "closed-loop" and controller is None:
                raise ValueError("closed-loop mode needs a [controller] section")
            return ms
        moments = build("moments", make_moments)

    st = raw.get("stability", {})
    v_star = st.get("v_star")
    if v_star is not None and not float(v_star) >= 0:
        problems.append("[stability] v_star must be >= 0")
    trace_csv = st.get("trace_csv")
    if trace_csv is not None:
        trace_csv = str(base_dir / trace_csv)
    tail_fraction = float(st.get("tail_fraction", 1.0 / 3.0))
    if not 0 < tail_fraction <= 1:
        problems.append("[stability] tail_fraction must be in (0, 1]")
    grid_bound = int(raw.get("ergodicity", {}).get("grid_bound", 200))
    if grid_bound < 10:
        problems.append("[ergodicity] grid_bound must be >= 10")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(kind, out, network, seed, controller, simulation, sweep, moments,
                            None if v_star is None else float(v_star), trace_csv, grid_bound,
                            tail_fraction, raw)

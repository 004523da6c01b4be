"""Command-line front end.

Subcommands ``table``, ``shapes``, ``curve``, ``feasibility`` and
``simulate``.  Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import core, dynamics, kernel, write_process
from .core import AtomicEnsemble, Direction, PulseKind, PulseSpec

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

TABLE_DEPTHS = (0.1, 1.0, 10.0, 20.0, 100.0)
SHAPE_DEPTHS = (1.0, 5.0, 20.0, 100.0)
DEFAULT_SWEEP = (0.1, 100.0, 31)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Rb87Preset:
    """Rb-87 D2 line, |g> = F=2 mF=2, |s> = F=1 mF=0, |e> = F'=2 mF'=1."""

    gamma_eg: float = core.mhz_to_rad_s(6.067) / 12
    gamma_es: float = core.mhz_to_rad_s(6.067) / 8
    d: float = 20.0
    d_bar: float = 20.0
    omega_w_tau_w: float = 0.01
    tau_d: float = 0.1e-6
    # not fixed by the feasibility numbers; used only for the phase-matching check
    length: float = 1e-3
    ground_splitting: float = 2 * math.pi * 6.834682610904e9

    def ensemble(self) -> AtomicEnsemble:
        return AtomicEnsemble(self.d, self.d_bar, self.gamma_eg, self.gamma_es, 0.0, self.length)


PRESETS = {"rb87": Rb87Preset}


@dataclass
class RunConfig:
    command: str
    d_list: list[float] = field(default_factory=list)
    d_sweep: tuple[float, float, int] | None = None
    grid_size: int = 512
    strictness: float = 10.0
    preset: str | None = None
    d_bar: float | None = None
    gamma_eg_mhz: float | None = None
    gamma_es_mhz: float | None = None
    omega_w_tau_w: float | None = None
    tau_d_us: float | None = None
    length_m: float | None = None
    out: str | None = None
    fmt: str | None = None
    # simulate / feasibility
    spin: str = "exponential"
    alpha_l: float | None = None
    spin_file: str | None = None
    omega_r_factor: float | None = None
    omega_r_mhz: float | None = None
    direction: str = "backward"
    t_end: float = 50.0
    tol: float = 1e-9
    summary: str | None = None

    def validate(self):
        if self.fmt is None:
            self.fmt = "json" if self.command == "feasibility" else "csv"
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; known: {', '.join(PRESETS)}")
        if self.grid_size < 16:
            raise ConfigError("grid size must be >= 16")
        if not self.strictness > 0:
            raise ConfigError("strictness must be > 0")
        depths = self.depths()
        if not depths:
            raise ConfigError("no optical depths given")
        if any(not (math.isfinite(d) and d > 0) for d in depths):
            raise ConfigError("optical depths must be finite and > 0")
        if self.direction not in ("backward", "forward"):
            raise ConfigError(f"unknown direction {self.direction!r}")
        if self.spin not in ("flat", "exponential", "optimal", "file"):
            raise ConfigError(f"unknown spin source {self.spin!r}")
        return self

    def depths(self) -> list[float]:
        if self.d_list:
            return list(self.d_list)
        if self.d_sweep is not None:
            lo, hi, n = self.d_sweep
            return [float(v) for v in np.geomspace(lo, hi, int(n))]
        if self.preset is not None:
            return [PRESETS[self.preset]().d]
        return {
            "table": list(TABLE_DEPTHS),
            "shapes": list(SHAPE_DEPTHS),
            "curve": [float(v) for v in np.geomspace(*DEFAULT_SWEEP[:2], DEFAULT_SWEEP[2])],
        }.get(self.command, [20.0])

    def grid(self) -> core.SpatialGrid:
        return core.make_grid(self.grid_size)


# commands

def cmd_table(config: RunConfig) -> list[dict]:
    grid = config.grid()
    rows = []
    for d in config.depths():
        r = kernel.efficiency_report(d, grid)
        rows.append({"d": d, "eta_fwd": r.eta_fwd, "eta_offres": r.eta_offres,
                     "eta_res": r.eta_res, "eta_star": r.eta_star})
    return rows


def cmd_curve(config: RunConfig) -> list[dict]:
    return [{"d": r["d"], "eta_star": r["eta_star"], "eta_res": r["eta_res"],
             "eta_fwd": r["eta_fwd"], "eta_offres": r["eta_offres"]} for r in cmd_table(config)]


def cmd_shapes(config: RunConfig) -> list[dict]:
    """Optimal and best-fit exponential shapes per depth, one entry per d."""
    grid = config.grid()
    out = []
    for d in config.depths():
        k = kernel.build_kernel(d, grid)
        eta_star, s_opt = kernel.optimal_spin_wave(d, kernel=k)
        alpha_star, eta_fit = kernel.best_fit_exponential(d, kernel=k)
        s_exp = core.exponential_spin_wave(grid, alpha_star)
        out.append({
            "d": d, "eta_star": eta_star, "alpha_l_star": alpha_star, "eta_fit": eta_fit,
            "overlap": kernel.overlap(s_opt, s_exp),
            "x": grid.nodes.tolist(), "s_opt": s_opt.amplitude.real.tolist(),
            "s_exp": s_exp.amplitude.real.tolist(),
        })
    return out


def _physical_setup(config: RunConfig):
    base = PRESETS[config.preset]() if config.preset else Rb87Preset()
    overrides = {}
    if config.d_list:
        overrides["d"] = config.d_list[0]
    if config.d_bar is not None:
        overrides["d_bar"] = config.d_bar
    if config.gamma_eg_mhz is not None:
        overrides["gamma_eg"] = core.mhz_to_rad_s(config.gamma_eg_mhz)
    if config.gamma_es_mhz is not None:
        overrides["gamma_es"] = core.mhz_to_rad_s(config.gamma_es_mhz)
    if config.omega_w_tau_w is not None:
        overrides["omega_w_tau_w"] = config.omega_w_tau_w
    if config.tau_d_us is not None:
        overrides["tau_d"] = config.tau_d_us * 1e-6
    if config.length_m is not None:
        overrides["length"] = config.length_m
    if not config.preset and not overrides:
        raise ConfigError("feasibility needs --preset or explicit physical parameters")
    try:
        params = replace(base, **overrides)
        return params, params.ensemble()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_feasibility(config: RunConfig) -> dict:
    params, ens = _physical_setup(config)
    gamma_tau = kernel.tau_w_approx(ens.d)
    tau_w = gamma_tau / ens.gamma_eg
    pulse = core.write_pulse(params.omega_w_tau_w / tau_w, tau_w)
    prep = write_process.prepare_coherence_exponential(ens, pulse)
    n_w = write_process.write_photon_number(ens, prep, params.tau_d)
    threshold = 0.5 * ens.gamma_eg * (1.0 + ens.d)
    if config.omega_r_mhz is not None:
        omega_r = core.mhz_to_rad_s(config.omega_r_mhz)
    else:
        omega_r = (config.omega_r_factor if config.omega_r_factor is not None else 10.0) * threshold
    read = core.pi_read_pulse(omega_r)
    report = write_process.validate_regimes(ens, pulse, params.tau_d, read, config.strictness,
                                            ground_splitting=params.ground_splitting)
    grid = config.grid()
    k = kernel.build_kernel(ens.d, grid)
    herald = write_process.heralded_spin_wave(prep, grid)
    eta_star, _ = kernel.optimal_spin_wave(ens.d, kernel=k)
    return {
        "d": ens.d, "d_bar": ens.d_bar,
        "gamma_eg_rad_s": ens.gamma_eg, "gamma_es_rad_s": ens.gamma_es,
        "gamma_eg_tau_w": gamma_tau, "tau_w_s": tau_w,
        "alpha_l": prep.alpha_L, "theta0_mag": prep.theta0_mag,
        "excited_fraction": prep.excited_fraction,
        "tau_d_s": params.tau_d, "n_w": n_w,
        "omega_r_threshold_rad_s": threshold,
        "omega_r_threshold_mhz": core.rad_s_to_mhz(threshold),
        "omega_r_rad_s": omega_r,
        "pi_pulse_transfer_loss": dynamics.pi_pulse_transfer_loss(ens, omega_r),
        "eta_res": kernel.efficiency(k, herald, Direction.BACKWARD),
        "eta_fwd": kernel.efficiency(k, herald, Direction.FORWARD),
        "eta_offres": kernel.flat_efficiency_analytic(ens.d),
        "eta_star": eta_star,
        "strictness": report.strictness,
        "regimes_passed": report.passed,
        "regimes": [asdict(c) for c in report.conditions],
    }


def load_spin_file(path: str, grid: core.SpatialGrid) -> core.SpinWave:
    """Read a spin wave from CSV with columns x, amplitude (optional header)."""
    text = Path(path).read_text(encoding="utf-8")
    xs, amps = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        try:
            x, a = float(row[0]), complex(row[1].strip().replace("i", "j"))
        except (ValueError, IndexError):
            if lineno == 1 and not xs:
                continue  # header
            raise ConfigError(f"{path}:{lineno}: expected 'x,amplitude'")
        xs.append(x)
        amps.append(a)
    if len(xs) < 2:
        raise ConfigError(f"{path}: need at least two samples")
    amps = np.array(amps)
    if np.all(amps.imag == 0):
        amps = amps.real
    if min(xs) < 0 or max(xs) > 1:
        raise ConfigError(f"{path}: positions must lie in [0, 1]")
    try:
        return core.spin_wave_from_samples(grid, xs, amps)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_simulate(config: RunConfig) -> tuple[dynamics.EmissionRecord, dict]:
    d = config.depths()[0]
    if config.preset or config.gamma_eg_mhz is not None:
        params, ens = _physical_setup(replace(config, d_list=[d]))
    else:
        ens = AtomicEnsemble(d, d, 1.0, 1.0)
    grid = config.grid()
    k = kernel.build_kernel(d, grid)
    if config.spin == "flat":
        spin = core.flat_spin_wave(grid)
    elif config.spin == "optimal":
        spin = kernel.optimal_spin_wave(d, kernel=k)[1]
    elif config.spin == "file":
        if not config.spin_file:
            raise ConfigError("--spin file needs --spin-file")
        spin = load_spin_file(config.spin_file, grid)
    else:
        alpha = config.alpha_l
        if alpha is None:
            alpha = kernel.alpha_from_write(d, kernel.tau_w_approx(d))
        if alpha < 0:
            raise ConfigError("alpha_L must be >= 0")
        spin = core.exponential_spin_wave(grid, alpha)
    threshold = 0.5 * ens.gamma_eg * (1.0 + d)
    if config.omega_r_mhz is not None:
        omega_r = core.mhz_to_rad_s(config.omega_r_mhz)
    else:
        omega_r = (config.omega_r_factor if config.omega_r_factor is not None else 100.0) * threshold
    if omega_r < 0:
        raise ConfigError("read Rabi frequency must be >= 0")
    direction = Direction(config.direction)
    if omega_r > 0:
        read = core.pi_read_pulse(omega_r, direction)
    else:
        read = PulseSpec(PulseKind.READ_SQUARE, 0.0, 1.0 / ens.gamma_eg, direction=direction)
    rec = dynamics.simulate_read(ens, spin, read, t_end=config.t_end, tol=config.tol)
    summary = {
        "d": d,
        "spin": config.spin,
        "direction": direction.value,
        "omega_r_rad_s": omega_r,
        "omega_r_over_threshold": omega_r / threshold,
        "efficiency": rec.efficiency,
        "kernel_efficiency": kernel.efficiency(k, spin, direction),
        "residual_excitation": rec.residual_excitation,
        "budget_residual": rec.max_budget_error,
        "n_steps": int(len(rec.times) - 1),
        "t_final": float(rec.times[-1]),
    }
    return rec, summary


# output

def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def to_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def to_csv(header: list[str], rows, formats: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, f) for v, f in zip(row, formats)])
    return buf.getvalue()


def _g(v):
    return format(v, "g")


def render(config: RunConfig, result) -> str:
    cmd = config.command
    if cmd in ("table", "curve"):
        if config.fmt == "json":
            return to_json({"command": cmd, "grid_size": config.grid_size, "rows": result})
        header = (["d", "eta_fwd", "eta_offres", "eta_res", "eta_star"] if cmd == "table"
                  else ["d", "eta_star", "eta_res", "eta_fwd", "eta_offres"])
        rows = [[r[h] for h in header] for r in result]
        return to_csv(header, rows, ["g"] + [".4f"] * 4)
    if cmd == "shapes":
        if config.fmt == "json":
            return to_json({"command": cmd, "grid_size": config.grid_size, "shapes": result})
        rows = [(s["d"], x, a, b) for s in result for x, a, b in zip(s["x"], s["s_opt"], s["s_exp"])]
        return to_csv(["d", "x", "s_opt", "s_exp"], rows, ["g", ".5e", ".5e", ".5e"])
    if cmd == "feasibility":
        if config.fmt == "json":
            return to_json(result)
        flat = [(k, v) for k, v in result.items() if not isinstance(v, list)]
        flat += [(f"margin_{c['name']}", c["margin"]) for c in result["regimes"]]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in flat:
            w.writerow([k, format(v, ".6g") if isinstance(v, float) else v])
        return buf.getvalue()
    if cmd == "simulate":
        rec, summary = result
        if config.fmt == "json":
            return to_json({"summary": summary, "t": rec.times.tolist(), "flux": rec.flux.tolist(),
                            "emitted": rec.emitted.tolist(), "loss": rec.loss.tolist(),
                            "residual": rec.residual.tolist()})
        rows = zip(rec.times, rec.flux, rec.emitted, rec.loss, rec.residual)
        return to_csv(["t", "flux", "emitted", "loss", "residual"], rows, [".5e"] * 5)
    raise ConfigError(f"unknown command {cmd!r}")


COMMANDS = {
    "table": cmd_table,
    "shapes": cmd_shapes,
    "curve": cmd_curve,
    "feasibility": cmd_feasibility,
    "simulate": cmd_simulate,
}


# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _sweep(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected min:max:points, got {text!r}")
    if not (0 < lo <= hi and n >= 1):
        raise argparse.ArgumentTypeError("need 0 < min <= max and points >= 1")
    return lo, hi, n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--d", dest="d_list", type=_float_list, action="extend",
                        help="optical depth(s), comma separated")
    common.add_argument("--d-sweep", type=_sweep, help="log-spaced sweep min:max:points")
    common.add_argument("--grid", dest="grid_size", type=int)
    common.add_argument("--preset", help="named parameter preset (rb87)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", dest="fmt", choices=["csv", "json"])
    common.add_argument("--strictness", type=float, help="ratio required for '>>' conditions")
    common.add_argument("--d-bar", type=float)
    common.add_argument("--gamma-eg-mhz", type=float, help="linear MHz; multiplied by 2 pi")
    common.add_argument("--gamma-es-mhz", type=float, help="linear MHz; multiplied by 2 pi")
    common.add_argument("--omega-w-tau-w", type=float)
    common.add_argument("--tau-d-us", type=float)
    common.add_argument("--length-m", type=float)
    common.add_argument("--omega-r-mhz", type=float, help="read Rabi frequency, linear MHz")
    common.add_argument("--omega-r-factor", type=float,
                        help="read Rabi frequency in units of gamma_eg (1 + d) / 2")

    parser = _Parser(prog="ramanopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common], help="retrieval-efficiency table")
    sub.add_parser("shapes", parents=[common], help="optimal and best-fit spin-wave shapes")
    sub.add_parser("curve", parents=[common], help="efficiency versus optical depth")
    sub.add_parser("feasibility", parents=[common], help="physical feasibility report")
    sim = sub.add_parser("simulate", parents=[common], help="time-domain read simulation")
    sim.add_argument("--spin", choices=["flat", "exponential", "optimal", "file"])
    sim.add_argument("--alpha-l", type=float)
    sim.add_argument("--spin-file")
    sim.add_argument("--direction", choices=["backward", "forward"])
    sim.add_argument("--t-end", type=float)
    sim.add_argument("--tol", type=float)
    sim.add_argument("--summary", help="summary JSON path (default: OUT with .json suffix)")
    return parser


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def config_from_args(argv) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    base: dict = {}
    cfg_path = args.pop("config", None)
    if cfg_path:
        raw = Path(cfg_path).read_text(encoding="utf-8")
        try:
            base = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{cfg_path}: invalid JSON ({exc})") from exc
        if not isinstance(base, dict):
            raise ConfigError(f"{cfg_path}: top level must be an object")
        unknown = set(base) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"{cfg_path}: unknown keys {sorted(unknown)}")
        base.pop("command", None)
        if "d_sweep" in base and base["d_sweep"] is not None:
            base["d_sweep"] = tuple(base["d_sweep"])
    merged = {**base, **{k: v for k, v in args.items() if v is not None}}
    try:
        cfg = RunConfig(command=command, **merged)
        if not isinstance(cfg.d_list, list):
            raise ConfigError("d_list must be a list of numbers")
        return cfg.validate()
    except TypeError as exc:
        # mistyped values from a JSON config surface here
        raise ConfigError(str(exc)) from exc


def _write(path: str | None, text: str, stream):
    if path is None:
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config = config_from_args(argv)
        result = COMMANDS[config.command](config)
        text = render(config, result)
        _write(config.out, text, stdout)
        if config.command == "simulate" and config.fmt == "csv":
            summary_path = config.summary
            if summary_path is None and config.out is not None:
                summary_path = str(Path(config.out).with_suffix(".json"))
            _write(summary_path, to_json(result[1]), stderr)
    except ConfigError as exc:
        print(f"ramanopt: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"ramanopt: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"ramanopt: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

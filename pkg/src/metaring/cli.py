"""Command dispatch and deterministic file output.

    metaring <command> --config <path> --out <dir> [--threads n]

Commands: modes, dispersion, tune, convert, fringe, saturate, fit, sweep.
Every command writes RFC-4180 CSV (LF line endings) and/or JSON data files
plus a ``manifest.json``.  Data files are byte-identical for identical
(command, config); the wall clock appears only in the manifest.

Exit codes: 0 success, 2 configuration invalid, 3 solver error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import conversion, dispersion, fitting, modes, tuning
from .config import Config, load_config, validate_config
from .errors import (
    BandEdgeError,
    ConditioningError,
    ConfigError,
    NoResonanceError,
    PrecisionError,
)

COMMANDS = ("modes", "dispersion", "tune", "convert", "fringe", "saturate", "fit", "sweep")


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_hash: str
    output_paths: List[str]
    timestamp: str


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _run_modes(config: Config, out: Path, threads: int) -> List[str]:
    band = (config.sweeps["band"]["start_hz"], config.sweeps["band"]["stop_hz"])
    table = modes.free_spectral_range(config.ring, band)
    _write_csv(out / "modes.csv", ("m", "f_hz", "fsr_to_next_hz"), table.csv_rows())
    _write_json(out / "modes_summary.json", {
        "band_hz": list(band),
        "mode_count": len(table),
        "fsr_mean_hz": None if math.isnan(table.fsr_mean) else table.fsr_mean,
    })
    return ["modes.csv", "modes_summary.json"]


def _run_dispersion(config: Config, out: Path, threads: int) -> List[str]:
    n_cells = config.ring.cell_count
    band = (config.sweeps["band"]["start_hz"], config.sweeps["band"]["stop_hz"])
    curve = dispersion.fsr_curve(config.cell, n_cells, band)
    _write_csv(out / "fsr_curve.csv", ("f_hz", "fsr_hz"), curve)
    ratio = config.sweeps["ratio"]
    points = dispersion.idc_enhancement_sweep(
        config.cell, n_cells,
        signal_f=ratio["signal_hz"],
        offsets=ratio["offsets_hz"],
        ratios=ratio["values"],
    ) if ratio["values"] and ratio["offsets_hz"] else []
    _write_csv(
        out / "mismatch.csv",
        ("ratio", "offset_hz", "delta_f_hz"),
        ((p.ratio, p.offset, p.delta_f) for p in points),
    )
    return ["fsr_curve.csv", "mismatch.csv"]


def _run_tune(config: Config, out: Path, threads: int) -> List[str]:
    sweep = config.sweeps["field"]
    fields = np.linspace(0.0, sweep["stop_T"], sweep["points"])

    def evaluate(b_ext: float):
        bias = tuning.BiasState.from_field(config.microloop, float(b_ext))
        shift = tuning.fractional_frequency_shift(config.microloop, bias)
        report = tuning.nonlinearity_report(config.microloop, bias)
        return (b_ext, bias.dc_current, shift,
                report["twm"], report["fwm"], report["c3"], report["c4"])

    rows = _map(evaluate, fields, threads)
    _write_csv(
        out / "tuning.csv",
        ("b_ext_tesla", "i_dc_amp", "df_over_f", "T", "F", "c3", "c4"),
        rows,
    )
    return ["tuning.csv"]


def _run_convert(config: Config, out: Path, threads: int) -> List[str]:
    params = config.converter
    pump = config.sweeps["pump"]
    powers = np.linspace(0.0, pump["stop"], pump["points"])

    def at_power(p: float):
        result = conversion.scattering(float(p), params.eta_s, params.eta_i)
        return (p, result.t2, result.r2)

    _write_csv(out / "pump.csv", ("p0_norm", "t2", "r2"), _map(at_power, powers, threads))

    det = config.sweeps["detuning"]
    deltas = np.linspace(-det["span_hz"] / 2.0, det["span_hz"] / 2.0, det["points"])
    if len(deltas):
        t2, r2 = conversion.conversion_spectrum(deltas, params)
        spectrum_rows = zip(deltas, np.atleast_1d(t2), np.atleast_1d(r2))
    else:
        spectrum_rows = ()
    _write_csv(out / "spectrum.csv", ("delta_hz", "t2", "r2"), spectrum_rows)

    c = conversion.cooperativity(params)
    pair_rows = (
        (p.index, p.bound, p.efficiency)
        for p in conversion.pair_sweep(config.pairs, c)
    )
    _write_csv(out / "pairs.csv", ("pair_index", "eta_product", "t2"), pair_rows)
    bandwidth = conversion.conversion_bandwidth(params) if c > 0 else None
    _write_json(out / "convert_summary.json", {
        "cooperativity": c,
        "bandwidth_hz": bandwidth,
    })
    return ["pump.csv", "spectrum.csv", "pairs.csv", "convert_summary.json"]


def _run_fringe(config: Config, out: Path, threads: int) -> List[str]:
    scenario = config.fringe
    split = conversion.scattering(scenario.cooperativity, scenario.eta_s, scenario.eta_i)
    r_mag, t_mag = math.sqrt(split.r2), math.sqrt(split.t2)
    points = config.sweeps["phase"]["points"]
    phases = np.linspace(0.0, 2.0 * math.pi, points)
    if len(phases):
        power = np.atleast_1d(conversion.interference_fringe(phases, r_mag, t_mag))
        rows = zip(phases, power)
    else:
        rows = ()
    _write_csv(out / "fringe.csv", ("phi_rad", "p_ratio"), rows)
    _write_json(out / "fringe_summary.json", {
        "r_mag": r_mag,
        "t_mag": t_mag,
        "visibility": conversion.fringe_visibility(r_mag, t_mag),
    })
    return ["fringe.csv", "fringe_summary.json"]


def _run_saturate(config: Config, out: Path, threads: int) -> List[str]:
    scenario = config.kerr
    kappa, kappa_ex = scenario.kappa, scenario.kappa_ex
    critical = conversion.bifurcation_point(scenario.rate_hz, kappa, kappa_ex)
    power_w = conversion.bifurcation_drive_power(
        scenario.frequency_hz, scenario.rate_hz, kappa, kappa_ex
    )
    # sweep drive through the bistable window at twice the critical detuning
    detuning = 2.0 * critical.detuning
    pump = config.sweeps["pump"]
    drive_ratios = np.linspace(0.0, pump["stop"], pump["points"])

    def at_drive(ratio: float):
        state = conversion.kerr_steady_state(
            detuning, float(ratio) * critical.drive_flux,
            scenario.rate_hz, kappa, kappa_ex,
        )
        branches = list(state.photon_numbers) + [None] * (3 - len(state.photon_numbers))
        return (ratio, ratio * power_w, *branches[:3], state.bifurcated)

    _write_csv(
        out / "saturation.csv",
        ("drive_over_critical", "drive_w", "n_low", "n_mid", "n_high", "bifurcated"),
        _map(at_drive, drive_ratios, threads),
    )
    _write_json(out / "kerr_summary.json", {
        "kappa_hz": kappa,
        "kappa_ex_hz": kappa_ex,
        "critical_detuning_hz": critical.detuning,
        "critical_photon_number": critical.photon_number,
        "critical_drive_flux_per_s": critical.drive_flux,
        "critical_drive_power_w": power_w,
        "critical_drive_power_dbm": conversion.dbm_from_watts(power_w),
    })
    return ["saturation.csv", "kerr_summary.json"]


def _run_fit(config: Config, out: Path, threads: int) -> List[str]:
    if config.fit_trace is None:
        raise ConfigError(["fit.trace_csv: required for the fit command"])
    trace = fitting.Trace.from_csv(config.fit_trace)
    result = fitting.fit_reflection_resonance(trace)
    payload = result.to_dict()
    payload["coupling_fraction"] = fitting.coupling_fraction(result)
    _write_json(out / "fit_result.json", payload)
    return ["fit_result.json"]


_RUNNERS = {
    "modes": _run_modes,
    "dispersion": _run_dispersion,
    "tune": _run_tune,
    "convert": _run_convert,
    "fringe": _run_fringe,
    "saturate": _run_saturate,
    "fit": _run_fit,
}


def run(command: str, config_path, out_dir, threads: int = 1) -> RunManifest:
    """Execute one command, write its outputs plus a manifest."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {COMMANDS}")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    config = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = COMMANDS[:-1] if command == "sweep" else (command,)
    outputs: List[str] = []
    for name in names:
        if command == "sweep" and name == "fit" and config.fit_trace is None:
            continue
        outputs.extend(_RUNNERS[name](config, out, threads))
    manifest = RunManifest(
        command=command,
        config_hash=config.config_hash,
        output_paths=sorted(outputs),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    _write_json(out / "manifest.json", {
        "command": manifest.command,
        "config_hash": manifest.config_hash,
        "output_paths": manifest.output_paths,
        "timestamp": manifest.timestamp,
    })
    return manifest


def validate(config_path) -> List[str]:
    """Violations for a config file; empty list when it loads cleanly."""
    return validate_config(config_path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="metaring",
        description="Meta-ring frequency-converter simulation and fitting toolkit",
    )
    parser.add_argument("command", choices=COMMANDS + ("validate",))
    parser.add_argument("--config", required=True, help="JSON configuration path")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="parallel sweep workers")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            violations = validate(args.config)
            for violation in violations:
                print(violation, file=sys.stderr)
            return 2 if violations else 0
        manifest = run(args.command, args.config, args.out, threads=args.threads)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 2
    except (BandEdgeError, ConditioningError, NoResonanceError, PrecisionError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for path in manifest.output_paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: levels, sweep, experiment, oracle-check.

Output contracts: CSV uses '.' decimals, 9 significant digits (scientific
below 1e-4 per '%.9g'), LF endings, always a header row. JSON is emitted
with sorted keys and 2-space indent. All randomness flows from a single
numpy PCG64 generator seeded by --seed, so seeded runs are byte-identical.

Exit status: 0 success, 1 physics/validation failure, 2 usage error.
"""

import argparse
import json
import math
import sys as _sys

import numpy as np

from qcorr import correlations, spinsim, states, tomography, xxzmodel
from qcorr.backend import backend_name
from qcorr.errors import QCorrError

ORACLE_THRESHOLD = 1e-6
DEFAULT_NUTATION_AXIS = np.linspace(0.0, 2.0 * math.pi, 25)
DEFAULT_PHI_GRID = np.arange(36) * (2.0 * math.pi / 36.0)


def fmt(x) -> str:
    """Pinned number format: 9 significant digits, scientific below 1e-4."""
    return format(float(x), ".9g")


def _delta_grid(dmin, dmax, step):
    n = int(round((dmax - dmin) / step))
    return dmin + step * np.arange(n + 1)


def _write(text: str, out_path):
    data = text.encode("utf-8")
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        _sys.stdout.write(data.decode("utf-8"))


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_levels(j, delta_min, delta_max, step, out=None, fmt_kind="csv") -> str:
    grid = _delta_grid(delta_min, delta_max, step)
    spectra = [xxzmodel.spectrum(j, d) for d in grid]
    crossings = ([] if j == 0 else
                 xxzmodel.level_crossings(j, (delta_min, delta_max)))
    if fmt_kind == "json":
        doc = {"schema": "xxz-levels/1", "j": float(j),
               "delta": [float(d) for d in grid],
               "E_upup": [s.up_up for s in spectra],
               "E_dndn": [s.down_down for s in spectra],
               "E_triplet0": [s.triplet0 for s in spectra],
               "E_singlet": [s.singlet for s in spectra],
               "crossings": [{"delta": c.delta_star,
                              "levels": [c.level_a, c.level_b]}
                             for c in crossings]}
        text = _json_dumps(doc)
    else:
        lines = ["delta,E_upup,E_dndn,E_triplet0,E_singlet"]
        for d, s in zip(grid, spectra):
            lines.append(",".join(fmt(v) for v in
                                  (d, s.up_up, s.down_down, s.triplet0, s.singlet)))
        summary = ", ".join(f"{c.delta_star:.6f} ({c.level_a},{c.level_b})"
                            for c in crossings)
        lines.append(f"# crossings: {summary}".rstrip())
        text = "\n".join(lines) + "\n"
    _write(text, out)
    return text


def cmd_sweep(j, t, delta_min, delta_max, step, mode="exact",
              out=None, fmt_kind="csv") -> str:
    grid = _delta_grid(delta_min, delta_max, step)
    series = xxzmodel.sweep(j, t, grid, mode=mode)
    if fmt_kind == "json":
        doc = {"schema": "xxz-sweep/1", "j": float(j), "t": float(t),
               "mode": mode,
               "delta": [float(d) for d in series.axis],
               "c_x": [c.cx for c in series.c_vectors],
               "c_y": [c.cy for c in series.c_vectors],
               "c_z": [c.cz for c in series.c_vectors],
               "discord": [float(v) for v in series.discord],
               "eof": [float(v) for v in series.eof],
               "branch": list(series.branches),
               "sudden_change": [float(p) for p in series.sudden_change_points]}
        text = _json_dumps(doc)
    else:
        lines = ["delta,c_x,c_y,c_z,discord,eof,branch"]
        for i, d in enumerate(series.axis):
            c = series.c_vectors[i]
            lines.append(",".join(
                [fmt(d), fmt(c.cx), fmt(c.cy), fmt(c.cz),
                 fmt(series.discord[i]), fmt(series.eof[i]),
                 series.branches[i]]))
        points = ",".join(f"{p:.6f}" for p in series.sudden_change_points)
        lines.append(f"# sudden_change: {points}".rstrip())
        text = "\n".join(lines) + "\n"
    _write(text, out)
    return text


def run_experiment(theta, tau3, sign, noise_sigma=0.0, seed=0, system=None,
                   nutation_axis=None, phi_grid=None) -> dict:
    """Preparation -> tomography -> reconstruction, returning a JSON-ready dict.

    Record simulation order (one PCG64 stream): electron-Rabi reference,
    diagonal nutations MW1, MW2, RF1, RF2, then the rho23 and rho14 phase
    cycles.
    """
    if system is None:
        system = spinsim.paper_system()
    axis = DEFAULT_NUTATION_AXIS if nutation_axis is None else np.asarray(nutation_axis)
    grid = DEFAULT_PHI_GRID if phi_grid is None else np.asarray(phi_grid)
    rng = np.random.Generator(np.random.PCG64(seed))

    prep = spinsim.prepare_bell_diagonal(system, theta, tau3, sign)
    prepared_c, prepared_residual = states.c_vector_of(prep.rho)

    reference = tomography.electron_rabi_reference(system, axis, noise_sigma, rng)
    records = [tomography.simulate_diagonal_readout(prep.rho, pair, axis,
                                                    noise_sigma, rng)
               for pair in (spinsim.TRANSITIONS["MW1"], spinsim.TRANSITIONS["MW2"],
                            spinsim.TRANSITIONS["RF1"], spinsim.TRANSITIONS["RF2"])]
    cycle23 = tomography.simulate_rho23_readout(prep.rho, grid, noise_sigma, rng)
    cycle14 = tomography.simulate_rho14_readout(prep.rho, grid, noise_sigma, rng)

    report = tomography.reconstruct(
        records, tomography.extract_coherence(cycle23),
        tomography.extract_coherence(cycle14), reference,
        epsilon=system.epsilon)
    recon_c, recon_residual = states.c_vector_of(report.rho)
    discord = correlations.discord_bell_diagonal(recon_c)
    eof_value = correlations.eof(report.rho)

    return {
        "schema": "experiment/1",
        "backend": backend_name(),
        "parameters": {"theta_rad": float(theta), "tau3_s": float(tau3),
                       "sign": int(sign), "noise_sigma": float(noise_sigma),
                       "seed": int(seed), "epsilon": float(system.epsilon)},
        "transition_frequencies_hz": {k: float(v) for k, v in
                                      spinsim.transition_frequencies(system).items()},
        "predicted_c": [float(v) for v in prep.predicted],
        "prepared_c": [float(v) for v in prepared_c],
        "prepared_residual": float(prepared_residual),
        "reconstructed_c": [float(v) for v in recon_c],
        "reconstructed_residual": float(recon_residual),
        "reference_amplitude": float(report.normalization_amplitude),
        "trace_distance_raw_to_physical": float(report.trace_distance_raw_to_physical),
        "trace_distance_prepared_reconstructed": float(
            tomography.trace_distance(prep.rho, report.rho)),
        "discord": float(discord.discord),
        "discord_branch": discord.branch,
        "eof": float(eof_value),
        "separable": bool(eof_value == 0.0),
    }


def cmd_experiment(theta_deg, tau3_ns, sign, noise, seed,
                   out=None, fmt_kind="json") -> str:
    report = run_experiment(math.radians(theta_deg), tau3_ns * 1e-9, sign,
                            noise_sigma=noise, seed=seed)
    if fmt_kind == "csv":
        flat = {"discord": report["discord"], "eof": report["eof"],
                "separable": int(report["separable"]),
                "trace_distance_prepared_reconstructed":
                    report["trace_distance_prepared_reconstructed"]}
        for key in ("predicted_c", "prepared_c", "reconstructed_c"):
            for comp, val in zip("xyz", report[key]):
                flat[f"{key}_{comp}"] = val
        lines = ["key,value"]
        for key in sorted(flat):
            val = flat[key]
            lines.append(f"{key},{fmt(val) if isinstance(val, float) else val}")
        text = "\n".join(lines) + "\n"
    else:
        text = _json_dumps(report)
    _write(text, out)
    return text


def oracle_check(n_samples, seed, grid=(64, 128), refine_iters=50) -> dict:
    """Max |closed form - oracle| over seeded random physical c-vectors."""
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(n_samples):
        c = states.sample_physical_cvector(rng)
        closed = correlations.discord_bell_diagonal(c).discord
        oracle = correlations.discord_oracle(states.bell_diagonal(c),
                                             grid=grid, refine_iters=refine_iters)
        worst = max(worst, abs(closed - oracle))
    return {"schema": "oracle-check/1", "samples": int(n_samples),
            "seed": int(seed), "max_abs_deviation": float(worst),
            "threshold": ORACLE_THRESHOLD,
            "ok": bool(worst < ORACLE_THRESHOLD)}


def cmd_oracle_check(samples, seed, out=None, fmt_kind="text") -> tuple:
    result = oracle_check(samples, seed)
    if fmt_kind == "json":
        text = _json_dumps(result)
    else:
        text = (f"samples={result['samples']} seed={result['seed']} "
                f"max_abs_deviation={fmt(result['max_abs_deviation'])} "
                f"threshold={fmt(result['threshold'])} "
                f"status={'ok' if result['ok'] else 'FAIL'}\n")
    _write(text, out)
    return result, text


_DEFAULTS = {
    "levels": {"j": 1.0, "delta_min": -2.0, "delta_max": 2.0, "step": 0.1,
               "out": None, "format": "csv"},
    "sweep": {"j": 1.0, "t": 1.0, "delta_min": -2.0, "delta_max": 2.0,
              "step": 0.01, "mode": "exact", "out": None, "format": "csv"},
    "experiment": {"theta_deg": 161.047, "tau3_ns": 235.7, "sign": "+",
                   "noise": 0.0, "seed": 0, "out": None, "format": "json"},
    "oracle-check": {"samples": 200, "seed": 0, "out": None, "format": "text"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description="Quantum correlations of two-qubit states: XXZ thermal "
                    "sweeps, Bell-diagonal discord, and the pulsed-ESR "
                    "preparation/tomography simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file supplying any flag; "
                                        "explicit flags override it")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("levels", help="XXZ energy levels over a delta range")
    p.add_argument("--j", type=float)
    p.add_argument("--delta-min", type=float, dest="delta_min")
    p.add_argument("--delta-max", type=float, dest="delta_max")
    p.add_argument("--step", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    add_common(p)

    p = sub.add_parser("sweep", help="discord/EoF sweep of the thermal state")
    p.add_argument("--j", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--delta-min", type=float, dest="delta_min")
    p.add_argument("--delta-max", type=float, dest="delta_max")
    p.add_argument("--step", type=float)
    p.add_argument("--mode", choices=("exact", "high_T"))
    p.add_argument("--format", choices=("csv", "json"))
    add_common(p)

    p = sub.add_parser("experiment",
                       help="preparation + tomography pipeline, end to end")
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--tau3-ns", type=float, dest="tau3_ns")
    p.add_argument("--sign", choices=("+", "-"))
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    add_common(p)

    p = sub.add_parser("oracle-check",
                       help="compare closed-form discord with the optimizer")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("text", "json"))
    add_common(p)

    return parser


def _merge_config(args, parser):
    """Fill unset flags from the config file, then from hard defaults."""
    defaults = _DEFAULTS[args.command]
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config: {exc}")
        unknown = set(config) - set(defaults)
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key, hard_default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, hard_default)
        merged[key] = value
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = _merge_config(args, parser)

    if args.command in ("levels", "sweep"):
        if opts["step"] is None or opts["step"] <= 0:
            parser.error("--step must be positive")
        if opts["delta_max"] <= opts["delta_min"]:
            parser.error("--delta-max must exceed --delta-min")

    try:
        if args.command == "levels":
            cmd_levels(opts["j"], opts["delta_min"], opts["delta_max"],
                       opts["step"], opts["out"], opts["format"])
            return 0
        if args.command == "sweep":
            cmd_sweep(opts["j"], opts["t"], opts["delta_min"], opts["delta_max"],
                      opts["step"], opts["mode"], opts["out"], opts["format"])
            return 0
        if args.command == "experiment":
            sign = 1 if opts["sign"] == "+" else -1
            cmd_experiment(opts["theta_deg"], opts["tau3_ns"], sign,
                           opts["noise"], opts["seed"], opts["out"],
                           opts["format"])
            return 0
        if args.command == "oracle-check":
            if opts["samples"] is None or opts["samples"] < 1:
                parser.error("--samples must be >= 1")
            result, _ = cmd_oracle_check(opts["samples"], opts["seed"],
                                         opts["out"], opts["format"])
            return 0 if result["ok"] else 1
    except QCorrError as exc:
        print(f"qcorr: {exc}", file=_sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())

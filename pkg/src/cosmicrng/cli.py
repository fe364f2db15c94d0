"""Command-line front end: simulate, extract, certify, fit, and plan.

Every artifact-producing run also writes a JSON manifest (command, resolved
parameters including the seed, artifact paths, package version) sufficient
to reproduce the run bit for bit: re-running the recorded argv yields
byte-identical artifacts.  Numeric results are emitted as JSON, plot-ready
data as CSV.

Durations on flags accept the suffixes ps/ns/us/ms/s (bare numbers are
seconds); distances accept m/km/ly (bare numbers are meters).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, catalog, extract, photonsim, planner, randtest
from .spacetime import (
    LIGHT_YEAR_M,
    HorizontalPointing,
    TimingBudget,
    angular_separation,
    axis_angle,
    min_entanglement_lead_time,
    min_lab_separation,
    pair_separation,
    time_constraints,
)

_DURATION_UNITS = (("ps", 1e-12), ("ns", 1e-9), ("us", 1e-6), ("µs", 1e-6), ("ms", 1e-3), ("s", 1.0))
_DISTANCE_UNITS = (("km", 1e3), ("ly", LIGHT_YEAR_M), ("m", 1.0))


def parse_duration(text: str) -> float:
    """'8us' -> 8e-6; bare numbers are seconds."""
    t = text.strip()
    for suffix, scale in _DURATION_UNITS:
        if t.endswith(suffix) and len(t) > len(suffix):
            body = t[: -len(suffix)]
            try:
                return float(body) * scale
            except ValueError:
                break
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad duration {text!r} (use e.g. 8us, 40.96ns, 0.5)") from None


def parse_distance(text: str) -> float:
    """'5km' -> 5000.0; bare numbers are meters."""
    t = text.strip()
    for suffix, scale in _DISTANCE_UNITS:
        if t.endswith(suffix) and len(t) > len(suffix):
            body = t[: -len(suffix)]
            try:
                return float(body) * scale
            except ValueError:
                break
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad distance {text!r} (use e.g. 5km, 5000, 3325ly)") from None


def _to_ps(seconds: float, what: str) -> int:
    ps = seconds * 1e12
    r = round(ps)
    if abs(ps - r) > 1e-6 * max(1.0, abs(ps)):
        raise ValueError(f"{what} must be a whole number of picoseconds, got {seconds} s")
    return int(r)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit_text(out: str | None, text: str) -> dict:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        return {"out": out}
    sys.stdout.write(text)
    return {}


def _write_manifest(args, command: str, params: dict, artifacts: dict, argv: list[str], extra: dict | None = None) -> None:
    """Record the run next to its primary artifact (or wherever --manifest points)."""
    path = getattr(args, "manifest", None)
    if path is None:
        out = getattr(args, "out", None)
        if not out or not artifacts:
            return
        path = str(out) + ".manifest.json"
    doc = {
        "command": command,
        "version": __version__,
        "params": params,
        "artifacts": artifacts,
        "argv": list(argv),
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(_json_text(doc), encoding="utf-8")


def _load_catalog(spec: str) -> catalog.Catalog:
    if spec == "built-in":
        return catalog.builtin_catalog()
    return catalog.load_catalog(Path(spec).read_text(encoding="utf-8"))


def _load_rate_records(spec: str) -> list[planner.RateRecord]:
    if spec == "built-in":
        return planner.builtin_rate_records()
    return planner.load_rate_records(Path(spec).read_text(encoding="utf-8"))


def _source_dict(e: catalog.CelestialSource) -> dict:
    return {
        "name": e.name,
        "ra_deg": e.ra_deg,
        "dec_deg": e.dec_deg,
        "vmag": e.vmag,
        "distance_ly": e.distance_ly,
        "sigma_ly": e.sigma_ly,
        "epoch": e.epoch,
    }


def cmd_catalog(args, argv) -> int:
    cat = _load_catalog(args.catalog)
    if args.action == "list":
        rows = [_source_dict(catalog.select_latest(cat, name)) for name in cat.names()]
    else:  # show
        entries = sorted(cat.entries_for(args.name), key=lambda e: e.epoch)
        if not entries:
            raise KeyError(f"no catalog entry for source {args.name!r}")
        rows = [_source_dict(e) for e in entries]
    artifacts = _emit_text(args.out, _json_text(rows))
    _write_manifest(args, f"catalog-{args.action}", {"catalog": args.catalog, "name": getattr(args, "name", None)}, artifacts, argv)
    return 0


def cmd_simulate(args, argv) -> int:
    config = photonsim.SimConfig(
        signal_rate_hz=args.signal_rate,
        background_rate_hz=args.background,
        duration_s=args.duration,
        dead_time_ps=_to_ps(args.dead_time, "--dead-time"),
        tick_ps=_to_ps(args.tick, "--tick"),
        seed=args.seed,
    )
    series = photonsim.simulate_stream(config)
    photonsim.write_timestamps(args.out, series)
    params = {
        "signal_rate_hz": config.signal_rate_hz,
        "background_rate_hz": config.background_rate_hz,
        "duration_s": config.duration_s,
        "dead_time_ps": config.dead_time_ps,
        "tick_ps": config.tick_ps,
        "seed": config.seed,
    }
    _write_manifest(
        args, "simulate", params, {"timestamps": str(args.out)}, argv,
        extra={"rng": photonsim.RNG_ALGORITHM, "n_events": len(series)},
    )
    return 0


def cmd_extract(args, argv) -> int:
    tick_ps = _to_ps(args.tick, "--tick")
    series = photonsim.read_timestamps(args.timestamps, tick_ps=tick_ps)
    cfg = extract.ExtractionConfig(t_window_ps=_to_ps(args.t_window, "--t-window"), n_bins=args.n_bins)
    rec = extract.extract_bits(series, cfg)
    extract.write_bitstream(args.out, rec)
    params = {
        "timestamps": str(args.timestamps),
        "tick_ps": tick_ps,
        "t_window_ps": cfg.t_window_ps,
        "n_bins": cfg.n_bins,
    }
    stats = {
        "n_codes": len(rec.codes),
        "n_collisions": rec.n_collisions,
        "n_cycles_observed": rec.n_cycles_observed,
    }
    _write_manifest(args, "extract", params, {"bits": str(args.out)}, argv, extra={"stats": stats})
    return 0


def cmd_hist(args, argv) -> int:
    codes = extract.read_bitstream(args.bits)
    h = extract.histogram(codes, n_bins=args.n_bins)
    artifacts = _emit_text(args.out, extract.histogram_csv(h))
    _write_manifest(args, "hist", {"bits": str(args.bits), "n_bins": args.n_bins}, artifacts, argv)
    return 0


def cmd_entropy(args, argv) -> int:
    codes = extract.read_bitstream(args.bits)
    h = extract.histogram(codes, n_bins=args.n_bins)
    doc = {
        "n_codes": h.total,
        "n_bins": args.n_bins,
        "max_probability": float(h.counts.max()) / h.total if h.total else None,
        "min_entropy_per_bit": extract.min_entropy(h),
    }
    artifacts = _emit_text(args.out, _json_text(doc))
    _write_manifest(args, "entropy", {"bits": str(args.bits), "n_bins": args.n_bins}, artifacts, argv)
    return 0


def default_serial_m(seq_len: int) -> int:
    """Largest NIST-recommended serial m (<= 16): m < log2(n) - 2."""
    return max(1, min(16, seq_len.bit_length() - 4))


def default_apen_m(seq_len: int) -> int:
    """Largest NIST-recommended approximate-entropy m (<= 10): m < log2(n) - 5."""
    return max(1, min(10, seq_len.bit_length() - 10))


def cmd_analyze(args, argv) -> int:
    bits = extract.unpack_bits_msb(Path(args.bits).read_bytes())
    sequences = randtest.split_sequences(bits, args.sequences, args.seq_len)
    m_serial = args.serial_m if args.serial_m is not None else default_serial_m(args.seq_len)
    m_apen = args.apen_m if args.apen_m is not None else default_apen_m(args.seq_len)
    report = randtest.run_battery(sequences, m_block=args.block_m, m_serial=m_serial, m_apen=m_apen)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    artifacts = _emit_text(args.out, _json_text(report.as_json_dict()))
    params = {
        "bits": str(args.bits),
        "sequences": args.sequences,
        "seq_len": args.seq_len,
        "block_m": args.block_m,
        "serial_m": m_serial,
        "apen_m": m_apen,
    }
    _write_manifest(args, "analyze", params, artifacts, argv, extra={"pass": report.passed})
    return 0 if report.passed else 1


def cmd_fit_trend(args, argv) -> int:
    records = _load_rate_records(args.data)
    points = planner.trend_points(records, max_vmag=args.max_vmag)
    fit = planner.fit_magnitude_trend(points)
    doc = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual_sd": fit.residual_sd,
        "n_points": fit.n_points,
    }
    if args.predict is not None:
        doc["prediction"] = {"vmag": args.predict, "rate_hz": planner.predict_rate(fit, args.predict)}
    artifacts = _emit_text(args.out, _json_text(doc))
    if args.csv_out:
        Path(args.csv_out).write_text(planner.trend_csv(points, fit), encoding="utf-8")
        artifacts["csv"] = args.csv_out
    _write_manifest(args, "fit-trend", {"data": args.data, "max_vmag": args.max_vmag, "predict": args.predict}, artifacts, argv)
    return 0


def _budget_from_args(args) -> TimingBudget:
    return TimingBudget(
        t_window_s=args.t_window,
        t_basis_s=args.t_basis,
        t_measurement_s=args.t_measurement,
        t_margin_s=args.t_margin,
    )


def _feasibility_inputs(args):
    cat = _load_catalog(args.catalog)
    src1 = catalog.select_latest(cat, args.source1)
    src2 = catalog.select_latest(cat, args.source2)
    p1 = HorizontalPointing(az_deg=args.az1, alt_deg=args.alt1)
    p2 = HorizontalPointing(az_deg=args.az2, alt_deg=args.alt2)
    return src1, src2, p1, p2, _budget_from_args(args)


def cmd_feasibility(args, argv) -> int:
    src1, src2, p1, p2, budget = _feasibility_inputs(args)
    theta = angular_separation(src1, src2)
    constraint = time_constraints(src1, src2)
    alpha1, alpha2 = axis_angle(p1), axis_angle(p2)
    alpha = max(alpha1, alpha2)
    min_sep = min_lab_separation(budget, alpha)
    delta_t_min = min_entanglement_lead_time(args.lab_sep, alpha, args.n_fiber)
    planned_delta_t = delta_t_min if args.delta_t is None else args.delta_t
    doc = {
        "theta_deg": theta,
        "l12_ly": pair_separation(src1.distance_ly, src2.distance_ly, theta),
        "constraint": {
            "tau1_yr": constraint.tau1_yr,
            "sigma_tau1_yr": constraint.sigma_tau1_yr,
            "tau2_yr": constraint.tau2_yr,
            "sigma_tau2_yr": constraint.sigma_tau2_yr,
            "tau_yr": constraint.tau_yr,
            "sigma_tau_yr": constraint.sigma_tau_yr,
        },
        "alpha1_deg": alpha1,
        "alpha2_deg": alpha2,
        "min_lab_separation_m": min_sep,
        "delta_t_min_s": delta_t_min,
        "locality_ok": args.lab_sep > min_sep,
        "foc_ok": planned_delta_t >= delta_t_min,
    }
    artifacts = _emit_text(args.out, _json_text(doc))
    _write_manifest(args, "feasibility", _plan_params(args), artifacts, argv)
    return 0 if doc["locality_ok"] and doc["foc_ok"] else 1


def _plan_params(args) -> dict:
    params = {
        "source1": args.source1,
        "source2": args.source2,
        "catalog": args.catalog,
        "az1": args.az1,
        "alt1": args.alt1,
        "az2": args.az2,
        "alt2": args.alt2,
        "t_window_s": args.t_window,
        "t_basis_s": args.t_basis,
        "t_measurement_s": args.t_measurement,
        "t_margin_s": args.t_margin,
        "lab_sep_m": args.lab_sep,
        "n_fiber": args.n_fiber,
        "delta_t_s": args.delta_t,
    }
    for extra_field in ("r1", "r2", "p_total", "n_target", "attempt_period"):
        if hasattr(args, extra_field):
            params[extra_field] = getattr(args, extra_field)
    return params


def cmd_plan(args, argv) -> int:
    src1, src2, p1, p2, budget = _feasibility_inputs(args)
    if args.p_total == planner.DEFAULT_P_TOTAL:
        print(
            "note: per-attempt success probability left at the default "
            f"{planner.DEFAULT_P_TOTAL} (a tenfold-smaller value circulates; only this "
            "one matches the quoted per-event rate)",
            file=sys.stderr,
        )
    report = planner.feasibility_report(
        src1, src2, p1, p2, budget,
        lab_sep_m=args.lab_sep,
        n_fiber=args.n_fiber,
        p_total=args.p_total,
        n_target=args.n_target,
        r1_hz=args.r1,
        r2_hz=args.r2,
        attempt_period_s=args.attempt_period,
        delta_t_s=args.delta_t,
    )
    artifacts = _emit_text(args.out, _json_text(report.as_json_dict()))
    _write_manifest(args, "plan", _plan_params(args), artifacts, argv)
    return 0 if report.locality_ok and report.foc_ok else 1


def _add_out(p, required: bool = False) -> None:
    p.add_argument("-o", "--out", required=required, help="output path (stdout if omitted)" if not required else "output path")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")


def _add_feasibility_flags(p) -> None:
    p.add_argument("--source1", required=True, help="first source name (catalog lookup, latest epoch)")
    p.add_argument("--source2", required=True, help="second source name")
    p.add_argument("--catalog", default="built-in", help="catalog CSV path or 'built-in'")
    p.add_argument("--az1", type=float, default=162.0, help="station-1 telescope azimuth, degrees")
    p.add_argument("--alt1", type=float, default=23.0, help="station-1 telescope altitude, degrees")
    p.add_argument("--az2", type=float, default=352.0, help="station-2 telescope azimuth, degrees")
    p.add_argument("--alt2", type=float, default=24.0, help="station-2 telescope altitude, degrees")
    p.add_argument("--t-window", type=parse_duration, default=8e-6, help="clock window (default 8us)")
    p.add_argument("--t-basis", type=parse_duration, default=1e-6, help="basis-choice time (default 1us)")
    p.add_argument("--t-measurement", type=parse_duration, default=4e-6, help="state-measurement time (default 4us)")
    p.add_argument("--t-margin", type=parse_duration, default=1e-6, help="propagation margin (default 1us)")
    p.add_argument("--lab-sep", type=parse_distance, required=True, help="station separation (e.g. 5km)")
    p.add_argument("--n-fiber", type=float, default=1.45, help="fiber refractive index")
    p.add_argument("--delta-t", type=parse_duration, default=None, help="planned entanglement lead time (default: the minimum admissible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosmicrng",
        description="Cosmic-photon RNG simulation, extraction, certification, and Bell-test planning",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list or show celestial sources")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("--name", help="source name (for show)")
    p.add_argument("--catalog", default="built-in", help="catalog CSV path or 'built-in'")
    _add_out(p)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("simulate", help="generate a detection timestamp stream")
    p.add_argument("--signal-rate", type=float, required=True, help="signal rate, Hz")
    p.add_argument("--background", type=float, default=0.0, help="background rate, Hz")
    p.add_argument("--duration", type=parse_duration, required=True, help="acquisition length (e.g. 10s)")
    p.add_argument("--seed", type=int, required=True, help="RNG seed (mandatory: runs must be reproducible)")
    p.add_argument("--dead-time", type=parse_duration, default=45e-9, help="detector dead time (default 45ns)")
    p.add_argument("--tick", type=parse_duration, default=25e-12, help="TDC tick (default 25ps)")
    _add_out(p, required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("extract", help="timestamps -> time-bin codes (one byte per code)")
    p.add_argument("--timestamps", required=True, help=".cpt1 or text timestamp file")
    p.add_argument("--tick", type=parse_duration, default=25e-12, help="TDC tick of the input (default 25ps)")
    p.add_argument("--t-window", type=parse_duration, default=40.96e-9, help="clock window (default 40.96ns)")
    p.add_argument("--n-bins", type=int, default=256, help="bins per window (default 256)")
    _add_out(p, required=True)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("hist", help="bin-occupancy histogram of a code file (CSV)")
    p.add_argument("--bits", required=True, help="raw byte file from extract")
    p.add_argument("--n-bins", type=int, default=256)
    _add_out(p)
    p.set_defaults(fn=cmd_hist)

    p = sub.add_parser("entropy", help="per-bit min-entropy of a code file (JSON)")
    p.add_argument("--bits", required=True, help="raw byte file from extract")
    p.add_argument("--n-bins", type=int, default=256)
    _add_out(p)
    p.set_defaults(fn=cmd_entropy)

    p = sub.add_parser("analyze", help="run the statistical test battery (JSON; exit 1 on failure)")
    p.add_argument("--bits", required=True, help="raw byte file; bits taken MSB-first")
    p.add_argument("--sequences", type=int, required=True, help="number of sequences")
    p.add_argument("--seq-len", type=int, required=True, help="bits per sequence")
    p.add_argument("--block-m", type=int, default=128, help="block-frequency block size")
    p.add_argument("--serial-m", type=int, default=None, help="serial pattern length (default: by seq-len)")
    p.add_argument("--apen-m", type=int, default=None, help="approximate-entropy pattern length (default: by seq-len)")
    _add_out(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("fit-trend", help="fit log10(true rate) vs magnitude; predict rates")
    p.add_argument("--data", default="built-in", help="photon-counting CSV path or 'built-in'")
    p.add_argument("--max-vmag", type=float, default=planner.TREND_FIT_MAX_VMAG, help="fit only sources brighter than this (default 11)")
    p.add_argument("--predict", type=float, default=None, help="magnitude at which to evaluate the trend")
    p.add_argument("--csv-out", help="also write vmag,log10_rate,fitted plot data")
    _add_out(p)
    p.set_defaults(fn=cmd_fit_trend)

    p = sub.add_parser("feasibility", help="geometry and light-cone report for a source pair (exit 1 if infeasible)")
    _add_feasibility_flags(p)
    _add_out(p)
    p.set_defaults(fn=cmd_feasibility)

    p = sub.add_parser("plan", help="full feasibility report including rates and durations")
    _add_feasibility_flags(p)
    p.add_argument("--r1", type=float, default=planner.DEFAULT_R1_HZ, help="station-1 detection rate, Hz")
    p.add_argument("--r2", type=float, default=planner.DEFAULT_R2_HZ, help="station-2 detection rate, Hz")
    p.add_argument(
        "--p-total", type=float, default=planner.DEFAULT_P_TOTAL,
        help="success probability per attempt (default 2.26e-8; a tenfold-smaller "
             "figure also circulates but contradicts the 0.29 h/event rate)",
    )
    p.add_argument("--n-target", type=int, default=planner.DEFAULT_N_TARGET, help="events needed for a statistically significant violation")
    p.add_argument("--attempt-period", type=parse_duration, default=None, help="attempt period (default 24us)")
    _add_out(p)
    p.set_defaults(fn=cmd_plan)

    return parser


def dispatch(argv: list[str]) -> int:
    """Parse and run one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.fn(args, argv)
    except (ValueError, KeyError, ZeroDivisionError, OSError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

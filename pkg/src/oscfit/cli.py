"""Command-line interface: synthesize or ingest a series, estimate, emit reports.

Outputs are deterministic: identical argv (including the seed) produces
byte-identical files.  Numbers are serialized with 17 significant digits so
every float round-trips exactly.

Exit codes: 0 success, 1 usage error, 2 data error, 3 estimation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .estimate import EstimationReport, PipelineConfig, PipelineResult, run_pipeline
from .exceptions import (
    CsvParseError,
    NonUniformSpacingError,
    OscillationError,
    PipelineError,
    TooShortError,
)
from .model import AcfSpec, OscillatorParams, acf_normalized, evaluate
from .synth import NoiseSpec, TimeSeries, add_gaussian_noise, generate_series
from .validation import uniform_time_grid

_EMIT_CHOICES = ("report", "plots", "acf", "none")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _to_json(value, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "null"
        return _fmt(v)
    if isinstance(value, str):
        import json

        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{_to_json(str(k))}: {_to_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = [f"{inner}{_to_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def ingest_csv(path) -> TimeSeries:
    """Read a two-column ``t,x`` CSV into a TimeSeries.

    Lines starting with ``#`` are skipped, one non-numeric header row is
    tolerated, the time column must be strictly increasing and uniform to
    within 0.1% of the median spacing.
    """
    times = []
    values = []
    header_allowed = True
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = [p.strip() for p in stripped.split(",")]
            try:
                if len(parts) != 2:
                    raise ValueError(f"expected 2 columns, got {len(parts)}")
                t_val, x_val = float(parts[0]), float(parts[1])
            except ValueError as exc:
                if header_allowed and not times:
                    header_allowed = False
                    continue
                raise CsvParseError(lineno, str(exc)) from exc
            header_allowed = False
            times.append(t_val)
            values.append(x_val)
    if len(times) < 2:
        raise TooShortError(f"{path}: need at least 2 data rows, got {len(times)}")
    t0, dt = uniform_time_grid(np.asarray(times))
    return TimeSeries(t0=t0, dt=dt, x=np.asarray(values), label="raw")


def _report_dict(report: EstimationReport | None, include_smoothing: bool = False):
    if report is None:
        return None
    de = None
    if report.de_hat is not None:
        de = {
            "damping_term": report.de_hat.damping_term,
            "stiffness_term": report.de_hat.stiffness_term,
            "roots": [[r.real, r.imag] for r in report.de_hat.roots],
            "equation": report.de_hat.equation(),
        }
    return {
        "method": report.method,
        "C": report.C_hat,
        "b": report.b_hat,
        "alpha": report.alpha_hat,
        "phi_rad": report.phi_hat,
        "phi_deg": math.degrees(report.phi_hat),
        "T": report.T_hat,
        "delta_t": report.dt_hat,
        "de": de,
        "point_count": report.point_count,
        "flags": list(report.flags),
        "errors_vs_truth": report.errors_vs_truth,
    }


def _params_dict(params: OscillatorParams | None):
    if params is None:
        return None
    return {"C": params.C, "b": params.b, "alpha": params.alpha, "phi": params.phi}


def build_report(series: TimeSeries, result: PipelineResult, truth) -> dict:
    choice = result.smoothing
    cset = result.crossings
    return {
        "input": {
            "t0": series.t0,
            "dt": series.dt,
            "samples": len(series),
            "label": series.label,
        },
        "smoothing": {
            "kind": choice.kind,
            "k": choice.k,
            "rms": choice.rms,
            "delay": choice.delay,
            "candidates": [
                {"kind": c.kind, "k": c.k, "rms": c.rms, "error": c.error}
                for c in choice.candidates
            ],
        },
        "extraction": {
            "crossings": [
                {"time": float(t), "direction": int(d), "index": int(k)}
                for t, d, k in zip(cset.times, cset.directions, cset.indices)
            ],
            "midpoints": [
                {"time": p.time, "magnitude": p.magnitude, "sign": p.sign, "k": p.k}
                for p in cset.midpoints
            ],
            "leading_tangent": (
                None
                if cset.leading is None
                else {
                    "time": cset.leading.time,
                    "magnitude": cset.leading.magnitude,
                    "sign": cset.leading.sign,
                    "k": cset.leading.k,
                }
            ),
            "delay_correction": cset.delay_correction,
            "notes": list(cset.notes),
        },
        "estimates": {
            "traditional": _report_dict(result.traditional),
            "proposed": _report_dict(result.proposed),
        },
        "traditional_error": result.traditional_error,
        "truth": _params_dict(truth),
    }


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_report(series, result: PipelineResult, truth, out_dir, emit) -> list[Path]:
    """Write the requested artifacts; returns the list of files written."""
    written = []
    if not emit or emit == {"none"}:
        return written
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if "report" in emit:
        path = out / "report.json"
        path.write_text(_to_json(build_report(series, result, truth)) + "\n", encoding="utf-8")
        written.append(path)

    best = result.proposed.params_hat
    if best is None and result.traditional is not None:
        best = result.traditional.params_hat

    if "plots" in emit:
        filtered = result.filtered
        t = filtered.times
        _write_csv(out / "filtered.csv", "t,x", zip(map(float, t), map(float, filtered.x)))
        written.append(out / "filtered.csv")

        cset = result.crossings
        rows = [("crossing", float(tc), 0.0, int(d)) for tc, d in zip(cset.times, cset.directions)]
        rows += [
            ("midpoint", p.time, p.sign * p.magnitude, p.sign)
            for p in cset.midpoints
            if p.magnitude is not None
        ]
        if cset.leading is not None and cset.leading.magnitude is not None:
            p = cset.leading
            rows.append(("leading_tangent", p.time, p.sign * p.magnitude, p.sign))
        _write_csv(out / "markers.csv", "kind,time,value,sign", rows)
        written.append(out / "markers.csv")

        if best is not None:
            env = best.C * np.exp(-best.b * t)
            _write_csv(
                out / "envelope.csv",
                "t,upper,lower",
                zip(map(float, t), map(float, env), map(float, -env)),
            )
            written.append(out / "envelope.csv")
            _write_csv(
                out / "overlay.csv",
                "t,x_hat",
                zip(map(float, t), map(float, evaluate(best, t))),
            )
            written.append(out / "overlay.csv")

    if "acf" in emit and best is not None:
        window = series.span
        lags = np.linspace(0.0, 2.0 * result.proposed.T_hat, 201)
        rows = [
            (float(lag), acf_normalized(best, AcfSpec(window=window, lag=float(lag))))
            for lag in lags
        ]
        _write_csv(out / "acf.csv", "lag,acf_normalized", rows)
        written.append(out / "acf.csv")

    return written


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this CLI reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="oscfit", description=__doc__.splitlines()[0])
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--synth", action="store_true", help="synthesize a damped sinusoid")
    mode.add_argument("--input", metavar="PATH", help="read a t,x CSV file")
    parser.add_argument("--C", type=float, default=2.0, help="amplitude constant (synth)")
    parser.add_argument("--b", type=float, default=1.0, help="damping coefficient (synth)")
    parser.add_argument("--alpha", type=float, default=math.pi, help="angular frequency (synth)")
    parser.add_argument("--phi", type=float, default=math.pi / 4, help="initial phase (synth)")
    parser.add_argument("--dt", type=float, default=0.005, help="sample interval (synth)")
    parser.add_argument("--duration", type=float, default=5.0, help="record length in seconds (synth)")
    parser.add_argument("--noise", type=float, default=0.0, help="noise level as a fraction of C")
    parser.add_argument("--seed", type=int, default=0, help="noise RNG seed")
    parser.add_argument("--filter", choices=("mean", "median", "both"), default="mean")
    parser.add_argument("--k-candidates", default=None, help="comma list of window lengths")
    parser.add_argument("--truth", default=None, metavar="C,b,alpha,phi")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--emit",
        default="report",
        help=f"comma list from {{{','.join(_EMIT_CHOICES)}}} (default: report)",
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    unknown = emit - set(_EMIT_CHOICES)
    if unknown:
        print(f"oscfit: error: unknown --emit values: {sorted(unknown)}", file=sys.stderr)
        return 1

    kinds = ("mean", "median") if args.filter == "both" else (args.filter,)
    k_candidates = None
    if args.k_candidates:
        try:
            k_candidates = tuple(int(s) for s in args.k_candidates.split(","))
        except ValueError:
            print("oscfit: error: --k-candidates must be a comma list of integers", file=sys.stderr)
            return 1

    truth = None
    if args.truth:
        try:
            c, b, alpha, phi = (float(s) for s in args.truth.split(","))
            truth = OscillatorParams(C=c, b=b, alpha=alpha, phi=phi)
        except ValueError as exc:
            print(f"oscfit: error: bad --truth value: {exc}", file=sys.stderr)
            return 1

    try:
        if args.synth:
            if args.dt <= 0 or args.duration <= args.dt:
                print("oscfit: error: need dt > 0 and duration > dt", file=sys.stderr)
                return 1
            if args.noise < 0:
                print("oscfit: error: --noise must be >= 0", file=sys.stderr)
                return 1
            params = OscillatorParams(C=args.C, b=args.b, alpha=args.alpha, phi=args.phi)
            n = int(round(args.duration / args.dt)) + 1
            series = generate_series(params, t0=0.0, dt=args.dt, n=n)
            if args.noise > 0:
                series = add_gaussian_noise(series, NoiseSpec(args.noise, args.seed), params.C)
        else:
            series = ingest_csv(args.input)
    except ValueError as exc:
        print(f"oscfit: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, CsvParseError, NonUniformSpacingError, TooShortError) as exc:
        print(f"oscfit: data error: {exc}", file=sys.stderr)
        return 2

    config = PipelineConfig(kinds=kinds, k_candidates=k_candidates)
    try:
        result = run_pipeline(series, config, truth=truth)
    except PipelineError as exc:
        print(f"oscfit: estimation failed: {exc}", file=sys.stderr)
        return 3

    try:
        written = emit_report(series, result, truth, args.out, emit)
    except OSError as exc:
        print(f"oscfit: data error writing {getattr(exc, 'filename', args.out)}: {exc}", file=sys.stderr)
        return 2

    for report in (result.proposed, result.traditional):
        if report is None:
            continue
        b_txt = "n/a" if report.b_hat is None else f"{report.b_hat:.6g}"
        c_txt = "n/a" if report.C_hat is None else f"{report.C_hat:.6g}"
        print(
            f"{report.method}: C={c_txt} b={b_txt} alpha={report.alpha_hat:.6g} "
            f"phi={report.phi_hat:.6g} T={report.T_hat:.6g}"
        )
    if result.traditional is None:
        print(f"traditional: unavailable ({result.traditional_error})")
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``ranksize {stats,fit,segment,synth,motion}``.

Each command prints one JSON envelope on stdout::

    {"command": ..., "input_fingerprint": "sha256:...", "result": {...}, "warnings": [...]}

Exit codes: 0 success (a non-converged fit is still a success), 1 usage or
validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from .errors import RankSizeError
from .goodness import compare
from .ingest import parse_records, rank_motion, rank_series, write_series
from .models import FAMILIES, ModelSpec, ParamVector, family_info
from .optimizer import FitOptions, fit
from .segmentation import SegmentationConfig, segment
from .stats import summarize
from .synth import NoiseSpec, Segment, SpliceSpec, TailSuppression, generate, generate_spliced

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(RankSizeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fingerprint(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _clean(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(command, fingerprint, result, warnings, out):
    envelope = {"command": command, "input_fingerprint": fingerprint,
                "result": _clean(result), "warnings": list(warnings)}
    out.write(json.dumps(envelope, indent=2, allow_nan=False) + "\n")


def _column(value: str):
    return int(value) if value.lstrip("-").isdigit() else value


def _load(path, args):
    with open(path, "rb") as fh:
        data = fh.read()
    delimiter = {"comma": ",", "tab": "\t", None: None}[args.delimiter]
    records = parse_records(data, delimiter=delimiter, label_col=args.label_col,
                            size_col=args.size_col)
    return rank_series(records, tie_policy=args.tie_policy), data


def _write_tsv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                             for v in row])


def _fit_options(args) -> FitOptions:
    return FitOptions(max_iterations=args.max_iterations, damping_init=args.damping_init,
                      tol_ssr_rel=args.tol_ssr_rel, tol_grad=args.tol_grad)


def _parse_params(text: str, spec: ModelSpec) -> ParamVector:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        if items and all("=" in t for t in items):
            values = {k.strip(): float(v) for k, v in (t.split("=", 1) for t in items)}
        else:
            values = [float(t) for t in items]
    except ValueError:
        raise UsageError(f"cannot parse --params {text!r}") from None
    return ParamVector.for_model(spec, values)


# -- commands ----------------------------------------------------------------

def cmd_stats(args, out):
    series, data = _load(args.file, args)
    result = summarize(series, bias_corrected=not args.population_moments)
    warnings = []
    if result.degenerate:
        warnings.append("zero variance: mean_over_sigma, skewness and kurtosis are undefined")
    _emit("stats", _fingerprint(data), result.to_dict(), warnings, out)


def cmd_fit(args, out):
    series, data = _load(args.file, args)
    result = fit(args.model, series, _fit_options(args))
    warnings = []
    if not result.converged:
        warnings.append(f"fit did not converge: {result.termination}")
    if args.plot_data:
        ranks = series.ranks
        xs = ranks / (series.n + 1) if args.universal else ranks
        pred = result.predict_ranks(ranks)
        _write_tsv(args.plot_data, ["u" if args.universal else "rank", "observed", "predicted"],
                   zip(xs.tolist(), series.sizes.tolist(), pred.tolist()))
    payload = result.to_dict()
    if args.compare:
        others = [result] + [fit(f, series, _fit_options(args)) for f in args.compare
                             if f != args.model]
        payload = dict(payload, comparison=compare(others).to_list())
    _emit("fit", _fingerprint(data), payload, warnings, out)


def cmd_segment(args, out):
    series, data = _load(args.file, args)
    config = SegmentationConfig(
        smoothing_window=args.window,
        derivative_peak_min_prominence=args.prominence,
        shoulder_window=args.shoulder_window,
        shoulder_rel_threshold=args.shoulder_threshold,
        top_class_max=args.top_max,
    )
    result = segment(series, config, _fit_options(args))
    if args.plot_data:
        ranks = series.ranks
        top = [None] * series.n
        if result.top_fit is not None:
            top[:result.r1] = result.top_fit.predict_ranks(ranks[:result.r1]).tolist()
        middle = [None] * result.r1 + result.middle_fit.predict_ranks(ranks[result.r1:]).tolist()
        rows = zip(ranks.astype(int).tolist(), (ranks / (series.n + 1)).tolist(),
                   series.sizes.tolist(), top, middle,
                   [result.class_of(int(r)) for r in ranks])
        _write_tsv(args.plot_data, ["rank", "u", "observed", "top_fit", "middle_fit", "class"], rows)
    _emit("segment", _fingerprint(data), result.to_dict(), result.warnings, out)


def cmd_synth(args, out):
    n = args.n
    noise = NoiseSpec.gaussian(args.noise, args.seed) if args.noise > 0 else NoiseSpec(seed=args.seed)
    tail = None
    if args.tail_start is not None:
        tail = TailSuppression(args.tail_start, args.tail_depth, args.tail_ramp)
    top_info = None
    if args.top_ranks:
        k = args.top_ranks
        if not 1 <= k < n - 2:
            raise UsageError("--top-ranks must leave at least 3 ranks for the main model")
        main_len = n - k
        spec = ModelSpec(args.model, main_len if family_info(args.model).needs_n else None)
        params = _parse_params(args.params, spec)
        amplitude = params.values[0] if spec.has_amplitude else 1.0
        splice = SpliceSpec((Segment("zipf", (amplitude, args.top_alpha), 1, k),
                             Segment(args.model, params.values, k + 1, n)), True, tail)
        series = generate_spliced(splice, n, noise)
        top_info = {"ranks": k, "alpha": args.top_alpha}
    else:
        spec = ModelSpec(args.model, n if family_info(args.model).needs_n else None)
        params = _parse_params(args.params, spec)
        series = generate(spec, params, n, noise, tail)
    buf = io.StringIO()
    write_series(series, buf)
    text = buf.getvalue().encode("utf-8")
    with open(args.out, "wb") as fh:
        fh.write(text)
    result = {
        "path": str(args.out),
        "n": series.n,
        "model": args.model,
        "params": params.as_dict(),
        "noise": {"kind": noise.kind, "sigma": noise.sigma, "seed": noise.seed},
        "top": top_info,
        "tail": None if tail is None else {"start": tail.start, "depth": tail.depth, "ramp": tail.ramp},
        "output_fingerprint": _fingerprint(text),
    }
    _emit("synth", None, result, [], out)


def cmd_motion(args, out):
    series_a, data_a = _load(args.file_a, args)
    series_b, data_b = _load(args.file_b, args)
    motions = rank_motion(series_a, series_b, args.top)
    # fingerprint of the pair: hash over both file digests
    pair = hashlib.sha256(hashlib.sha256(data_a).digest() + hashlib.sha256(data_b).digest())
    _emit("motion", "sha256:" + pair.hexdigest(), [m.to_dict() for m in motions], [], out)


# -- parser ------------------------------------------------------------------

def _add_input_flags(p):
    p.add_argument("--delimiter", choices=["comma", "tab"], default=None,
                   help="field separator (default: tab if the first line has one, else comma)")
    p.add_argument("--label-col", type=_column, default=0, help="label column index or header name")
    p.add_argument("--size-col", type=_column, default=1, help="size column index or header name")
    p.add_argument("--tie-policy", choices=["label", "input"], default="label")


def _add_fit_flags(p):
    d = FitOptions()
    p.add_argument("--max-iterations", type=int, default=d.max_iterations)
    p.add_argument("--damping-init", type=float, default=d.damping_init)
    p.add_argument("--tol-ssr-rel", type=float, default=d.tol_ssr_rel)
    p.add_argument("--tol-grad", type=float, default=d.tol_grad)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ranksize", description="Rank-size law fitting and class segmentation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="descriptive statistics of the sizes")
    p.add_argument("file")
    _add_input_flags(p)
    p.add_argument("--population-moments", action="store_true",
                   help="uncorrected skewness/kurtosis instead of the bias-corrected ones")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fit", help="fit one model family by Levenberg-Marquardt")
    p.add_argument("file")
    p.add_argument("--model", required=True, choices=FAMILIES, metavar="FAMILY",
                   help="one of: " + ", ".join(FAMILIES))
    p.add_argument("--universal", action="store_true",
                   help="plot data against u = r/(N+1) instead of rank")
    p.add_argument("--plot-data", metavar="PATH", help="write rank/u, observed, predicted as TSV")
    p.add_argument("--compare", nargs="+", choices=FAMILIES, metavar="FAMILY",
                   help="also fit these families and rank all fits by R^2")
    _add_input_flags(p)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    d = SegmentationConfig()
    p = sub.add_parser("segment", help="top / middle / tail class decomposition")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=d.smoothing_window)
    p.add_argument("--prominence", type=float, default=None,
                   help="minimum derivative-peak prominence (default: 2 x median |d|)")
    p.add_argument("--shoulder-window", type=int, default=d.shoulder_window)
    p.add_argument("--shoulder-threshold", type=float, default=d.shoulder_rel_threshold)
    p.add_argument("--top-max", type=int, default=d.top_class_max)
    p.add_argument("--plot-data", metavar="PATH",
                   help="write observed sizes and per-class fitted curves as TSV")
    _add_input_flags(p)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("synth", help="write a synthetic ranked series")
    p.add_argument("--model", required=True, choices=FAMILIES, metavar="FAMILY",
                   help="one of: " + ", ".join(FAMILIES))
    p.add_argument("--params", required=True,
                   help="comma-separated values in family order, or name=value pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0, help="relative Gaussian noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--top-ranks", type=int, default=0,
                   help="prepend a power-law top class of this many ranks")
    p.add_argument("--top-alpha", type=float, default=0.17)
    p.add_argument("--tail-start", type=int, default=None,
                   help="suppress sizes from this rank on")
    p.add_argument("--tail-depth", type=float, default=0.2)
    p.add_argument("--tail-ramp", type=int, default=1)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("motion", help="rank motion between two rankings")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--top", type=int, required=True, metavar="K")
    _add_input_flags(p)
    p.set_defaults(func=cmd_motion)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except OSError as exc:
        print(f"ranksize {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RankSizeError, ValueError) as exc:
        print(f"ranksize {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

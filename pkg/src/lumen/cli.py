"""Command-line front end.

Exit codes: 0 success, 2 file problems, 3 bad parameters, 4 incompatible
inputs.  Every failure prints a single diagnostic line to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .core import EnhanceParams, RgbImage
from .enhance import lanczos3_resize
from .errors import ImageFormatError, MismatchError, ParameterError
from .harness import (
    DEFAULT_CLIP,
    METHODS,
    MethodSpec,
    emit_report,
    run_benchmark,
    score_metric,
    synthetic_suite,
)
from .image_io import load_image, save_image

ENHANCE_CHOICES = ("pm", "hwb", "he", "ahe", "clahe")
BENCH_METHODS = "pm,hwb,he,ahe,clahe"
DEFAULT_METRICS = "ssim,fsimc"


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; remap them to 3."""

    def error(self, message):
        raise ParameterError(message)


def _split_list(raw: str) -> list:
    items = [part.strip() for part in raw.split(",")]
    return [part for part in items if part]


def _method_params(name: str, args) -> dict:
    """Parameter dict for one method, validated before any file I/O."""
    if name == "pm":
        if not 0.0 < args.delta < 1.0:
            raise ParameterError(
                f"--delta must lie strictly inside (0, 1), got {args.delta}")
        EnhanceParams(delta=args.delta, beta=args.beta, omega=args.omega)
        return {"delta": args.delta, "beta": args.beta, "omega": args.omega}
    params = {}
    if name in ("ahe", "clahe") and args.tile is not None:
        if args.tile < 2:
            raise ParameterError(f"--tile must be at least 2, got {args.tile}")
        params["tile"] = args.tile
    if name == "clahe":
        if not 0.0 < args.clip <= 1.0:
            raise ParameterError(f"--clip must lie in (0, 1], got {args.clip}")
        params["clip"] = args.clip
    return params


def _add_enhance_flags(parser) -> None:
    parser.add_argument("--delta", type=float, default=0.4,
                        help="dark/bright threshold on the value channel")
    parser.add_argument("--beta", type=float, default=1.475,
                        help="base of the brightness-dependent divisor")
    parser.add_argument("--omega", type=float, default=0.025,
                        help="per-bin increment of the divisor")
    parser.add_argument("--tile", type=int, default=None,
                        help="tile side in pixels for ahe/clahe "
                             "(default: short side / 8)")
    parser.add_argument("--clip", type=float, default=DEFAULT_CLIP,
                        help="clahe histogram clip as a fraction of tile area")


def cmd_enhance(args) -> int:
    params = _method_params(args.method, args)
    img = load_image(args.input)
    out = METHODS[args.method](img, params)
    save_image(out, args.output)
    return 0


def cmd_compare(args) -> int:
    methods = _split_list(args.methods)
    if not methods:
        raise ParameterError("--methods must name at least one method")
    for name in methods:
        if name not in ENHANCE_CHOICES:
            raise ParameterError(
                f"unknown method {name!r}; known: {list(ENHANCE_CHOICES)}")
    all_params = {name: _method_params(name, args) for name in methods}
    img = load_image(args.input)
    panels = [img.pixels]
    panels += [METHODS[name](img, all_params[name]).pixels for name in methods]
    composite = RgbImage(np.concatenate(panels, axis=1))
    out_path = args.out
    if out_path is None:
        src = Path(args.input)
        out_path = src.with_name(f"{src.stem}_vs_{'-'.join(methods)}{src.suffix}")
    save_image(composite, out_path)
    print(str(out_path))
    return 0


def cmd_metrics(args) -> int:
    metric_ids = _split_list(args.metrics)
    if not metric_ids:
        raise ParameterError("--metrics must name at least one metric")
    ref = load_image(args.reference)
    test = load_image(args.test)
    lines = []
    for mid in metric_ids:
        score = score_metric(mid, ref, test)
        if score.ok():
            lines.append(f"{mid}={score.value:.4f}")
        else:
            lines.append(f"{mid}=ERR:{score.error}")
    print("\n".join(lines))
    return 0


def _load_dir(directory) -> list:
    root = Path(directory)
    files = sorted(p for p in root.iterdir()
                   if p.suffix.lower() in (".png", ".ppm"))
    if not files:
        raise ImageFormatError(f"{root}: no .png or .ppm files found")
    pairs = []
    for path in files:
        try:
            pairs.append((path.name, load_image(path)))
        except OSError:
            pairs.append((path.name, None))
    return pairs


def cmd_bench(args) -> int:
    methods = _split_list(args.methods)
    metric_ids = _split_list(args.metrics)
    specs = [MethodSpec(name, _method_params(name, args)) for name in methods]
    if args.synthetic is not None:
        images = synthetic_suite(args.synthetic)
    else:
        images = _load_dir(args.dir)
    table = run_benchmark(images, specs, metric_ids)
    fmt = args.format
    if fmt is None:
        fmt = "json" if str(args.out).lower().endswith(".json") else "csv"
    emit_report(table, fmt, args.out)
    return 0


def cmd_resize(args) -> int:
    if args.scale <= 0.0:
        raise ParameterError(f"--scale must be positive, got {args.scale}")
    img = load_image(args.input)
    save_image(lanczos3_resize(img, args.scale), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lumen",
                     description="Capsule-frame contrast enhancement toolkit.")
    sub = parser.add_subparsers(dest="command")
    parser.set_defaults(func=None)

    p_enh = sub.add_parser("enhance", help="enhance one image")
    p_enh.add_argument("input")
    p_enh.add_argument("output")
    p_enh.add_argument("--method", choices=ENHANCE_CHOICES, default="pm")
    _add_enhance_flags(p_enh)
    p_enh.set_defaults(func=cmd_enhance)

    p_cmp = sub.add_parser(
        "compare", help="write a side-by-side composite of several methods")
    p_cmp.add_argument("input")
    p_cmp.add_argument("--methods", default="pm,he,clahe",
                       help="comma-separated method list")
    p_cmp.add_argument("--out", default=None,
                       help="composite path (default: input stem plus "
                            "a method-list suffix)")
    _add_enhance_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_met = sub.add_parser("metrics", help="score a test image against a reference")
    p_met.add_argument("reference")
    p_met.add_argument("test")
    p_met.add_argument("--metrics", default=DEFAULT_METRICS,
                       help="comma-separated metric list")
    p_met.set_defaults(func=cmd_metrics)

    p_ben = sub.add_parser("bench", help="run the benchmark matrix")
    source = p_ben.add_mutually_exclusive_group(required=True)
    source.add_argument("--synthetic", type=int, metavar="N",
                        help="generate N deterministic vignettes")
    source.add_argument("--dir", metavar="PATH",
                        help="score every .png/.ppm file in a directory")
    p_ben.add_argument("--methods", default=BENCH_METHODS)
    p_ben.add_argument("--metrics", default=DEFAULT_METRICS)
    p_ben.add_argument("--out", default="report.csv")
    p_ben.add_argument("--format", choices=("csv", "json"), default=None,
                       help="default: inferred from --out extension")
    _add_enhance_flags(p_ben)
    p_ben.set_defaults(func=cmd_bench)

    p_res = sub.add_parser("resize", help="rescale an image with a Lanczos filter")
    p_res.add_argument("input")
    p_res.add_argument("output")
    p_res.add_argument("--scale", type=float, required=True)
    p_res.set_defaults(func=cmd_resize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.func is None:
            parser.print_usage(sys.stderr)
            return 3
        return args.func(args)
    except MismatchError as exc:
        print(f"lumen: {exc}", file=sys.stderr)
        return 4
    except ParameterError as exc:
        print(f"lumen: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"lumen: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()

"""Command-line surface: fuse pairs or directories, emit references, masks,
metrics and traces, and run the robustness / baseline-comparison bench.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numeric failure (non-finite loss).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .fuser import FuserConfig, NumericError, fuse, fuse_masked
from .image import (
    clamp01,
    is_grayscale,
    load_image,
    recompose,
    save_image,
    to_luminance,
)
from .losses import BASELINE_KINDS, LossWeights
from .masking import default_patch_size, gen_mask_pair
from .metrics import CSV_HEADER, MetricsReport, metrics_all
from .reference import synthesize_reference

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

IMAGE_EXTENSIONS = (".png", ".pgm", ".ppm")

DEFAULTS: dict[str, object] = {
    "alpha": 0.75,
    "lambda1": 5.0,
    "lambda2": 1.0,
    "eps": 1e-8,
    "step": 1e-2,
    "iters": 300,
    "tol": 1e-5,
    "init": "reference",
    "edge_sign": 1,
    "k": None,  # None -> half the shorter image dimension
    "seed": 0,
    "jobs": None,  # None -> logical CPU count
    "format": "csv",
}

METRIC_NAMES = ("en", "sd", "sf", "ag", "scd", "vif", "qabf", "ssim")


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; remap to 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="reference blend weight (default 0.75)")
    common.add_argument("--lambda1", type=float, help="gradient magnitude weight (default 5)")
    common.add_argument("--lambda2", type=float, help="gradient direction weight (default 1)")
    common.add_argument("--eps", type=float, help="cosine-similarity guard (default 1e-8)")
    common.add_argument("--step", type=float, help="optimizer step size (default 1e-2)")
    common.add_argument("--iters", type=int, help="optimizer iteration budget (default 300)")
    common.add_argument("--tol", type=float, help="relative-change stopping tolerance (default 1e-5)")
    common.add_argument("--init", choices=("reference", "max", "average"), help="fused-plane initialization")
    common.add_argument("--edge-sign", type=int, choices=(1, -1), dest="edge_sign", help="sign of the Laplacian edge injection")
    common.add_argument("--k", type=int, help="mask patch side length (default: half the shorter dimension)")
    common.add_argument("--seed", type=int, help="RNG seed (default 0)")
    common.add_argument("--jobs", type=int, help="bench worker count (default: CPU count)")
    common.add_argument("--format", choices=("csv", "markdown"), help="table output format")
    common.add_argument("--config", help="TOML config file (flags take precedence)")

    parser = _Parser(prog="varfuse", description="Variational visible-infrared image fusion engine.")
    parser.add_argument("--version", action="version", version=f"varfuse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", parents=[common], help="fuse one registered ir/vi pair")
    p.add_argument("ir", help="infrared image path")
    p.add_argument("vi", help="visible image path")
    p.add_argument("out", help="fused output image path")
    p.add_argument("--trace", help="write the per-iteration loss trace CSV here")
    p.add_argument("--metrics", help="append a metrics CSV row to this file")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("ref", parents=[common], help="write the reference synthesis stages")
    p.add_argument("ir")
    p.add_argument("vi")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_ref)

    p = sub.add_parser("mask", parents=[common], help="write a complementary mask pair and the masked inputs")
    p.add_argument("ir")
    p.add_argument("vi")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("bench", parents=[common], help="batch-fuse a pairs directory and tabulate metrics")
    p.add_argument("pairs", help="directory containing ir/ and vi/ subdirectories")
    p.add_argument("outdir")
    p.add_argument("--baselines", action="store_true", help="also run the classical baseline objectives")
    p.add_argument("--masked", action="store_true", help="run the information-missing robustness protocol")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("metrics", parents=[common], help="score an externally produced fused image")
    p.add_argument("fused")
    p.add_argument("ir")
    p.add_argument("vi")
    p.add_argument("--out", help="append the CSV row to this file instead of stdout only")
    p.set_defaults(func=cmd_metrics)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the optional TOML config file and explicit flags."""
    conf = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            loaded = tomllib.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        conf.update(loaded)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            conf[key] = flag
    return conf


def fuser_config(conf: dict) -> FuserConfig:
    return FuserConfig(
        init=str(conf["init"]),
        step_size=float(conf["step"]),
        max_iters=int(conf["iters"]),
        rel_tol=float(conf["tol"]),
        weights=LossWeights(
            lambda1=float(conf["lambda1"]),
            lambda2=float(conf["lambda2"]),
            alpha=float(conf["alpha"]),
            eps=float(conf["eps"]),
        ),
        edge_sign=int(conf["edge_sign"]),
    )


def _write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _append_csv_row(path: str, row: str) -> None:
    new = not os.path.exists(path)
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write(CSV_HEADER + "\n")
        fh.write(row + "\n")


def _load_pair(ir_path: str, vi_path: str):
    """Load a registered pair; returns (ir_lum, vi_lum, vi_color, vi_chroma)."""
    ir_color = load_image(ir_path)
    vi_color = load_image(vi_path)
    ir_lum, _ = to_luminance(ir_color)
    vi_lum, vi_chroma = to_luminance(vi_color)
    if ir_lum.shape != vi_lum.shape:
        h1, w1 = ir_lum.shape
        h2, w2 = vi_lum.shape
        raise ValueError(f"dimension mismatch: ir is {w1}x{h1} but vi is {w2}x{h2}")
    return ir_lum, vi_lum, vi_color, vi_chroma


def derive_seed(seed: int, stem: str) -> int:
    """Per-pair seed: global seed XOR a stable hash of the filename stem."""
    digest = hashlib.sha256(stem.encode("utf-8")).digest()
    return (int(seed) ^ int.from_bytes(digest[:8], "big")) & (2**64 - 1)


def _effective_k(conf: dict, shape: tuple[int, int]) -> int:
    if conf["k"] is not None:
        return int(conf["k"])
    return default_patch_size(shape[1], shape[0])


def _config_echo(command: str, conf: dict, extra: dict | None = None) -> list[str]:
    lines = [f"# varfuse {command} {__version__}"]
    items = {k: conf[k] for k in sorted(DEFAULTS)}
    if extra:
        items.update(extra)
    for key, value in items.items():
        lines.append(f"# {key} = {value}")
    return lines


def cmd_fuse(args: argparse.Namespace, conf: dict) -> int:
    ir_lum, vi_lum, vi_color, vi_chroma = _load_pair(args.ir, args.vi)
    cfg = fuser_config(conf)
    fused, trace = fuse(ir_lum, vi_lum, cfg)
    if is_grayscale(vi_color):
        save_image(fused, args.out)
    else:
        save_image(recompose(fused, vi_chroma), args.out)
    if args.trace:
        _write_text(args.trace, "\n".join(trace.csv_rows()) + "\n")
    if args.metrics:
        report = metrics_all(fused, ir_lum, vi_lum)
        _append_csv_row(args.metrics, report.csv_row(args.out))
    final = dict(trace.breakdowns[-1].as_dict())
    final.update({"iterations": trace.iterations_run, "terminated_by": trace.terminated_by})
    print(json.dumps(final))
    return EXIT_OK


def cmd_ref(args: argparse.Namespace, conf: dict) -> int:
    ir_lum, vi_lum, _, _ = _load_pair(args.ir, args.vi)
    bundle = synthesize_reference(
        ir_lum, vi_lum, float(conf["alpha"]), int(conf["edge_sign"])
    )
    os.makedirs(args.outdir, exist_ok=True)
    # The signed edge map is offset-encoded for visualization: (v + 1) / 2.
    save_image(clamp01((bundle.i_edge + 1.0) / 2.0), os.path.join(args.outdir, "i_edge.png"))
    save_image(bundle.i_en, os.path.join(args.outdir, "i_en.png"))
    save_image(bundle.i_eq, os.path.join(args.outdir, "i_eq.png"))
    save_image(bundle.i_ref, os.path.join(args.outdir, "i_ref.png"))
    return EXIT_OK


def cmd_mask(args: argparse.Namespace, conf: dict) -> int:
    ir_lum, vi_lum, _, _ = _load_pair(args.ir, args.vi)
    h, w = ir_lum.shape
    k = _effective_k(conf, ir_lum.shape)
    seed = int(conf["seed"])
    masks = gen_mask_pair(w, h, k, seed)
    ir_m = ir_lum * masks.m_ir
    vi_m = vi_lum * masks.m_vi
    os.makedirs(args.outdir, exist_ok=True)
    save_image(masks.m_ir, os.path.join(args.outdir, "m_ir.pgm"))
    save_image(masks.m_vi, os.path.join(args.outdir, "m_vi.pgm"))
    save_image(ir_m, os.path.join(args.outdir, "masked_ir.png"))
    save_image(vi_m, os.path.join(args.outdir, "masked_vi.png"))
    sidecar = {
        "seed": seed,
        "k": k,
        "x0": masks.patch.x0,
        "y0": masks.patch.y0,
        "width": w,
        "height": h,
    }
    _write_text(
        os.path.join(args.outdir, "mask.json"), json.dumps(sidecar, indent=2) + "\n"
    )
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace, conf: dict) -> int:
    fused_color = load_image(args.fused)
    fused_lum, _ = to_luminance(fused_color)
    ir_lum, vi_lum, _, _ = _load_pair(args.ir, args.vi)
    if fused_lum.shape != ir_lum.shape:
        h1, w1 = fused_lum.shape
        h2, w2 = ir_lum.shape
        raise ValueError(f"dimension mismatch: fused is {w1}x{h1} but sources are {w2}x{h2}")
    report = metrics_all(fused_lum, ir_lum, vi_lum)
    row = report.csv_row(args.fused)
    if conf["format"] == "markdown":
        print(_markdown_table([("path", args.fused, report)]))
    else:
        print(CSV_HEADER)
        print(row)
    if args.out:
        _append_csv_row(args.out, row)
    return EXIT_OK


def _markdown_table(rows: list[tuple[str, str, MetricsReport]]) -> str:
    head = rows[0][0]
    lines = [
        f"| {head} | " + " | ".join(METRIC_NAMES) + " |",
        "| --- |" + " --- |" * len(METRIC_NAMES),
    ]
    for _, label, report in rows:
        lines.append(
            f"| {label} | " + " | ".join(f"{v:.4f}" for v in report.values()) + " |"
        )
    return "\n".join(lines)


def _find_pairs(pairs_dir: str) -> list[tuple[str, str, str]]:
    ir_dir = os.path.join(pairs_dir, "ir")
    vi_dir = os.path.join(pairs_dir, "vi")
    if not (os.path.isdir(ir_dir) and os.path.isdir(vi_dir)):
        raise ValueError(f"{pairs_dir} must contain ir/ and vi/ subdirectories")

    def stems(d: str) -> dict[str, str]:
        found = {}
        for name in sorted(os.listdir(d)):
            stem, ext = os.path.splitext(name)
            if ext.lower() in IMAGE_EXTENSIONS and stem not in found:
                found[stem] = os.path.join(d, name)
        return found

    ir_files = stems(ir_dir)
    vi_files = stems(vi_dir)
    common = sorted(set(ir_files) & set(vi_files))
    return [(stem, ir_files[stem], vi_files[stem]) for stem in common]


def _bench_one(stem: str, ir_path: str, vi_path: str, conf: dict, outdir: str,
               masked: bool, baselines: bool):
    """Fuse one pair under every requested objective; returns metric rows."""
    ir_lum, vi_lum, _, _ = _load_pair(ir_path, vi_path)
    cfg = fuser_config(conf)
    pair_seed = derive_seed(int(conf["seed"]), stem)
    masks = None
    if masked:
        h, w = ir_lum.shape
        masks = gen_mask_pair(w, h, _effective_k(conf, ir_lum.shape), pair_seed)

    methods = ["angular"] + (list(BASELINE_KINDS) if baselines else [])
    rows = []
    for method in methods:
        if masks is not None:
            fused, _ = fuse_masked(ir_lum, vi_lum, masks, cfg, objective=method)
        else:
            fused, _ = fuse(ir_lum, vi_lum, cfg, objective=method)
        subdir = "fused" if method == "angular" else f"fused-{method}"
        rel = os.path.join(subdir, f"{stem}.png")
        save_image(fused, os.path.join(outdir, rel))
        # Metrics are always scored against the unmasked sources.
        rows.append((method, rel.replace(os.sep, "/"), metrics_all(fused, ir_lum, vi_lum)))
    return rows


def cmd_bench(args: argparse.Namespace, conf: dict) -> int:
    pairs = _find_pairs(args.pairs)
    if not pairs:
        print(f"error: no filename-matched pairs under {args.pairs}", file=sys.stderr)
        return EXIT_IO

    os.makedirs(args.outdir, exist_ok=True)
    methods = ["angular"] + (list(BASELINE_KINDS) if args.baselines else [])
    for method in methods:
        sub = "fused" if method == "angular" else f"fused-{method}"
        os.makedirs(os.path.join(args.outdir, sub), exist_ok=True)

    jobs = int(conf["jobs"]) if conf["jobs"] is not None else (os.cpu_count() or 1)
    jobs = max(1, jobs)

    def worker(item):
        stem, ir_path, vi_path = item
        try:
            return _bench_one(stem, ir_path, vi_path, conf, args.outdir,
                              args.masked, args.baselines)
        except (OSError, ValueError) as exc:
            print(f"warning: skipping pair {stem!r}: {exc}", file=sys.stderr)
            return None

    if jobs == 1:
        results = [worker(item) for item in pairs]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(worker, pairs))

    succeeded = [r for r in results if r is not None]
    if not succeeded:
        print("error: no pair could be processed", file=sys.stderr)
        return EXIT_IO

    extra = {"masked": args.masked, "baselines": args.baselines, "pairs": len(succeeded)}
    echo = _config_echo("bench", conf, extra)

    per_pair_lines = echo + [CSV_HEADER]
    sums: dict[str, np.ndarray] = {m: np.zeros(len(METRIC_NAMES)) for m in methods}
    for rows in succeeded:
        for method, rel, report in rows:
            per_pair_lines.append(report.csv_row(rel))
            sums[method] += np.array(report.values())
    _write_text(os.path.join(args.outdir, "per_pair.csv"), "\n".join(per_pair_lines) + "\n")

    n = len(succeeded)
    aggregates = [(m, MetricsReport(*(sums[m] / n))) for m in methods]
    if conf["format"] == "markdown":
        lines = [line[2:] if line.startswith("# ") else line for line in echo]
        lines += ["", "| method | " + " | ".join(METRIC_NAMES) + " |",
                  "| --- |" + " --- |" * len(METRIC_NAMES)]
        for method, report in aggregates:
            lines.append("| " + method + " | " +
                         " | ".join(f"{v:.4f}" for v in report.values()) + " |")
        _write_text(os.path.join(args.outdir, "aggregate.md"), "\n".join(lines) + "\n")
    else:
        lines = echo + [CSV_HEADER]
        for method, report in aggregates:
            lines.append(report.csv_row(method))
        _write_text(os.path.join(args.outdir, "aggregate.csv"), "\n".join(lines) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        conf = resolve_config(args)
        return args.func(args, conf)
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

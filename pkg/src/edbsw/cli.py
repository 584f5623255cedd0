"""``edbsw`` command line: detect, compare, filters, ablate.

Exit codes: 0 success, 2 input or parameter error, 3 pipeline error,
4 filter-bank construction failure.
"""

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__, baselines, filterbank, imio, metrics, pipeline
from .errors import ConstructionError, EdbswError, ParameterError, StageError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PIPELINE = 3
EXIT_FILTER = 4

OPERATORS = baselines.OPERATORS + ("edbsw",)
DEFAULT_OPERATORS = OPERATORS
VARIANTS = {
    "edbsw": (),
    "edbsw-woI": ("disable_branch1",),
    "edbsw-woIII": ("disable_selector",),
    "edbsw-woI-II": ("disable_branch1", "disable_branch2"),
}
ABLATION_NAMES = tuple(v for v in VARIANTS if v != "edbsw")
CSV_HEADER = ("image_id", "operator", "wavelet", "mse", "psnr_db", "ssim", "entropy", "wall_ms")
WAVELETS = ("bcssw",) + filterbank.STANDARD_NAMES


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- helpers


def _split(text):
    return [p.strip() for p in str(text).split(",") if p.strip()]


def _fmt(value):
    if isinstance(value, float) and np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def _jobs_default():
    raw = os.environ.get("EDBSW_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _manifest_path(out):
    return Path(str(out) + ".manifest.json")


def _write_manifest(out, doc):
    doc = {"tool": "edbsw", "version": __version__, **doc}
    imio.atomic_write_text(_manifest_path(out), json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _jsonable(mapping):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in mapping.items()}


def _load_config(args):
    """Config file (if any) overlaid with explicit command-line flags."""
    mapping = {}
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise CliError(EXIT_INPUT, f"cannot read config {args.config}: {exc.strerror}")
        mapping.update(pipeline.PipelineConfig.from_text(text).to_mapping())
    for key in ("wavelet", "L", "taps", "degree", "alpha"):
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value
    return pipeline.PipelineConfig.from_mapping(mapping)


def _read(path):
    try:
        return imio.read_image(path)
    except imio.ImageReadError as exc:
        raise CliError(EXIT_INPUT, str(exc))


# ---------------------------------------------------------------- detect


def cmd_detect(args):
    cfg = _load_config(args)
    img = _read(args.input)
    try:
        edges, trace = pipeline.edbsw_detect(img, cfg, keep_trace=bool(args.trace_dir))
    except StageError as exc:
        raise CliError(EXIT_PIPELINE, str(exc))
    imio.write_png(args.output, edges)
    if args.trace_dir:
        for name, grid in trace.maps.items():
            stem = name.replace("'", "p")
            peak = np.max(np.abs(grid)) if grid.size else 0.0
            shown = np.abs(grid) / peak if peak > 0 else np.zeros_like(grid)
            imio.write_png(Path(args.trace_dir) / f"{stem}.png", shown)
    _write_manifest(
        args.output,
        {
            "command": "detect",
            "inputs": [str(args.input)],
            "output": str(args.output),
            "config": _jsonable(cfg.to_mapping()),
            "timings_ms": trace.timings_ms,
            "items": [{"image_id": Path(args.input).stem, "status": "ok"}],
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------- batch


def _detector(operator, wavelet, cfg, bparams):
    """Return ``img -> edge map`` for one (operator, wavelet) cell."""
    wcfg = replace(cfg, wavelet=wavelet)
    if operator in VARIANTS:
        vcfg = wcfg.with_ablation(*VARIANTS[operator])
        return lambda img: pipeline.ablate(img, vcfg)
    if operator == "wtmm":
        params = replace(bparams, operator="wtmm", wtmm_bank=wavelet)
        return lambda img: baselines.wtmm(img, params, bank=wcfg.bank())
    params = replace(bparams, operator=operator)
    return lambda img: baselines.run_baseline(operator, img, params)


def _run_cell(task):
    """Worker: evaluate one image against every (operator, wavelet) pair."""
    image_id, path, gt_path, cells, cfg_map, bdict, reference = task
    cfg = pipeline.PipelineConfig.from_mapping(cfg_map)
    bparams = baselines.BaselineParams(**bdict)
    rows, status = [], []
    try:
        img = imio.read_image(path)
        ref_img = imio.read_image(gt_path) if gt_path else None
    except imio.ImageReadError as exc:
        return rows, [{"image_id": image_id, "status": f"input error: {exc}"}]
    for operator, wavelet in cells:
        try:
            t0 = time.perf_counter()
            edges = _detector(operator, wavelet, cfg, bparams)(img)
            wall = 1e3 * (time.perf_counter() - t0)
            if reference == "ground_truth":
                ref = ref_img
            elif reference == "input":
                ref = img
            else:
                ref = _detector(reference, wavelet, cfg, bparams)(img)
            rep = metrics.evaluate(edges, ref, operator, image_id)
        except (EdbswError, ValueError, ArithmeticError) as exc:
            status.append(
                {"image_id": image_id, "operator": operator, "wavelet": wavelet, "status": f"error: {exc}"}
            )
            continue
        rows.append(
            (image_id, operator, wavelet, rep.mse, rep.psnr_db, rep.ssim, rep.entropy, wall)
        )
        status.append({"image_id": image_id, "operator": operator, "wavelet": wavelet, "status": "ok"})
    return rows, status


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in sorted(rows, key=lambda r: r[:3]):
        writer.writerow(list(row[:3]) + [_fmt(float(v)) for v in row[3:]])
    return buf.getvalue()


def _plan_from_args(args, command, operators):
    images = _collect_inputs(args.input_dir)
    gt = None
    if args.gt_dir:
        try:
            gt = {p.stem: str(p) for p in reversed(imio.list_images(args.gt_dir))}
        except imio.ImageReadError as exc:
            raise CliError(EXIT_INPUT, str(exc))
    reference = "ground_truth" if gt is not None else args.reference
    wavelets = _split(args.wavelets)
    bad = [w for w in wavelets if w.lower() not in WAVELETS]
    if bad or not wavelets:
        raise CliError(EXIT_INPUT, f"unknown or empty wavelet list: {bad or args.wavelets!r}")
    cfg = _load_config(args)
    bparams = asdict(baselines.BaselineParams())
    return {
        "command": command,
        "inputs": [str(p) for p in images],
        "ground_truth": gt,
        "reference": reference,
        "operators": operators,
        "wavelets": [w.lower() for w in wavelets],
        "config": _jsonable(cfg.to_mapping()),
        "baseline": bparams,
        "output": str(args.output),
    }


def _collect_inputs(directory):
    try:
        images = imio.list_images(directory)
    except imio.ImageReadError as exc:
        raise CliError(EXIT_INPUT, str(exc))
    if not images:
        raise CliError(EXIT_INPUT, f"{directory}: no PNG/PGM images found")
    return images


def _execute(plan, jobs):
    cells = [(o, w) for o in plan["operators"] for w in plan["wavelets"]]
    gt = plan["ground_truth"]
    tasks = []
    missing = []
    for path in plan["inputs"]:
        image_id = Path(path).stem
        gt_path = None
        if plan["reference"] == "ground_truth":
            gt_path = gt.get(image_id)
            if gt_path is None:
                missing.append({"image_id": image_id, "status": "input error: no ground truth"})
                continue
        tasks.append((image_id, path, gt_path, cells, plan["config"], plan["baseline"], plan["reference"]))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]
    rows = [r for rs, _ in results for r in rs]
    items = missing + [s for _, ss in results for s in ss]
    imio.atomic_write_text(plan["output"], _csv_text(rows))
    _write_manifest(plan["output"], {**plan, "items": sorted(items, key=lambda d: tuple(map(str, d.values())))})
    failed = [s for s in items if s["status"] != "ok"]
    for s in failed:
        print(f"edbsw: {s['image_id']}: {s['status']}", file=sys.stderr)
    if not rows:
        return EXIT_INPUT if all(s["status"].startswith("input") for s in failed) else EXIT_PIPELINE
    return EXIT_PIPELINE if failed else EXIT_OK


def _from_manifest(args, command):
    try:
        plan = json.loads(Path(args.from_manifest).read_text())
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"cannot load manifest {args.from_manifest}: {exc}")
    if plan.get("command") != command:
        raise CliError(EXIT_INPUT, f"manifest was written by {plan.get('command')!r}, not {command!r}")
    keys = ("command", "inputs", "ground_truth", "reference", "operators", "wavelets", "config", "baseline", "output")
    plan = {k: plan[k] for k in keys}
    if args.output:
        plan["output"] = str(args.output)
    return plan


def _batch_plan(args, command, operators):
    if args.from_manifest:
        return _from_manifest(args, command)
    if not args.input_dir or not args.output:
        raise CliError(EXIT_INPUT, "input directory and --output are required")
    return _plan_from_args(args, command, operators)


def cmd_compare(args):
    operators = _split(args.operators)
    bad = [o for o in operators if o not in OPERATORS]
    if bad or not operators:
        raise CliError(EXIT_INPUT, f"unknown or empty operator list: {bad or args.operators!r}")
    return _execute(_batch_plan(args, "compare", operators), args.jobs)


def cmd_ablate(args):
    names = _split(args.ablations)
    bad = [n for n in names if n not in ABLATION_NAMES]
    if bad or not names:
        raise CliError(EXIT_INPUT, f"ablation list must be a non-empty subset of {ABLATION_NAMES}")
    return _execute(_batch_plan(args, "ablate", ["edbsw"] + names), args.jobs)


# ---------------------------------------------------------------- filters


def cmd_filters(args):
    name = args.wavelet.lower()
    try:
        if name == "bcssw":
            bank, report = filterbank.derive_bcssw(L=args.L, degree=args.degree, taps=args.taps)
        else:
            bank = filterbank.standard_bank(name)
            report = filterbank.verify_pr(bank)
    except ConstructionError as exc:
        raise CliError(EXIT_FILTER, f"{exc} (deviation {exc.deviation:.3e})")
    except (ParameterError, LookupError) as exc:
        raise CliError(EXIT_INPUT, str(exc))
    text = filterbank.bank_to_json(bank, report)
    if args.output:
        imio.atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(prog="edbsw", description="Spline-wavelet edge detection toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def pipeline_flags(p):
        p.add_argument("--config", help="flat 'key = value' pipeline configuration file")
        p.add_argument("--L", type=int, help="BCSSW vanishing-moment sum (>= 3)")
        p.add_argument("--taps", type=int, help="BCSSW filter length (odd)")
        p.add_argument("--degree", type=int, help="cosine degree of the periodized ratio")
        p.add_argument("--alpha", type=float, help="fusion weight in [0, 1]")

    p = sub.add_parser("detect", help="edge map of one image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="output PNG")
    p.add_argument("--wavelet", help="bcssw or a standard bank name")
    p.add_argument("--trace-dir", help="dump every intermediate map as PNG here")
    pipeline_flags(p)
    p.set_defaults(func=cmd_detect)

    def batch_flags(p):
        p.add_argument("input_dir", nargs="?")
        p.add_argument("-o", "--output", help="output CSV")
        p.add_argument("--gt-dir", help="ground-truth edge maps, matched by file stem")
        p.add_argument(
            "--reference",
            default="input",
            help="MSE reference without --gt-dir: 'input' or an operator name",
        )
        p.add_argument("--wavelets", default="bcssw", help="comma-separated bank names")
        p.add_argument("--jobs", type=int, default=_jobs_default(), help="worker processes (env EDBSW_JOBS)")
        p.add_argument("--from-manifest", help="rerun exactly from a manifest side-file")
        pipeline_flags(p)

    p = sub.add_parser("compare", help="operator x wavelet metrics over a directory")
    batch_flags(p)
    p.add_argument("--operators", default=",".join(DEFAULT_OPERATORS))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ablate", help="full pipeline against its ablation variants")
    batch_flags(p)
    p.add_argument("--ablations", default=",".join(ABLATION_NAMES))
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("filters", help="export a filter bank as JSON")
    p.add_argument("--wavelet", default="bcssw")
    p.add_argument("--L", type=int, default=filterbank.DEFAULT_L)
    p.add_argument("--taps", type=int, default=filterbank.DEFAULT_TAPS)
    p.add_argument("--degree", type=int, default=filterbank.DEFAULT_DEGREE)
    p.add_argument("-o", "--output", help="output JSON (stdout when omitted)")
    p.set_defaults(func=cmd_filters)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("compare", "ablate") and args.reference not in ("input",) + OPERATORS:
        print(f"edbsw: unknown reference {args.reference!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"edbsw: {exc}", file=sys.stderr)
        return exc.code
    except ParameterError as exc:
        print(f"edbsw: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

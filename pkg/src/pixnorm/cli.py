"""Command-line entry point.

Exit codes: 0 success, 1 usage, 2 I/O, 3 data validation, 4 numeric failure.
Every command writes a JSON run manifest next to its artifacts.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys
from pathlib import Path

from . import __version__
from .errors import PixnormError

ENV_OUT_DIR = "PIXNORM_OUT_DIR"
EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_out_dir() -> str:
    return os.environ.get(ENV_OUT_DIR, "pixnorm-out")


def _add_data_args(p):
    g = p.add_argument_group("data source")
    g.add_argument("--input", "--data", dest="input", help="CSV file with a header row")
    g.add_argument("--label-column", default="churn", help="binary label column (default: churn)")
    g.add_argument("--drop", action="append", default=[], metavar="COLS",
                   help="comma-separated columns to drop before numeric filtering; repeatable")
    g.add_argument("--impute-mean", action="store_true", help="fill missing cells with the column mean")
    g.add_argument("--synth", metavar="ROWS,COLS,SEED,SEP",
                   help="use generated two-cluster data instead of --input")


def _add_encoding_args(p):
    p.add_argument("--mode", choices=["global", "per-column"], default="global")


def _add_train_args(p):
    p.add_argument("--seed", type=int, help="random seed; drawn and printed when omitted")
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--hidden", type=int, default=10)
    p.add_argument("--max-fail", type=int, default=6, help="validation failures before stopping")
    p.add_argument("--min-grad", type=float, default=1e-6)
    p.add_argument("--sigma", type=float, default=5.0e-5)
    p.add_argument("--lambda", dest="lambda_init", type=float, default=5.0e-7)
    p.add_argument("--continuous", action="store_true",
                   help="feed continuous normalized values instead of quantized pixels")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pixnorm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pixnorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("normalize", help="encode a table as a PGM image plus sidecar metadata")
    _add_data_args(p)
    _add_encoding_args(p)
    p.add_argument("--out", required=True, help="output .pgm path")
    p.add_argument("--meta", help="sidecar path (default: <out stem>.norm.json)")

    p = sub.add_parser("denormalize", help="reconstruct a table from a PGM image and its sidecar")
    p.add_argument("--image", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("render", help="write the dataset image and surface-plot data")
    _add_data_args(p)
    _add_encoding_args(p)
    p.add_argument("--out", required=True, help="output .pgm path")
    p.add_argument("--surface", help="x,y,z CSV for a 3-D surface plot")
    p.add_argument("--matrix", help="gnuplot matrix file of intensities")

    p = sub.add_parser("train", help="train the classifier with scaled conjugate gradient")
    _add_data_args(p)
    _add_encoding_args(p)
    _add_train_args(p)
    p.add_argument("--model", required=True, help="output model JSON path")

    p = sub.add_parser("evaluate", help="confusion, ROC, error histogram and trace for a trained model")
    _add_data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, help="split seed (default: the one stored in the model)")
    p.add_argument("--out-dir", default=None, help=f"report directory (default: ${ENV_OUT_DIR} or pixnorm-out)")

    p = sub.add_parser("bench", help="time serial vs parallel normalization")
    p.add_argument("--elements", type=int, default=10_000_000)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output (default: <out-dir>/bench.csv)")

    p = sub.add_parser("reproduce", help="the whole pipeline in one command")
    _add_data_args(p)
    _add_encoding_args(p)
    _add_train_args(p)
    p.add_argument("--out-dir", default=None, help=f"artifact directory (default: ${ENV_OUT_DIR} or pixnorm-out)")
    return parser


def _load(args):
    from .pipeline import SynthSpec, load_source

    synth = SynthSpec.parse(args.synth) if args.synth else None
    drop = [c.strip() for item in args.drop for c in item.split(",") if c.strip()]
    return load_source(args.input, args.label_column, drop, args.impute_mean, synth)


def _data_params(args) -> dict:
    return {"input": args.input, "label_column": args.label_column, "drop": args.drop,
            "impute_mean": args.impute_mean, "synth": args.synth}


def _inputs(*paths) -> dict:
    from .pipeline import sha256_of

    return {str(p): sha256_of(p) for p in paths if p}


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed: {args.seed}")
    return args.seed


def _train_config(args):
    from .training import TrainConfig

    return TrainConfig(max_epochs=args.epochs, max_validation_failures=args.max_fail,
                       min_gradient_norm=args.min_grad, sigma=args.sigma,
                       lambda_init=args.lambda_init, seed=args.seed)


def cmd_normalize(args) -> int:
    from .imageio import write_pgm
    from .normcodec import normalize, quantize, write_sidecar
    from .pipeline import Manifest

    d = _load(args)
    out = Path(args.out)
    meta = Path(args.meta) if args.meta else out.with_suffix(".norm.json")
    norm = normalize(d, args.mode)
    write_pgm(quantize(norm), out)
    write_sidecar(norm.params, meta)
    print(f"wrote {out} ({d.col_count}x{d.row_count}) and {meta}")
    Manifest("normalize", {**_data_params(args), "mode": args.mode, "out": str(out), "meta": str(meta)},
             inputs=_inputs(args.input), artifacts=[str(out), str(meta)]
             ).write(out.with_suffix(".manifest.json"))
    return 0


def cmd_denormalize(args) -> int:
    from .dataset import write_values_csv
    from .imageio import read_pgm
    from .normcodec import dequantize, read_sidecar
    from .pipeline import Manifest

    img = read_pgm(args.image)
    params = read_sidecar(args.meta)
    values = dequantize(img, params)
    names = params.column_names or tuple(f"x{j}" for j in range(values.shape[1]))
    out = Path(args.out)
    write_values_csv(values, names, out)
    print(f"wrote {out} ({values.shape[0]} rows, {values.shape[1]} columns)")
    Manifest("denormalize", {"image": args.image, "meta": args.meta, "out": str(out)},
             inputs=_inputs(args.image, args.meta), artifacts=[str(out)]
             ).write(out.with_suffix(".manifest.json"))
    return 0


def cmd_render(args) -> int:
    from .imageio import surface_grid, write_pgm, write_surface_csv, write_surface_matrix
    from .normcodec import normalize, quantize
    from .pipeline import Manifest

    d = _load(args)
    img = quantize(normalize(d, args.mode))
    out = Path(args.out)
    write_pgm(img, out)
    artifacts = [str(out)]
    if args.surface or args.matrix:
        grid = surface_grid(img)
        if args.surface:
            write_surface_csv(grid, args.surface)
            artifacts.append(args.surface)
        if args.matrix:
            write_surface_matrix(grid, args.matrix)
            artifacts.append(args.matrix)
    print(f"wrote {out} ({img.width}x{img.height})")
    Manifest("render", {**_data_params(args), "mode": args.mode, "out": str(out),
                        "surface": args.surface, "matrix": args.matrix},
             inputs=_inputs(args.input), artifacts=artifacts).write(out.with_suffix(".manifest.json"))
    return 0


def cmd_train(args) -> int:
    from .pipeline import Manifest, save_model, train_on

    seed = _seed(args)
    d = _load(args)
    cfg = _train_config(args)
    run = train_on(d, seed, args.hidden, cfg, args.mode, not args.continuous)
    out = Path(args.model)
    save_model(out, run.model, cfg, run.trace, run.params, not args.continuous, run.splits)
    print(f"epochs: {len(run.trace)}  best validation epoch: {run.trace.best_validation_epoch}  "
          f"stop: {run.trace.stop_reason.value}")
    params = {**_data_params(args), "mode": args.mode, "seed": seed, "epochs": args.epochs,
              "hidden": args.hidden, "max_fail": args.max_fail, "min_grad": args.min_grad,
              "sigma": args.sigma, "lambda": args.lambda_init, "continuous": args.continuous,
              "model": str(out)}
    Manifest("train", params, seed, _inputs(args.input), [str(out)]).write(out.with_suffix(".manifest.json"))
    return 0


def cmd_evaluate(args) -> int:
    from .evaluation import evaluate_model, split, write_report
    from .pipeline import Manifest, load_model, model_features

    model, trace, params, quantized, cfg = load_model(args.model)
    seed = cfg.seed if args.seed is None else args.seed
    d = _load(args)
    X = model_features(d.values, params, quantized)
    splits = split(d.row_count, seed=seed)
    rep = evaluate_model(model, X, d.labels, splits, trace)
    out_dir = Path(args.out_dir or _default_out_dir())
    written = write_report(rep, out_dir)
    print(f"overall accuracy: {rep.overall_accuracy:.4f}")
    Manifest("evaluate", {**_data_params(args), "model": args.model, "seed": seed, "out_dir": str(out_dir)},
             seed, _inputs(args.input, args.model), [str(p) for p in written]
             ).write(out_dir / "manifest.json")
    return 0


def cmd_bench(args) -> int:
    from .bench import bench_normalize, machine_table, timing_table, write_bench_csv
    from .pipeline import Manifest

    results = bench_normalize(args.elements, args.reps, args.warmup, seed=args.seed, workers=args.workers)
    out = Path(args.out) if args.out else Path(_default_out_dir()) / "bench.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_bench_csv(results, out)
    md = out.with_suffix(".md")
    md.write_text(timing_table(results) + "\n\n" + machine_table(results[0].machine) + "\n")
    print(timing_table(results))
    Manifest("bench", {"elements": args.elements, "reps": args.reps, "warmup": args.warmup,
                       "workers": args.workers, "seed": args.seed, "out": str(out)},
             args.seed, {}, [str(out), str(md)]).write(out.with_suffix(".manifest.json"))
    return 0


def cmd_reproduce(args) -> int:
    from .pipeline import Manifest, reproduce

    seed = _seed(args)
    d = _load(args)
    out_dir = Path(args.out_dir or _default_out_dir())
    rep, written = reproduce(d, seed, out_dir, args.hidden, _train_config(args), args.mode,
                             not args.continuous)
    print(f"rows: {d.row_count}  columns: {d.col_count}")
    print(f"overall accuracy: {rep.overall_accuracy * 100:.2f}%")
    print(f"best validation epoch: {rep.trace.best_validation_epoch}")
    params = {**_data_params(args), "mode": args.mode, "seed": seed, "epochs": args.epochs,
              "hidden": args.hidden, "max_fail": args.max_fail, "min_grad": args.min_grad,
              "sigma": args.sigma, "lambda": args.lambda_init, "continuous": args.continuous,
              "out_dir": str(out_dir)}
    Manifest("reproduce", params, seed, _inputs(args.input), [str(p) for p in written]
             ).write(out_dir / "manifest.json")
    return 0


COMMANDS = {
    "normalize": cmd_normalize,
    "denormalize": cmd_denormalize,
    "render": cmd_render,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PixnormError as exc:
        print(f"pixnorm {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"pixnorm {args.command}: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

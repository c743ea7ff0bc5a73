"""Command line driver: pretrain the classifier, run single configurations,
sweep a grid with resume, and render figures from the CSVs."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .classifier import ensure_classifier
from .compress import epoch_log_path, train_compressor, write_epoch_logs
from .data import DatasetUnavailable
from .plots import plot_tradeoff_2d, plot_tradeoff_3d, plot_training_losses
from .records import append_record, existing_keys


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _log(message: str) -> None:
    print(f"[{time.strftime('%H:%M:%S')}] {message}", flush=True)


def _run_one(lam, levels, seed, classifier, args) -> None:
    key_note = f"lam={lam:g} L={levels} seed={seed}"
    records_path = Path(args.out_dir) / "records.csv"
    if (float(lam), int(levels), int(seed)) in existing_keys(records_path):
        _log(f"skip {key_note}: record exists")
        return
    record, logs, _ = train_compressor(
        lam, levels, classifier, data_dir=args.data_dir,
        epochs=args.epochs, lr=args.lr, batch_size=args.batch_size,
        seed=seed, log=_log if args.verbose else None)
    write_epoch_logs(epoch_log_path(args.out_dir, levels, lam, seed), logs)
    append_record(records_path, record)
    _log(f"done {key_note}: mse_test {record.mse_test:.4f} "
         f"nll_test {record.nll_test:.4f} acc_test {record.acc_test:.4f}")


def _cmd_pretrain(args) -> int:
    _, accuracy = ensure_classifier(args.weights, data_dir=args.data_dir,
                                    min_accuracy=args.min_accuracy, log=_log)
    _log(f"classifier ready: test accuracy {accuracy:.4f}")
    return 0


def _cmd_train(args) -> int:
    classifier, _ = ensure_classifier(args.weights, data_dir=args.data_dir, log=_log)
    _run_one(args.lam, args.levels, args.seed, classifier, args)
    return 0


def _cmd_sweep(args) -> int:
    classifier, _ = ensure_classifier(args.weights, data_dir=args.data_dir, log=_log)
    combos = [(lam, levels, seed)
              for lam in args.lambdas for levels in args.levels for seed in args.seeds]
    _log(f"sweep: {len(combos)} configurations")
    for lam, levels, seed in combos:
        _run_one(lam, levels, seed, classifier, args)
    return 0


def _cmd_plot(args) -> int:
    records = Path(args.records)
    out_dir = Path(args.out_dir)
    made = [plot_tradeoff_2d(records, out_dir / "fig3a.png"),
            plot_tradeoff_3d(records, out_dir / "fig3b.png")]
    for log_csv in sorted(Path(args.run_dir).glob("epochs_L*_lam*_seed*.csv")):
        stem = log_csv.stem.replace("epochs_", "")
        levels, lam, _seed = stem.split("_")
        made.append(plot_training_losses(
            log_csv, out_dir / f"fig2_{levels[1:]}_{lam[3:]}.png"))
    for path in made:
        _log(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mnist-harness")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", default=None, help="directory with the IDX files")
    common.add_argument("--weights", default="runs/classifier.pt",
                        help="classifier weights cache path")
    common.add_argument("--out-dir", default="runs", help="records and epoch logs")
    common.add_argument("--epochs", type=int, default=30)
    common.add_argument("--lr", type=float, default=0.01)
    common.add_argument("--batch-size", type=int, default=64)
    common.add_argument("--verbose", action="store_true")

    pre = sub.add_parser("pretrain", parents=[common], help="train/cache the classifier")
    pre.add_argument("--min-accuracy", type=float, default=0.98)
    pre.set_defaults(func=_cmd_pretrain)

    train = sub.add_parser("train", parents=[common], help="one (lambda, L, seed) run")
    train.add_argument("--lam", type=float, required=True)
    train.add_argument("--levels", type=int, required=True)
    train.add_argument("--seed", type=int, default=0)
    train.set_defaults(func=_cmd_train)

    sweep = sub.add_parser("sweep", parents=[common], help="grid of runs with resume")
    sweep.add_argument("--lambdas", type=_floats, required=True,
                       help="comma-separated loss weights")
    sweep.add_argument("--levels", type=_ints, required=True,
                       help="comma-separated quantization level counts")
    sweep.add_argument("--seeds", type=_ints, default=[0])
    sweep.set_defaults(func=_cmd_sweep)

    plot = sub.add_parser("plot", help="render figures from the CSVs")
    plot.add_argument("--records", default="runs/records.csv")
    plot.add_argument("--run-dir", default="runs")
    plot.add_argument("--out-dir", default="figures")
    plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DatasetUnavailable as exc:
        print(f"mnist-harness: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError, ValueError) as exc:
        print(f"mnist-harness: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

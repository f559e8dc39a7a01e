"""Command-line entry points: train, sweep, verify, eval.

Exit codes: 0 success, 1 validation error, 2 runtime failure,
3 verification failure. The output root is --out, else $HSICSSL_OUT_DIR,
else ./hsicssl-out.
"""

import argparse
import csv
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import verification
from .errors import (CheckpointError, ConfigError, DimensionError, HsicSslError,
                     IngestionError, InvalidInputError, SplitError)
from .experiment import append_records, run_experiment, run_id_for, run_sweep
from .runconfig import (config_from_items, config_to_items, load_run_config,
                        load_sweep_plan)
from .svgplot import write_sweep_svg
from .synthgen import generate_from_config, load_paired_csv
from .trainer import extract_features, linear_probe, load_checkpoint, save_checkpoint

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3

_VALIDATION_ERRORS = (ConfigError, IngestionError, CheckpointError, SplitError,
                      InvalidInputError, DimensionError)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("HSICSSL_OUT_DIR") or "hsicssl-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_train(args) -> int:
    cfg = load_run_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = _out_dir(args)
    record, model = run_experiment(cfg)
    append_records(out / "results.csv", [record])
    if model is not None:
        ckpt_dir = out / "checkpoints"
        ckpt_dir.mkdir(exist_ok=True)
        save_checkpoint(model, ckpt_dir / f"{record.run_id}.npz",
                        config_to_items(cfg))
        print(f"run {record.run_id}: loss={record.final_loss:.4f} "
              f"accuracy={record.accuracy:.4f} "
              f"({record.wall_seconds:.1f}s, backend={record.backend})")
        print(f"results appended to {out / 'results.csv'}")
        print(f"checkpoint written to {ckpt_dir / (record.run_id + '.npz')}")
        return EXIT_OK
    print(f"run {record.run_id} diverged: {record.error}", file=sys.stderr)
    return EXIT_RUNTIME


def _cmd_sweep(args) -> int:
    plan = load_sweep_plan(args.plan)
    if args.seed is not None:
        plan = replace(plan, base=replace(plan.base, seed=args.seed))
    out = _out_dir(args)
    records = run_sweep(plan, jobs=args.jobs)
    results_path = out / "sweep_results.csv"
    append_records(results_path, records)
    ok = [r for r in records if r.status == "ok"]
    for rec in records:
        acc = "nan" if math.isnan(rec.accuracy) else f"{rec.accuracy:.4f}"
        print(f"{rec.run_id} {rec.config.loss:<13} {plan.axis}="
              f"{getattr(rec.config, plan.axis):<5} seed={rec.config.seed} "
              f"status={rec.status} accuracy={acc}")
    print(f"{len(ok)}/{len(records)} runs ok; results in {results_path}")
    if args.plot and ok:
        svg_path = out / f"sweep_{plan.axis}.svg"
        write_sweep_svg(ok, plan.axis, svg_path)
        print(f"plot written to {svg_path}")
    if not ok:
        print("all sweep runs failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_verify(args) -> int:
    out = _out_dir(args)
    results = verification.run_all_checks()
    for res in results:
        print(res.line())
    report = out / "verify_report.csv"
    with open(report, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "passed", "observed", "tolerance", "cases",
                         "detail"])
        for res in results:
            writer.writerow([res.name, res.passed, repr(res.observed),
                             repr(res.tolerance), res.cases, res.detail])
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed; "
          f"report in {report}")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_eval(args) -> int:
    model, ckpt_items = load_checkpoint(args.checkpoint)
    if args.config:
        cfg = load_run_config(args.config)
    elif args.view_a:
        cfg = None
    elif ckpt_items:
        cfg = config_from_items(ckpt_items, "<checkpoint>")
    else:
        raise ConfigError("no dataset: pass --config or --view-a/--labels "
                          "(checkpoint carries no config)")

    if cfg is not None:
        dataset = generate_from_config(cfg.gen_config(), cfg.data_seed_)
        train_fraction, probe_epochs, probe_seed = (
            cfg.train_fraction, cfg.probe_epochs, cfg.probe_seed_)
        run_id = run_id_for(cfg)
    else:
        dataset = load_paired_csv(args.view_a, args.view_b or args.view_a,
                                  args.labels)
        train_fraction, probe_epochs, probe_seed = (
            args.train_fraction, args.probe_epochs, args.probe_seed)
        run_id = "external"
    if dataset.labels is None:
        raise ConfigError("labels required for probe (dataset is unlabeled)")

    feats = extract_features(model, dataset.view_a)
    probe = linear_probe(feats, dataset.labels, train_fraction,
                         probe_epochs, probe_seed)
    out = _out_dir(args)
    path = out / "eval_results.csv"
    new_file = not path.exists()
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(["checkpoint", "run_id", "accuracy", "n_train",
                             "n_eval", "per_class_accuracy"])
        per_class = ";".join(repr(float(v)) for v in probe.per_class_accuracy)
        writer.writerow([str(args.checkpoint), run_id, repr(probe.accuracy),
                         probe.n_train, probe.n_eval, per_class])
    print(f"accuracy={probe.accuracy:.4f} (train={probe.n_train}, "
          f"eval={probe.n_eval}); row appended to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsicssl",
        description="Two-view redundancy-reduction objectives: train, sweep, "
                    "verify the algebraic identities, evaluate checkpoints.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one training + probe experiment")
    p_train.add_argument("--config", required=True, help="key=value run config")
    p_train.add_argument("--out", default=None, help="output directory")
    p_train.add_argument("--seed", type=int, default=None,
                         help="override the config's master seed")
    p_train.set_defaults(fn=_cmd_train)

    p_sweep = sub.add_parser("sweep", help="run a sweep plan (axis x losses x seeds)")
    p_sweep.add_argument("--plan", required=True, help="key=value sweep plan")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--plot", action="store_true",
                         help="also write an SVG accuracy chart")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="worker processes for independent runs")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_verify = sub.add_parser(
        "verify", help="run the identity/oracle checks (exit 3 on failure)")
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(fn=_cmd_verify)

    p_eval = sub.add_parser("eval", help="linear-probe a saved checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--config", default=None,
                        help="regenerate the dataset from this run config "
                             "(default: config embedded in the checkpoint)")
    p_eval.add_argument("--view-a", default=None, help="external view CSV")
    p_eval.add_argument("--view-b", default=None,
                        help="optional second view (eval only reads view A)")
    p_eval.add_argument("--labels", default=None)
    p_eval.add_argument("--train-fraction", type=float, default=0.8)
    p_eval.add_argument("--probe-epochs", type=int, default=300)
    p_eval.add_argument("--probe-seed", type=int, default=0)
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(fn=_cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the validation code
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        return args.fn(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except HsicSslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: validate / stats / transform / split / eval / sweep.

Every subcommand is a thin adapter over the library API. Progress and
errors go to stderr; data goes to stdout or files, so pipelines stay clean.
Exit codes: 0 success, 1 validation/config error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import builder, coco, evaluation, pipeline, scenario as sdsl
from .errors import CliConfigError, CtxaugError

logger = logging.getLogger(__name__)

_REQUIRED = {
    "validate": ("dataset",),
    "stats": ("dataset",),
    "transform": ("dataset", "scenario", "out_dir"),
    "split": ("dataset", "rules", "out"),
    "eval": ("dataset", "preds"),
    "sweep": ("dataset", "scenario_template", "out_dir"),
}

_PLACEMENTS = {
    "before-resize": pipeline.BlurPlacement.BEFORE_RESIZE,
    "after-resize": pipeline.BlurPlacement.AFTER_RESIZE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliConfigError(message)


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--json-errors", action="store_true",
                        help="emit errors to stderr as JSON lines")
    shared.add_argument("--log-level", default="WARNING",
                        help="logging level (DEBUG, INFO, WARNING, ERROR)")
    shared.add_argument("--config", default=None,
                        help="JSON file mirroring flags; flags take precedence")
    parser = _Parser(
        prog="ctxaug",
        description="Context-aware augmentation and dataset tooling "
                    "for fall-detection imagery.",
        parents=[shared],
    )
    sub = parser.add_subparsers(dest="command")
    parsers = [parser]

    p = sub.add_parser("validate", parents=[shared],
                       help="check a dataset file against the schema")
    parsers.append(p)
    p.add_argument("--dataset", help="path to the COCO JSON dataset")

    p = sub.add_parser("stats", parents=[shared],
                       help="composition report for a dataset")
    parsers.append(p)
    p.add_argument("--dataset")
    p.add_argument("--out", help="write the report JSON here instead of stdout")

    p = sub.add_parser("transform", parents=[shared],
                       help="apply a scenario to every image and write PNGs")
    parsers.append(p)
    p.add_argument("--dataset")
    p.add_argument("--scenario", help='scenario string, e.g. "F+B:Blur11"')
    p.add_argument("--placement", choices=sorted(_PLACEMENTS),
                   help="blur placement; required when the scenario blurs")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-mode", action="store_true",
                   help="enable random perspective and horizontal flip")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--images-root",
                   help="directory image paths are relative to "
                        "(default: the dataset file's directory)")

    p = sub.add_parser("split", parents=[shared],
                       help="build a train/val/test manifest")
    parsers.append(p)
    p.add_argument("--dataset")
    p.add_argument("--rules", help="split rules JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="manifest output path")
    p.add_argument("--group-size", type=int, default=5)
    p.add_argument("--val-fraction", type=float, default=0.10)

    p = sub.add_parser("eval", parents=[shared],
                       help="score a prediction CSV against a dataset")
    parsers.append(p)
    p.add_argument("--dataset")
    p.add_argument("--preds", help="CSV: image_id,pred_label[,score]")
    p.add_argument("--subset", help="restrict to images containing this category")
    p.add_argument("--out", help="write the report JSON here instead of stdout")

    p = sub.add_parser("sweep", parents=[shared],
                       help="run transform once per kernel in an odd-size sweep")
    parsers.append(p)
    p.add_argument("--dataset")
    p.add_argument("--scenario-template",
                   help='template with a {k} placeholder, e.g. "F+B:Blur{k}"')
    p.add_argument("--lo", type=int, default=3)
    p.add_argument("--hi", type=int, default=31)
    p.add_argument("--placement", choices=sorted(_PLACEMENTS))
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-mode", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--images-root")

    if config:
        # set_defaults also patches matching action defaults, so config
        # values survive the subparser's fresh-namespace parsing
        for q in parsers:
            q.set_defaults(**config)
    return parser


def _load_config(argv) -> dict:
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliConfigError(f"config file {path}: malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliConfigError(f"config file {path}: top level must be an object")
    known = {"json_errors", "log_level", "dataset", "scenario", "placement",
             "out_dir", "out", "seed", "train_mode", "workers", "images_root",
             "rules", "group_size", "val_fraction", "preds", "subset",
             "scenario_template", "lo", "hi"}
    config = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise CliConfigError(f"config file {path}: unknown key {key!r}")
        config[dest] = value
    return config


def _check_required(args) -> None:
    if not args.command:
        raise CliConfigError("no subcommand given; see ctxaug --help")
    for dest in _REQUIRED[args.command]:
        if getattr(args, dest, None) is None:
            raise CliConfigError(
                f"{args.command}: missing required flag --{dest.replace('_', '-')}"
            )


def _placement(args) -> pipeline.BlurPlacement | None:
    if args.placement is None:
        return None
    return _PLACEMENTS[args.placement]


def _pipeline_config(args) -> pipeline.PipelineConfig:
    return pipeline.PipelineConfig(
        blur_placement=_placement(args),
        seed=args.seed,
        train_mode=args.train_mode,
    )


def _images_root(args) -> Path:
    if args.images_root is not None:
        return Path(args.images_root)
    return Path(args.dataset).parent


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_validate(args) -> int:
    d = coco.load_dataset(args.dataset)
    print(f"{args.dataset}: OK "
          f"({len(d.images)} images, {len(d.annotations)} annotations, "
          f"{len(d.categories)} categories)")
    return 0


def cmd_stats(args) -> int:
    d = coco.load_dataset(args.dataset)
    _emit(builder.stats(d), args.out)
    return 0


def cmd_transform(args) -> int:
    d = coco.load_dataset(args.dataset)
    cfg = _pipeline_config(args)
    print(f"transforming {len(d.images)} images "
          f"-> {args.out_dir}", file=sys.stderr)
    pipeline.transform_dataset(d, _images_root(args), args.scenario, cfg,
                               args.out_dir, workers=args.workers)
    return 0


def cmd_split(args) -> int:
    d = coco.load_dataset(args.dataset)
    try:
        rules_obj = json.loads(Path(args.rules).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliConfigError(f"rules file {args.rules}: malformed JSON: {exc}") from exc
    try:
        rules = builder.SplitRules.from_json_obj(rules_obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliConfigError(f"rules file {args.rules}: {exc}") from exc
    manifest = builder.build_split(d, rules, seed=args.seed,
                                   group_size=args.group_size,
                                   val_fraction=args.val_fraction)
    manifest.save(args.out)
    print(f"split written to {args.out} "
          f"(train {len(manifest.train)}, val {len(manifest.val)}, "
          f"test {len(manifest.test)})", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    d = coco.load_dataset(args.dataset)
    preds = evaluation.load_predictions_csv(args.preds)
    if args.subset is not None:
        if args.subset not in coco.CATEGORY_IDS:
            raise CliConfigError(f"unknown subset category {args.subset!r}")
        report = evaluation.subset_eval(preds, d, args.subset)
    else:
        report = evaluation.evaluate(preds, d)
    _emit(report.to_json_obj(), args.out)
    return 0


def cmd_sweep(args) -> int:
    if "{k}" not in args.scenario_template:
        raise CliConfigError("scenario template must contain a {k} placeholder")
    d = coco.load_dataset(args.dataset)
    cfg = _pipeline_config(args)
    kernels = sdsl.kernel_sweep(args.lo, args.hi)
    out_root = Path(args.out_dir)
    entries = []
    for k in kernels:
        scenario_text = args.scenario_template.replace("{k}", str(k))
        sdsl.parse_scenario(scenario_text)
        sub_dir = out_root / f"k{k:02d}"
        print(f"kernel {k}: {scenario_text} -> {sub_dir}", file=sys.stderr)
        pipeline.transform_dataset(d, _images_root(args), scenario_text, cfg,
                                   sub_dir, workers=args.workers)
        entries.append({"kernel": k, "scenario": scenario_text,
                        "dir": sub_dir.name})
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "sweep.json").write_text(
        json.dumps({"seed": cfg.seed, "runs": entries}, indent=2) + "\n",
        encoding="utf-8")
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "stats": cmd_stats,
    "transform": cmd_transform,
    "split": cmd_split,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def _report_error(exc: Exception, json_errors: bool) -> None:
    if json_errors:
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
        print(line, file=sys.stderr)
    else:
        print(f"ctxaug: error: {exc}", file=sys.stderr)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    try:
        config = _load_config(argv)
        parser = build_parser(config)
        args = parser.parse_args(argv)
        json_errors = args.json_errors or json_errors
        _check_required(args)
        logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)
        return _COMMANDS[args.command](args)
    except CtxaugError as exc:
        _report_error(exc, json_errors)
        return 1
    except (ValueError, KeyError) as exc:
        _report_error(exc, json_errors)
        return 1
    except OSError as exc:
        _report_error(exc, json_errors)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``pcurves <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .curves import PSI_BY_NAME
from .imageio import ImageFormatError, read_channels, write_pgm
from .pipeline.bench import BenchmarkSpec, run_benchmark, timing_csv
from .pipeline.classify import knn_classify, read_feature_csv, write_feature_csv
from .pipeline.features import (FeatureConfig, FeatureConfigError, assemble_features,
                                channel_diagrams, layout_to_json, plan_layout)
from .pipeline.noise import add_noise
from .stability import stability_fuzz


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _load_config(args) -> FeatureConfig:
    raw = json.loads(Path(args.config).read_text()) if args.config else {}
    if args.pad:
        raw["pad"] = True
    return FeatureConfig.from_dict(raw)


def cmd_features(args) -> int:
    config = _load_config(args)
    rows, labels = [], []
    for path in args.images:
        channels = read_channels(path, config.channels)
        fv = assemble_features([channel_diagrams(ch, config) for ch in channels], config)
        rows.append(fv.values)
        labels.append(args.label if args.label is not None else Path(path).parent.name)
    out = Path(args.out)
    write_feature_csv(out, labels, np.vstack(rows))
    n_channels = 3 if config.channels == "rgb-split" else 1
    _manifest_path(out).write_text(layout_to_json(plan_layout(config, n_channels), config))
    print(f"wrote {len(rows)} rows x {rows[0].size} features to {out}")
    return 0


def cmd_classify(args) -> int:
    train_y, train_x = read_feature_csv(args.train)
    test_y, test_x = read_feature_csv(args.test)
    res = knn_classify(train_x, train_y, test_x, args.k, test_y)
    classes = sorted(set(train_y) | set(test_y))
    report = {
        "accuracy": res.accuracy,
        "classes": classes,
        "confusion": res.confusion_matrix(classes).tolist(),
        "predictions": res.labels,
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_stability_fuzz(args) -> int:
    if args.psi not in PSI_BY_NAME:
        raise FeatureConfigError(f"unknown psi {args.psi!r}; choose from {sorted(PSI_BY_NAME)}")
    reports = stability_fuzz(args.pairs, args.seed, PSI_BY_NAME[args.psi], args.max_points)
    ratios = [r.lhs / r.epsilon for r in reports if r.epsilon > 0]
    summary = {
        "psi": args.psi,
        "pairs": len(reports),
        "violations": sum(not r.satisfied for r in reports),
        "max_ratio": max(ratios) if ratios else 0.0,
    }
    if args.out:
        Path(args.out).write_text(json.dumps([r.to_dict() for r in reports], indent=1))
    print(json.dumps(summary))
    return 0 if summary["violations"] == 0 else 1


def cmd_bench(args) -> int:
    spec = BenchmarkSpec(tuple(args.sizes), tuple(args.grids), args.trials, args.seed)
    text = timing_csv(run_benchmark(spec))
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_noise(args) -> int:
    (image,) = read_channels(args.image)
    out = Path(args.out) if args.out else Path(args.image).with_suffix(".noisy.pgm")
    write_pgm(add_noise(image, args.seed), out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcurves", description="Persistence curves for images.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="feature CSV (plus manifest JSON) from image files")
    p.add_argument("images", nargs="+")
    p.add_argument("--config", help="JSON file with FeatureConfig fields")
    p.add_argument("--out", required=True)
    p.add_argument("--label", help="label for every row (default: parent directory name)")
    p.add_argument("--pad", action="store_true", help="pad each image with a black border")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("classify", help="k-NN on feature CSVs")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("-k", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("stability-fuzz", help="randomized check of the curve stability bound")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--psi", default="life")
    p.add_argument("--max-points", type=int, default=50)
    p.add_argument("--out", help="write every report as JSON")
    p.set_defaults(func=cmd_stability_fuzz)

    p = sub.add_parser("bench", help="time curve evaluation")
    p.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000])
    p.add_argument("--grids", type=int, nargs="+", default=[1000])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("noise", help="add rounded standard normal noise to an image")
    p.add_argument("image")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output PGM (default: <image>.noisy.pgm)")
    p.set_defaults(func=cmd_noise)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FeatureConfigError, ImageFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

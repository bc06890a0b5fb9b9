"""
Command-line front end: encode | train | eval | sweep

Exit codes: 0 success, 1 unexpected failure, 2 missing or unreadable input,
3 invalid configuration, 130 interrupted.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence

import pandas as pd

from .run_config import RunConfig, parse_size

try:
    from ..bench import (
        Dataset, DatasetError, encode_images, evaluate_detailed, load_dataset, prepare_images,
        split, sweep, trial_seeds, write_sweep_csvs,
    )
    from ..imaging import ImagingError, TilingError, encode_image, load_gray, save_pgm
    from ..pooler import ConfigError, InitMode
    from ..recognizer import TemplateStoreError, make_provenance, save_store, train
    from ..utils import get_logger, setup_logging, set_log_level, log_exception, ConfigLoader, DataLoader
except ImportError:
    from bench import (
        Dataset, DatasetError, encode_images, evaluate_detailed, load_dataset, prepare_images,
        split, sweep, trial_seeds, write_sweep_csvs,
    )
    from imaging import ImagingError, TilingError, encode_image, load_gray, save_pgm
    from pooler import ConfigError, InitMode
    from recognizer import TemplateStoreError, make_provenance, save_store, train
    from utils import get_logger, setup_logging, set_log_level, log_exception, ConfigLoader, DataLoader

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_INTERRUPTED = 130


def _common_options() -> argparse.ArgumentParser:
    """Options accepted by every subcommand"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration file (key = value lines)")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        default=None, help="Logging level (default: from settings.yaml)")
    common.add_argument("--jobs", type=int, help="Worker cap; results do not depend on it")
    common.add_argument("--mode", choices=["rule", "random"], help="Weight initialization")
    common.add_argument("--inhibit", choices=["mean", "percentile"], help="Inhibition rule")
    common.add_argument("--block", help="Block size in pixels, N or HxW")
    common.add_argument("--region", help="Inhibition region size in blocks, N or HxW")
    common.add_argument("--seed", type=int, help="Seed for random draws and the split")
    common.add_argument("--trials", type=int, help="Random-weight trials per setting")
    common.add_argument("--resize", help="Resize images to N or HxW before tiling")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="Override any configuration key (repeatable)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="run_pipeline",
        description="Spatial pooler image encoding, template training and evaluation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/run_pipeline.py encode face.png --out panels
  python scripts/run_pipeline.py train data/orl --store store/orl --mode rule
  python scripts/run_pipeline.py eval data/orl --mode random --trials 10
  python scripts/run_pipeline.py sweep data/orl --sizes 2,4,8 --out results
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    encode = sub.add_parser("encode", parents=[common], help="Write the stage images of one encoding")
    encode.add_argument("image", help="Input image (PGM, PNG, ...)")
    encode.add_argument("--out", default="encoded", help="Output directory (default: encoded)")

    train_cmd = sub.add_parser("train", parents=[common], help="Train and persist a template store")
    train_cmd.add_argument("dataset", help="Dataset root, one subdirectory per class")
    train_cmd.add_argument("--store", required=True, help="Store directory to write")

    eval_cmd = sub.add_parser("eval", parents=[common], help="Accuracy on the 50/50 split")
    eval_cmd.add_argument("dataset", help="Dataset root, one subdirectory per class")
    eval_cmd.add_argument("--out", help="Directory for eval.csv")

    sweep_cmd = sub.add_parser("sweep", parents=[common], help="Inhibition-region size sweep")
    sweep_cmd.add_argument("dataset", help="Dataset root, one subdirectory per class")
    sweep_cmd.add_argument("--sizes",
                           help="Region sizes in blocks, comma separated "
                                "(default: bench.sweep_region_sizes in settings.yaml)")
    sweep_cmd.add_argument("--block-sizes", help="Block sizes in pixels to sweep as well")
    sweep_cmd.add_argument("--modes", default="rule,random",
                           help="Initialization modes, comma separated (default: rule,random)")
    sweep_cmd.add_argument("--out", default="results", help="Output directory (default: results)")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides: Dict[str, object] = {
        "init_mode": args.mode, "inhibit_mode": args.inhibit, "seed": args.seed,
        "trials": args.trials, "jobs": args.jobs,
    }
    for flag, prefix in ((args.block, "block"), (args.region, "region"), (args.resize, "resize")):
        if flag is not None:
            h, w = parse_size(f"{prefix}_h", flag)
            overrides[f"{prefix}_h"], overrides[f"{prefix}_w"] = h, w
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "--set expects KEY=VALUE")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _size_list(key: str, text: str):
    return [parse_size(key, part) for part in text.split(",") if part.strip()]


def cmd_encode(args: argparse.Namespace, run: RunConfig) -> int:
    """gray, weight mask, overlap and inhibition stages as PGM files"""
    experiment = run.to_experiment()
    gray = load_gray(args.image, experiment.resize)
    encoded = encode_image(gray, experiment.tiling, experiment.sp,
                           strict=experiment.strict_weights)

    out = Path(args.out)
    paths = [
        save_pgm(out / "gray.pgm", gray.pixels),
        save_pgm(out / "weights.pgm", encoded.weights, binary=True),
        save_pgm(out / "overlap.pgm", encoded.overlap),
        save_pgm(out / "inhibition.pgm", encoded.bits, binary=True),
    ]
    active = int(encoded.block_active.sum())
    print(f"encoded {args.image}: {encoded.dims[0]}x{encoded.dims[1]}, "
          f"{active}/{encoded.block_active.size} blocks active, density {encoded.density:.4f}")
    for path in paths:
        print(f"  {path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace, run: RunConfig) -> int:
    experiment = run.to_experiment()
    dataset = load_dataset(args.dataset)
    plan = split(dataset, experiment.sp.seed)
    train_idx = plan.train_indices()

    train_set = Dataset(dataset.root, tuple(dataset.entries[k] for k in train_idx))
    images = prepare_images(train_set, experiment.resize, experiment.jobs)
    encoded = encode_images(images, experiment)
    labels = [label for label, _ in train_set.entries]

    provenance = make_provenance(experiment.tiling, encoded[0].dims, experiment.sp.init_mode,
                                 experiment.sp.inhibit_mode, experiment.sp.seed)
    store = train(zip(labels, encoded), provenance)
    save_store(store, args.store)
    print(f"stored {len(store)} templates for {len(store.labels)} classes in {args.store}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, run: RunConfig) -> int:
    experiment = run.to_experiment()
    dataset = load_dataset(args.dataset)
    plan = split(dataset, experiment.sp.seed)
    images = prepare_images(dataset, experiment.resize, experiment.jobs)

    random_mode = experiment.sp.init_mode == InitMode.RANDOM_WEIGHT
    seeds = trial_seeds(experiment.sp.seed, experiment.trials) if random_mode else [experiment.sp.seed]

    rows = []
    for trial, seed in enumerate(seeds):
        result = evaluate_detailed(dataset, plan, experiment.with_seed(seed), images)
        rows.append({
            "mode": experiment.sp.init_mode.value, "trial": trial, "seed": seed,
            "accuracy": result.accuracy, "class_mean_accuracy": result.class_mean_accuracy,
        })
        print(f"accuracy {result.accuracy:.3f} mode={experiment.sp.init_mode.value} "
              f"trial={trial} seed={seed}")

    frame = pd.DataFrame(rows)
    print(f"class_mean_accuracy {frame['class_mean_accuracy'].mean():.3f}")
    if len(rows) > 1:
        print(f"mean {frame['accuracy'].mean():.3f} max {frame['accuracy'].max():.3f}")
    if args.out:
        path = DataLoader.save_csv(frame, Path(args.out) / "eval.csv")
        print(f"  {path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, run: RunConfig) -> int:
    experiment = run.to_experiment()
    sizes = args.sizes
    if sizes is None:
        configured = ConfigLoader().get_setting("bench.sweep_region_sizes", [2, 4, 8])
        sizes = ",".join(str(size) for size in configured)
    region_sizes = _size_list("region_h", sizes)
    block_sizes = _size_list("block_h", args.block_sizes) if args.block_sizes else None
    modes = [InitMode.parse(m) for m in args.modes.split(",") if m.strip()]
    if not region_sizes:
        raise ConfigError("region_h", "no region sizes given")

    dataset = load_dataset(args.dataset)
    report = sweep(dataset, region_sizes, modes, experiment.trials, experiment,
                   block_sizes=block_sizes)
    trials_path, summary_path = write_sweep_csvs(report, args.out)
    print(report.summary_frame().to_string(index=False, float_format=lambda x: f"{x:.4f}"))
    print(f"  {trials_path}\n  {summary_path}")
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)

    setup_logging()
    if args.log_level:
        set_log_level(args.log_level)

    try:
        if args.config and not Path(args.config).is_file():
            print(f"error: configuration file not found: {args.config}", file=sys.stderr)
            return EXIT_INPUT
        run = RunConfig.from_sources(args.config, _overrides(args))
        logger.debug(f"Run configuration: {run.values}")
        return COMMANDS[args.command](args, run)

    except ConfigError as e:
        print(f"error: invalid configuration: {e} (key '{e.key}')", file=sys.stderr)
        return EXIT_CONFIG
    except TilingError as e:
        print(f"error: invalid configuration: {e} (key '{e.key}')", file=sys.stderr)
        return EXIT_CONFIG
    except (ImagingError, DatasetError, TemplateStoreError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception as e:
        log_exception(logger, e, f"{args.command} failed")
        return EXIT_FAILURE

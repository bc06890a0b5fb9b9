"""
End-to-end accuracy evaluation and the inhibition-region sweep
"""

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .dataset import BenchError, Dataset, SplitPlan, split

try:
    from ..imaging import EncodedImage, GrayImage, TilingSpec, encode_image, load_gray, random_weights
    from ..pooler import InitMode, SpConfig
    from ..recognizer import classify, make_provenance, train
    from ..utils import get_logger, log_performance, DataLoader, FileManager, ProgressLogger
except ImportError:
    from imaging import EncodedImage, GrayImage, TilingSpec, encode_image, load_gray, random_weights
    from pooler import InitMode, SpConfig
    from recognizer import classify, make_provenance, train
    from utils import get_logger, log_performance, DataLoader, FileManager, ProgressLogger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

UINT64_MOD = 2 ** 64
TRIAL_COLUMNS = ["mode", "region_h", "region_w", "trial", "seed", "accuracy"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one evaluation run depends on"""

    sp: SpConfig = field(default_factory=SpConfig)
    tiling: TilingSpec = field(default_factory=TilingSpec)
    resize: Optional[Tuple[int, int]] = None
    metric: str = "hamming"
    match: str = "template"
    strict_weights: bool = False
    trials: int = 10
    jobs: int = 1

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return self.replace(sp=self.sp.replace(seed=seed))

    def with_mode(self, mode: Union[InitMode, str]) -> "ExperimentConfig":
        return self.replace(sp=self.sp.replace(init_mode=InitMode.parse(mode)))

    def with_tiling(self, block_size=None, region_size=None) -> "ExperimentConfig":
        tiling = TilingSpec(block_size or self.tiling.block_size,
                            region_size or self.tiling.region_size,
                            self.tiling.neighborhood_size)
        return self.replace(tiling=tiling)


def _parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: int,
                  desc: Optional[str] = None) -> List[R]:
    """Ordered map; the worker count never changes the results"""
    show = desc is not None and len(items) > 1
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=not show, leave=False)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(tqdm(pool.map(func, items), total=len(items), desc=desc,
                         disable=not show, leave=False))


def prepare_images(dataset: Dataset, resize: Optional[Tuple[int, int]] = None,
                   jobs: int = 1) -> List[GrayImage]:
    """Load, grey and resize every image once, in dataset order"""
    start = time.time()
    images = _parallel_map(lambda path: load_gray(path, resize), dataset.paths, jobs,
                           desc="loading images")
    log_performance(logger, "prepare images", time.time() - start, images=len(images))
    return images


def encode_images(images: Sequence[GrayImage], config: ExperimentConfig) -> List[EncodedImage]:
    """Encode with one random mask per padded size (random mode)"""
    masks: Dict[Tuple[int, int], np.ndarray] = {}
    if config.sp.init_mode == InitMode.RANDOM_WEIGHT:
        for image in images:
            shape = config.tiling.padded_shape(*image.shape)
            if shape not in masks:
                masks[shape] = random_weights(shape, config.tiling, config.sp)

    def encode(image: GrayImage) -> EncodedImage:
        mask = masks.get(config.tiling.padded_shape(*image.shape))
        return encode_image(image, config.tiling, config.sp, strict=config.strict_weights,
                            weights=mask)

    return _parallel_map(encode, list(images), config.jobs)


@dataclass(frozen=True)
class Prediction:
    index: int
    true_label: str
    template_label: str
    template_score: float
    class_mean_label: str
    class_mean_score: float


@dataclass(frozen=True)
class EvaluationResult:
    """accuracy follows config.match; both strategies are always reported"""

    accuracy: float
    template_accuracy: float
    class_mean_accuracy: float
    n_test: int
    degenerate: int
    seed: int
    predictions: Tuple[Prediction, ...] = ()


def _is_degenerate(encoded: EncodedImage) -> bool:
    return not encoded.bits.any() or bool(encoded.block_active.all())


def evaluate_detailed(dataset: Dataset, plan: SplitPlan, config: ExperimentConfig,
                      images: Optional[Sequence[GrayImage]] = None) -> EvaluationResult:
    """Encode, train on the train half, classify the test half"""
    start = time.time()
    if images is None:
        images = prepare_images(dataset, config.resize, config.jobs)

    train_idx = plan.train_indices()
    test_idx = plan.test_indices()
    if not test_idx:
        raise BenchError("split plan has no test images")

    needed = sorted(set(train_idx) | set(test_idx))
    encoded = dict(zip(needed, encode_images([images[k] for k in needed], config)))

    degenerate = sum(1 for enc in encoded.values() if _is_degenerate(enc))
    if degenerate:
        logger.warning(f"{degenerate}/{len(encoded)} encodings are all-zero or fully active")

    first = encoded[needed[0]]
    provenance = make_provenance(config.tiling, first.dims, config.sp.init_mode,
                                 config.sp.inhibit_mode, config.sp.seed)
    labels = [label for label, _ in dataset.entries]
    store = train(((labels[k], encoded[k]) for k in train_idx), provenance)

    def predict(k: int) -> Prediction:
        by_template = classify(encoded[k], store, metric=config.metric, match="template")
        by_mean = classify(encoded[k], store, metric=config.metric, match="class_mean")
        return Prediction(k, labels[k], by_template.label, by_template.score,
                          by_mean.label, by_mean.score)

    predictions = _parallel_map(predict, test_idx, config.jobs)
    progress = ProgressLogger(logger, "scoring test images", len(predictions), every=50)
    template_hits = mean_hits = 0
    for p in predictions:
        template_hits += p.template_label == p.true_label
        mean_hits += p.class_mean_label == p.true_label
        progress.update()

    n = len(predictions)
    template_acc = template_hits / n
    mean_acc = mean_hits / n
    accuracy = template_acc if config.match == "template" else mean_acc
    progress.complete(f"accuracy {accuracy:.4f}")
    log_performance(logger, "evaluate", time.time() - start, mode=config.sp.init_mode.value,
                    seed=config.sp.seed, test_images=n)
    return EvaluationResult(accuracy, template_acc, mean_acc, n, degenerate, config.sp.seed,
                            tuple(predictions))


def evaluate(dataset: Dataset, plan: SplitPlan, config: ExperimentConfig,
             images: Optional[Sequence[GrayImage]] = None) -> float:
    """Fraction of test images classified correctly"""
    return evaluate_detailed(dataset, plan, config, images).accuracy


def trial_seeds(base_seed: int, trials: int) -> List[int]:
    """seed_t = (base + t) mod 2^64"""
    return [(int(base_seed) + t) % UINT64_MOD for t in range(trials)]


@dataclass(frozen=True)
class SweepRow:
    mode: str
    block_size: Tuple[int, int]
    region_size: Tuple[int, int]
    trial: int
    seed: int
    accuracy: float


@dataclass
class SweepReport:
    """Per-trial accuracies of a sweep plus mean/max summaries"""

    rows: List[SweepRow] = field(default_factory=list)
    block_sizes: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def trial_seeds(self) -> List[int]:
        return list(dict.fromkeys(row.seed for row in self.rows))

    def _with_blocks(self) -> bool:
        return len(self.block_sizes) > 1

    def trials_frame(self) -> pd.DataFrame:
        columns = list(TRIAL_COLUMNS)
        if self._with_blocks():
            columns[1:1] = ["block_h", "block_w"]
        records = []
        for row in self.rows:
            record = {
                "mode": row.mode,
                "block_h": row.block_size[0], "block_w": row.block_size[1],
                "region_h": row.region_size[0], "region_w": row.region_size[1],
                "trial": row.trial, "seed": row.seed, "accuracy": row.accuracy,
            }
            records.append({k: record[k] for k in columns})
        return pd.DataFrame.from_records(records, columns=columns)

    def summary_frame(self) -> pd.DataFrame:
        trials = self.trials_frame()
        keys = [c for c in trials.columns if c not in ("trial", "seed", "accuracy")]
        columns = keys + ["mean_acc", "max_acc"]
        if trials.empty:
            return pd.DataFrame(columns=columns)
        summary = (trials.groupby(keys, sort=False)["accuracy"]
                   .agg(mean_acc="mean", max_acc="max")
                   .reset_index())
        return summary[columns]


def sweep(dataset: Dataset, region_sizes: Sequence[Tuple[int, int]],
          modes: Sequence[Union[InitMode, str]], trials: int, config: ExperimentConfig,
          block_sizes: Optional[Sequence[Tuple[int, int]]] = None,
          plan: Optional[SplitPlan] = None,
          images: Optional[Sequence[GrayImage]] = None) -> SweepReport:
    """Accuracy for every (mode, block size, region size).

    Random-weight mode runs one trial per seed in trial_seeds(config seed,
    trials); rule-based mode is deterministic and runs once.
    """
    if not region_sizes:
        raise ValueError("at least one region size is required")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")

    start = time.time()
    block_sizes = list(block_sizes or [config.tiling.block_size])
    plan = plan or split(dataset, config.sp.seed)
    if images is None:
        images = prepare_images(dataset, config.resize, config.jobs)

    report = SweepReport(block_sizes=[tuple(b) for b in block_sizes])
    base = config.sp.seed
    for mode in (InitMode.parse(m) for m in modes):
        seeds = trial_seeds(base, trials) if mode == InitMode.RANDOM_WEIGHT else [base]
        for block in block_sizes:
            for region in region_sizes:
                for trial, seed in enumerate(seeds):
                    run = config.with_mode(mode).with_tiling(block, region).with_seed(seed)
                    accuracy = evaluate(dataset, plan, run, images)
                    report.rows.append(SweepRow(mode.value, run.tiling.block_size,
                                                run.tiling.region_size, trial, seed, accuracy))
                    logger.info(f"sweep {mode.value} block={run.tiling.block_size} "
                                f"region={run.tiling.region_size} trial={trial}: {accuracy:.4f}")

    log_performance(logger, "sweep", time.time() - start, rows=len(report.rows))
    return report


def write_sweep_csvs(report: SweepReport, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    out_dir = FileManager.ensure_directory(out_dir)
    trials_path = DataLoader.save_csv(report.trials_frame(), out_dir / "sweep_trials.csv")
    summary_path = DataLoader.save_csv(report.summary_frame(), out_dir / "sweep_summary.csv")
    logger.info(f"Wrote {trials_path} and {summary_path}")
    return trials_path, summary_path

"""
Benchmark harness: datasets, splits, accuracy evaluation and sweeps.
"""

from .dataset import (
    BenchError, DatasetError, Dataset, SplitPlan, DEFAULT_EXTENSIONS, load_dataset, split,
    train_count,
)
from .evaluation import (
    ExperimentConfig, Prediction, EvaluationResult, SweepRow, SweepReport, TRIAL_COLUMNS,
    prepare_images, encode_images, evaluate, evaluate_detailed, trial_seeds, sweep,
    write_sweep_csvs,
)

__all__ = [
    'BenchError', 'DatasetError', 'Dataset', 'SplitPlan', 'DEFAULT_EXTENSIONS', 'load_dataset',
    'split', 'train_count',
    'ExperimentConfig', 'Prediction', 'EvaluationResult', 'SweepRow', 'SweepReport',
    'TRIAL_COLUMNS', 'prepare_images', 'encode_images', 'evaluate', 'evaluate_detailed',
    'trial_seeds', 'sweep', 'write_sweep_csvs',
]

"""
Dataset ingestion and deterministic per-class train/test splitting
"""

import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

try:
    from ..pooler import CounterRng, STREAM_SPLIT
    from ..utils import get_logger, ConfigLoader, FileManager
except ImportError:
    from pooler import CounterRng, STREAM_SPLIT
    from utils import get_logger, ConfigLoader, FileManager

logger = get_logger(__name__)

DEFAULT_EXTENSIONS = (".pgm", ".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".gif")


class BenchError(Exception):
    """Base exception for dataset handling and evaluation"""
    pass


class DatasetError(BenchError):
    """A dataset root is missing, empty or violates the per-class minimum"""

    def __init__(self, message: str, label: Optional[str] = None):
        super().__init__(message)
        self.label = label


@dataclass(frozen=True)
class Dataset:
    """(label, image path) entries grouped by class, classes in name order"""

    root: Path
    entries: Tuple[Tuple[str, Path], ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> List[str]:
        return list(dict.fromkeys(label for label, _ in self.entries))

    @property
    def class_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for label, _ in self.entries:
            counts[label] = counts.get(label, 0) + 1
        return counts

    def indices(self, label: str) -> List[int]:
        return [k for k, (entry_label, _) in enumerate(self.entries) if entry_label == label]

    @property
    def paths(self) -> List[Path]:
        return [path for _, path in self.entries]


def _image_extensions() -> Tuple[str, ...]:
    configured = ConfigLoader().get_setting("bench.image_extensions")
    if configured:
        return tuple(str(ext).lower() for ext in configured)
    return DEFAULT_EXTENSIONS


def load_dataset(root: Union[str, Path], extensions: Optional[Iterable[str]] = None,
                 min_per_class: int = 2) -> Dataset:
    """One subdirectory per class; files sorted by name within each class"""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"{root}: dataset root not found")

    allowed = tuple(e.lower() for e in extensions) if extensions else _image_extensions()
    entries: List[Tuple[str, Path]] = []

    for class_dir in FileManager.list_subdirectories(root):
        files = [p for p in FileManager.get_files_by_pattern(class_dir, "*")
                 if p.suffix.lower() in allowed]
        if len(files) < min_per_class:
            raise DatasetError(f"class '{class_dir.name}' has {len(files)} images, "
                               f"at least {min_per_class} are needed", label=class_dir.name)
        entries.extend((class_dir.name, path) for path in files)

    if not entries:
        raise DatasetError(f"{root}: no class directories with images")

    dataset = Dataset(root, tuple(entries))
    logger.info(f"Loaded dataset {root}: {len(dataset)} images in {len(dataset.labels)} classes")
    return dataset


@dataclass(frozen=True)
class SplitPlan:
    """Per-class train and test indices into Dataset.entries"""

    seed: int
    train: Dict[str, List[int]] = field(default_factory=dict)
    test: Dict[str, List[int]] = field(default_factory=dict)

    def train_indices(self) -> List[int]:
        return [k for indices in self.train.values() for k in indices]

    def test_indices(self) -> List[int]:
        return [k for indices in self.test.values() for k in indices]

    @classmethod
    def resubstitution(cls, dataset: Dataset) -> "SplitPlan":
        """Every image in both halves"""
        per_class = {label: dataset.indices(label) for label in dataset.labels}
        return cls(seed=0, train=per_class, test={k: list(v) for k, v in per_class.items()})


def train_count(n: int) -> int:
    """Half of a class, the odd image going to training"""
    return (n + 1) // 2


def split(dataset: Dataset, seed: int) -> SplitPlan:
    """Shuffle each class with a generator keyed by (seed, label); the first
    half of the shuffled order trains, the rest tests."""
    rng = CounterRng(seed)
    train, test = {}, {}
    for label in dataset.labels:
        indices = dataset.indices(label)
        order = rng.permutation(STREAM_SPLIT, zlib.crc32(label.encode("utf-8")), len(indices))
        shuffled = [indices[k] for k in order]
        cut = train_count(len(shuffled))
        train[label] = shuffled[:cut]
        test[label] = shuffled[cut:]
    plan = SplitPlan(seed, train, test)
    logger.debug(f"Split seed {seed}: {len(plan.train_indices())} train / "
                 f"{len(plan.test_indices())} test images")
    return plan

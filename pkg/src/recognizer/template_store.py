"""
Training template storage and its on-disk form.

A store directory holds `manifest.json` (provenance and class list) and
one flat-layout file per template under `templates/`, each holding the
encoded bit map followed by the block activation map.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

try:
    from ..imaging import EncodedImage, TilingSpec
    from ..pooler import InhibitMode, InitMode, MatrixRecord, SerializationError
    from ..pooler import load_records, save_records
    from ..utils import get_logger, DataLoader, FileManager, SchemaValidator
except ImportError:
    from imaging import EncodedImage, TilingSpec
    from pooler import InhibitMode, InitMode, MatrixRecord, SerializationError
    from pooler import load_records, save_records
    from utils import get_logger, DataLoader, FileManager, SchemaValidator

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"
TEMPLATE_DIR = "templates"
STORE_FORMAT_VERSION = 1


class RecognizerError(Exception):
    """Base exception for template training and matching"""
    pass


class TemplateStoreError(RecognizerError):
    """A store is inconsistent, empty or cannot be read back"""
    pass


def make_provenance(tiling: TilingSpec, dims: Tuple[int, int],
                    init_mode: Union[InitMode, str] = InitMode.RULE_BASED,
                    inhibit_mode: Union[InhibitMode, str] = InhibitMode.MEAN,
                    seed: int = 0) -> Dict[str, Any]:
    return {
        "tiling": tiling.to_dict(),
        "init_mode": InitMode.parse(init_mode).value,
        "inhibit_mode": InhibitMode.parse(inhibit_mode).value,
        "seed": int(seed),
        "dims": [int(dims[0]), int(dims[1])],
    }


class TemplateStore:
    """label -> stored encodings, in insertion order.

    Every template shares the same dims and tiling. The store is filled by
    `train` and treated as read-only afterwards.
    """

    def __init__(self, provenance: Optional[Dict[str, Any]] = None):
        self.provenance: Dict[str, Any] = dict(provenance or {})
        self._classes: Dict[str, List[EncodedImage]] = {}
        self._tiling: Optional[TilingSpec] = None
        self._dims: Optional[Tuple[int, int]] = None
        self._cache: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def add(self, label: str, encoded: EncodedImage):
        label = str(label)
        if not label:
            raise TemplateStoreError("class labels must be non-empty")
        if self._dims is None:
            self._dims, self._tiling = encoded.dims, encoded.tiling
        elif encoded.dims != self._dims:
            raise TemplateStoreError(f"template for '{label}' has dims {encoded.dims}, "
                                     f"store holds {self._dims}")
        elif encoded.tiling != self._tiling:
            raise TemplateStoreError(f"template for '{label}' uses a different tiling")
        self._classes.setdefault(label, []).append(encoded)
        self._cache = None

    @property
    def labels(self) -> List[str]:
        return list(self._classes)

    @property
    def dims(self) -> Optional[Tuple[int, int]]:
        return self._dims

    @property
    def tiling(self) -> Optional[TilingSpec]:
        return self._tiling

    def templates(self, label: str) -> List[EncodedImage]:
        return list(self._classes[label])

    def items(self) -> Iterable[Tuple[str, List[EncodedImage]]]:
        return ((label, list(t)) for label, t in self._classes.items())

    def __len__(self) -> int:
        return sum(len(t) for t in self._classes.values())

    def __contains__(self, label: str) -> bool:
        return label in self._classes

    def bit_matrix(self) -> Tuple[np.ndarray, np.ndarray]:
        """(templates x bits) uint8 matrix and the class index of each row.

        Built once and published as a single tuple, so concurrent readers
        see either no cache or a complete one.
        """
        cache = self._cache
        if cache is None:
            rows, owners = [], []
            for index, templates in enumerate(self._classes.values()):
                for template in templates:
                    rows.append(template.bits.ravel())
                    owners.append(index)
            width = self._dims[0] * self._dims[1] if self._dims else 0
            cache = (np.array(rows, dtype=np.uint8).reshape(len(rows), width),
                     np.array(owners, dtype=np.int64))
            self._cache = cache
        return cache


def train(examples: Iterable[Tuple[str, EncodedImage]],
          provenance: Optional[Dict[str, Any]] = None) -> TemplateStore:
    """Store every (label, encoding) pair; duplicates are kept"""
    store = TemplateStore(provenance)
    for label, encoded in examples:
        store.add(label, encoded)
    if len(store) == 0:
        raise TemplateStoreError("no training examples")
    if store.provenance and "dims" not in store.provenance:
        store.provenance["dims"] = list(store.dims)
    logger.info(f"Trained template store: {len(store)} templates over {len(store.labels)} classes")
    return store


def _template_records(encoded: EncodedImage, init_mode: Optional[InitMode],
                      seed: int) -> List[MatrixRecord]:
    return [MatrixRecord.from_bitmap(encoded.bits, init_mode, seed),
            MatrixRecord.from_bitmap(encoded.block_active, init_mode, seed)]


def save_store(store: TemplateStore, directory: Union[str, Path]) -> Path:
    """Write manifest + template files; reruns produce identical bytes"""
    if len(store) == 0:
        raise TemplateStoreError("refusing to save an empty store")
    directory = FileManager.ensure_directory(directory)
    template_dir = FileManager.ensure_directory(directory / TEMPLATE_DIR)
    FileManager.clean_directory(template_dir, "*.htsp")

    provenance = make_provenance(store.tiling, store.dims)
    provenance.update(store.provenance)
    provenance["dims"] = list(store.dims)
    init_mode = InitMode.parse(provenance["init_mode"])
    seed = int(provenance["seed"])

    classes = []
    counter = 0
    for label, templates in store.items():
        names = []
        for encoded in templates:
            name = f"{counter:04d}.htsp"
            save_records(template_dir / name, _template_records(encoded, init_mode, seed))
            names.append(f"{TEMPLATE_DIR}/{name}")
            counter += 1
        classes.append({"label": label, "templates": names})

    manifest = {
        "format_version": STORE_FORMAT_VERSION,
        "provenance": provenance,
        "classes": classes,
    }
    DataLoader.save_json(manifest, directory / MANIFEST_NAME)
    logger.info(f"Saved template store to {directory}: {counter} templates")
    return directory


def load_store(directory: Union[str, Path]) -> TemplateStore:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise TemplateStoreError(f"{manifest_path}: manifest not found")

    try:
        manifest = DataLoader.load_json(manifest_path)
    except ValueError as e:
        raise TemplateStoreError(f"{manifest_path}: invalid JSON ({e})") from e

    result = SchemaValidator().validate_with_schema(manifest, "store_manifest")
    if not result["valid"]:
        raise TemplateStoreError(f"{manifest_path}: " + "; ".join(result["errors"]))

    provenance = manifest["provenance"]
    tiling = TilingSpec.from_dict(provenance["tiling"])
    dims = tuple(provenance["dims"])

    store = TemplateStore(provenance)
    for entry in manifest["classes"]:
        for name in entry["templates"]:
            path = directory / name
            try:
                records = load_records(path)
            except (OSError, SerializationError) as e:
                raise TemplateStoreError(f"{path}: {e}") from e
            if len(records) != 2:
                raise TemplateStoreError(f"{path}: expected 2 records, found {len(records)}")
            encoded = EncodedImage(records[0].to_bitmap(), records[1].to_bitmap(), tiling)
            if encoded.dims != dims:
                raise TemplateStoreError(f"{path}: dims {encoded.dims} differ from manifest {dims}")
            store.add(entry["label"], encoded)

    logger.info(f"Loaded template store from {directory}: {len(store)} templates, "
                f"{len(store.labels)} classes")
    return store

"""
Flat binary layout for sparse matrices.

A record is a little-endian header followed by its entries:

    magic      4s   b"HTSP"
    version    u16  FORMAT_VERSION
    init_mode  u8   0 unknown, 1 random weight, 2 rule based
    kind       u8   ValueKind
    rows       u32
    cols       u32
    seed       u64
    count      u64  number of entries
    entries    count * (i: u32, j: u32, value: f64), sorted by (i, j)

Records may be concatenated in one file.
"""

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import BinaryIO, List, Optional, Union

import numpy as np

from .config import InitMode
from .errors import SerializationError
from .synapses import ConnectionMatrix, PermanenceMatrix, SynapseMatrix

try:
    from ..utils import get_logger, FileManager
except ImportError:
    from utils import get_logger, FileManager

logger = get_logger(__name__)

MAGIC = b"HTSP"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHBBIIQQ")
ENTRY_DTYPE = np.dtype([("i", "<u4"), ("j", "<u4"), ("v", "<f8")])

_MODE_CODES = {None: 0, InitMode.RANDOM_WEIGHT: 1, InitMode.RULE_BASED: 2}
_CODE_MODES = {code: mode for mode, code in _MODE_CODES.items()}


class ValueKind(IntEnum):
    PERMANENCE = 0
    CONNECTION = 1
    BITMAP = 2


@dataclass(frozen=True, eq=False)
class MatrixRecord:
    """One header + entry block"""

    kind: ValueKind
    rows: int
    cols: int
    i: np.ndarray
    j: np.ndarray
    values: np.ndarray
    init_mode: Optional[InitMode] = None
    seed: int = 0

    @classmethod
    def from_matrix(cls, matrix: SynapseMatrix, init_mode: Optional[InitMode] = None,
                    seed: int = 0) -> "MatrixRecord":
        kind = ValueKind.CONNECTION if isinstance(matrix, ConnectionMatrix) else ValueKind.PERMANENCE
        return cls(kind, matrix.n_columns, matrix.n_inputs, matrix.rows, matrix.cols,
                   matrix.values, init_mode, seed)

    @classmethod
    def from_bitmap(cls, bits: np.ndarray, init_mode: Optional[InitMode] = None,
                    seed: int = 0) -> "MatrixRecord":
        """Binary 2-D map; only the 1-bits are stored"""
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise SerializationError(f"bitmap must be 2-D, got shape {bits.shape}")
        i, j = np.nonzero(bits)
        return cls(ValueKind.BITMAP, bits.shape[0], bits.shape[1], i, j,
                   np.ones(i.size, dtype=np.float64), init_mode, seed)

    def to_matrix(self) -> SynapseMatrix:
        if self.kind == ValueKind.PERMANENCE:
            return PermanenceMatrix(self.i, self.j, self.values, self.rows, self.cols)
        if self.kind == ValueKind.CONNECTION:
            return ConnectionMatrix(self.i, self.j, self.values, self.rows, self.cols)
        raise SerializationError(f"record of kind {self.kind.name} is not a synapse matrix")

    def to_bitmap(self) -> np.ndarray:
        bits = np.zeros((self.rows, self.cols), dtype=np.uint8)
        bits[self.i, self.j] = self.values.astype(np.uint8)
        return bits

    def to_bytes(self) -> bytes:
        order = np.lexsort((np.asarray(self.j), np.asarray(self.i)))
        body = np.empty(len(order), dtype=ENTRY_DTYPE)
        body["i"] = np.asarray(self.i)[order]
        body["j"] = np.asarray(self.j)[order]
        body["v"] = np.asarray(self.values, dtype=np.float64)[order]
        header = HEADER.pack(MAGIC, FORMAT_VERSION, _MODE_CODES[self.init_mode], int(self.kind),
                             self.rows, self.cols, self.seed, body.size)
        return header + body.tobytes()


def write_record(stream: BinaryIO, record: MatrixRecord):
    stream.write(record.to_bytes())


def read_record(stream: BinaryIO) -> Optional[MatrixRecord]:
    """Next record from the stream, or None at a clean end of file"""
    raw = stream.read(HEADER.size)
    if not raw:
        return None
    if len(raw) < HEADER.size:
        raise SerializationError(f"truncated header ({len(raw)} of {HEADER.size} bytes)")

    magic, version, mode_code, kind, rows, cols, seed, count = HEADER.unpack(raw)
    if magic != MAGIC:
        raise SerializationError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SerializationError(f"unsupported format version {version}")
    if mode_code not in _CODE_MODES:
        raise SerializationError(f"unknown init mode code {mode_code}")
    try:
        kind = ValueKind(kind)
    except ValueError:
        raise SerializationError(f"unknown value kind {kind}")

    nbytes = count * ENTRY_DTYPE.itemsize
    payload = stream.read(nbytes)
    if len(payload) < nbytes:
        raise SerializationError(f"truncated body ({len(payload)} of {nbytes} bytes)")
    body = np.frombuffer(payload, dtype=ENTRY_DTYPE)

    i = body["i"].astype(np.int64)
    j = body["j"].astype(np.int64)
    if count and (i.max() >= rows or j.max() >= cols):
        raise SerializationError("entry index outside the record dimensions")
    return MatrixRecord(kind, rows, cols, i, j, body["v"].astype(np.float64),
                        _CODE_MODES[mode_code], seed)


def save_records(path: Union[str, Path], records: List[MatrixRecord]) -> Path:
    path = Path(path)
    FileManager.ensure_directory(path.parent)
    with open(path, "wb") as f:
        for record in records:
            write_record(f, record)
    logger.debug(f"Wrote {len(records)} records to {path}")
    return path


def load_records(path: Union[str, Path]) -> List[MatrixRecord]:
    path = Path(path)
    records = []
    try:
        with open(path, "rb") as f:
            while True:
                record = read_record(f)
                if record is None:
                    break
                records.append(record)
    except SerializationError as e:
        raise SerializationError(f"{path}: {e}") from e
    return records


def save_matrix(path: Union[str, Path], matrix: SynapseMatrix,
                init_mode: Optional[InitMode] = None, seed: int = 0) -> Path:
    """Write one permanence or connection matrix"""
    return save_records(path, [MatrixRecord.from_matrix(matrix, init_mode, seed)])


def load_matrix(path: Union[str, Path]) -> SynapseMatrix:
    records = load_records(path)
    if len(records) != 1:
        raise SerializationError(f"{path}: expected one record, found {len(records)}")
    return records[0].to_matrix()

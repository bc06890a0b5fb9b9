"""
Image input/output and pixel-level preprocessing: decoding through Pillow,
grayscale conversion, nearest-neighbour resizing, edge padding and PGM
export.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

try:
    from ..utils import get_logger, FileManager
except ImportError:
    from utils import get_logger, FileManager

logger = get_logger(__name__)

# ITU-R BT.601 luma
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


class ImagingError(Exception):
    """Base exception for the imaging pipeline"""
    pass


class ImageFormatError(ImagingError):
    """An image cannot be read or has an unsupported layout"""

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = str(path) if path else None


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major grayscale pixels in [0, 1]"""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.size == 0:
            raise ImageFormatError(f"grayscale image must be a non-empty 2-D array, got shape {pixels.shape}")
        if np.isnan(pixels).any() or pixels.min() < 0.0 or pixels.max() > 1.0:
            raise ImageFormatError("grayscale pixel values must lie in [0, 1]")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def of(cls, image: Union["GrayImage", np.ndarray]) -> "GrayImage":
        return image if isinstance(image, cls) else cls(image)

    @property
    def rows(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def cols(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols


def _read_netpbm_gray(path: Path) -> Optional[np.ndarray]:
    """P2/P5 files whose maxval is not 255, scaled by their own maxval.

    Returns None for any other file; those go through Pillow.
    """
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ImageFormatError(f"cannot read image ({e})", path) from e
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        return None

    fields, pos = [], 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end
            continue
        start = pos
        while pos < len(data) and data[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise ImageFormatError("malformed PGM header", path)
        fields.append(int(data[start:pos]))

    width, height, maxval = fields
    if maxval == 255:
        return None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ImageFormatError(f"unsupported PGM {width}x{height} with maxval {maxval}", path)

    count = width * height
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raster = data[pos + 1:pos + 1 + count * dtype.itemsize]
        if len(raster) < count * dtype.itemsize:
            raise ImageFormatError("truncated PGM raster", path)
        values = np.frombuffer(raster, dtype=dtype)
    else:
        tokens = data[pos:].split()[:count]
        if len(tokens) < count:
            raise ImageFormatError("truncated PGM raster", path)
        try:
            values = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError as e:
            raise ImageFormatError(f"bad PGM sample ({e})", path) from e

    pixels = values.reshape(height, width).astype(np.float64) / maxval
    return np.clip(pixels, 0.0, 1.0)


def load_image(path: Union[str, Path]) -> np.ndarray:
    """Decode an image file to floats in [0, 1].

    Returns (rows, cols) for grayscale sources and (rows, cols, 3) for
    colour ones. Palette and alpha images are flattened to RGB. PGMs are
    scaled by the maxval in their header, other 16-bit sources by 65535.
    """
    path = Path(path)
    if not path.is_file():
        raise ImageFormatError("file not found", path)

    netpbm = _read_netpbm_gray(path)
    if netpbm is not None:
        logger.debug(f"Loaded {path.name}: shape {netpbm.shape} from its own maxval")
        return netpbm

    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ("I;16", "I;16B", "I;16L", "I"):
                data = np.asarray(img, dtype=np.float64)
                return np.clip(data / 65535.0, 0.0, 1.0)
            if img.mode in ("1", "L", "LA"):
                img = img.convert("L")
            elif img.mode != "RGB":
                img = img.convert("RGB")
            data = np.asarray(img, dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise ImageFormatError(f"cannot decode image ({e})", path) from e

    logger.debug(f"Loaded {path.name}: shape {data.shape}")
    return data


def to_grayscale(image) -> GrayImage:
    """0.299 R + 0.587 G + 0.114 B; single-channel input passes through"""
    if isinstance(image, GrayImage):
        return image
    data = np.asarray(image, dtype=np.float64)
    if data.ndim == 2:
        return GrayImage(data)
    if data.ndim != 3 or data.shape[2] not in (1, 3):
        channels = data.shape[2] if data.ndim == 3 else None
        raise ImageFormatError(f"unsupported channel count {channels} (shape {data.shape})")
    if data.shape[2] == 1:
        return GrayImage(data[:, :, 0])
    if data.min() < 0.0 or data.max() > 1.0:
        raise ImageFormatError("colour channel values must lie in [0, 1]")
    gray = data @ LUMA_WEIGHTS
    return GrayImage(np.clip(gray, 0.0, 1.0))


def load_gray(path: Union[str, Path], size: Optional[Tuple[int, int]] = None) -> GrayImage:
    """load_image + to_grayscale + optional resize"""
    gray = to_grayscale(load_image(path))
    if size is not None:
        gray = resize_nearest(gray, size[0], size[1])
    return gray


def _nearest_index(n_out: int, n_in: int) -> np.ndarray:
    # Source cell containing the centre of each output cell
    out = np.arange(n_out, dtype=np.int64)
    return np.minimum(((2 * out + 1) * n_in) // (2 * n_out), n_in - 1)


def resize_nearest(image, rows: int, cols: int) -> GrayImage:
    gray = GrayImage.of(image)
    if rows < 1 or cols < 1:
        raise ImageFormatError(f"resize target must be positive, got {rows}x{cols}")
    if (rows, cols) == gray.shape:
        return gray
    r = _nearest_index(rows, gray.rows)
    c = _nearest_index(cols, gray.cols)
    return GrayImage(gray.pixels[np.ix_(r, c)])


def pad_image(image, multiple_h: int, multiple_w: int) -> np.ndarray:
    """Edge-replicate the bottom/right borders up to the next multiples"""
    pixels = GrayImage.of(image).pixels
    pad_h = (-pixels.shape[0]) % multiple_h
    pad_w = (-pixels.shape[1]) % multiple_w
    if pad_h == 0 and pad_w == 0:
        return np.array(pixels)
    return np.pad(pixels, ((0, pad_h), (0, pad_w)), mode="edge")


def to_uint8(values, binary: bool = False) -> np.ndarray:
    """[0, 1] floats to 8-bit grey levels; binary maps become 0/255"""
    values = np.asarray(values)
    if binary:
        return np.where(values > 0, 255, 0).astype(np.uint8)
    return np.clip(np.rint(np.asarray(values, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def save_pgm(path: Union[str, Path], values, binary: bool = False) -> Path:
    """Write a 2-D array as an 8-bit binary PGM (P5)"""
    path = Path(path)
    values = np.asarray(values)
    if values.ndim != 2:
        raise ImageFormatError(f"PGM export needs a 2-D array, got shape {values.shape}")
    FileManager.ensure_directory(path.parent)
    Image.fromarray(to_uint8(values, binary=binary)).save(path, format="PPM")
    logger.debug(f"Saved PGM {path} ({values.shape[1]}x{values.shape[0]})")
    return path

"""
Block/region image encoder.

The padded image is cut into blocks (one mini-column per block) and the
block grid into inhibition regions. Each block gets a binary weight mask W,
either rule-based (a pixel is kept when it is not below the mean of its
neighborhood inside the block) or random (potential pool and permanence
draws as in the spatial pooler core). A block's scalar is the mean of its
weighted pixels; inside a region only blocks whose scalar beats the region
mean stay active, and the encoding keeps W for active blocks and zeroes
the rest.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .image_io import GrayImage, ImagingError, pad_image

try:
    from ..pooler import (
        CounterRng, InhibitMode, InitMode, SpConfig, STREAM_PERMANENCE, STREAM_POOL,
        compare_to_mean, density_threshold,
    )
    from ..utils import get_logger
except ImportError:
    from pooler import (
        CounterRng, InhibitMode, InitMode, SpConfig, STREAM_PERMANENCE, STREAM_POOL,
        compare_to_mean, density_threshold,
    )
    from utils import get_logger

logger = get_logger(__name__)


class TilingError(ImagingError, ValueError):
    """Invalid tiling parameters or block geometry"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _pair(key: str, value) -> Tuple[int, int]:
    if isinstance(value, int) and not isinstance(value, bool):
        value = (value, value)
    try:
        h, w = value
    except (TypeError, ValueError):
        raise TilingError(key, f"expected a pair of positive integers, got {value!r}")
    for v in (h, w):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
            raise TilingError(key, f"expected positive integers, got {value!r}")
    return int(h), int(w)


@dataclass(frozen=True)
class TilingSpec:
    """block_size: (h, w) pixels per block; region_size: (bh, bw) blocks per
    inhibition region; neighborhood_size: odd side of the per-pixel window"""

    block_size: Tuple[int, int] = (8, 8)
    region_size: Tuple[int, int] = (4, 4)
    neighborhood_size: int = 3

    def __post_init__(self):
        object.__setattr__(self, "block_size", _pair("block_size", self.block_size))
        object.__setattr__(self, "region_size", _pair("region_size", self.region_size))
        n = self.neighborhood_size
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
            raise TilingError("neighborhood", f"must be an odd positive integer, got {n!r}")
        object.__setattr__(self, "neighborhood_size", int(n))

    @property
    def multiple(self) -> Tuple[int, int]:
        """Pixel multiple the padded image must reach"""
        return (self.block_size[0] * self.region_size[0],
                self.block_size[1] * self.region_size[1])

    def padded_shape(self, rows: int, cols: int) -> Tuple[int, int]:
        mh, mw = self.multiple
        return -(-rows // mh) * mh, -(-cols // mw) * mw

    def block_grid(self, rows: int, cols: int) -> Tuple[int, int]:
        """Blocks per axis of the padded image"""
        ph, pw = self.padded_shape(rows, cols)
        return ph // self.block_size[0], pw // self.block_size[1]

    def region_grid(self, rows: int, cols: int) -> Tuple[int, int]:
        gr, gc = self.block_grid(rows, cols)
        return gr // self.region_size[0], gc // self.region_size[1]

    def to_dict(self):
        return {
            "block_size": list(self.block_size),
            "region_size": list(self.region_size),
            "neighborhood_size": self.neighborhood_size,
        }

    @classmethod
    def from_dict(cls, data) -> "TilingSpec":
        return cls(tuple(data["block_size"]), tuple(data["region_size"]),
                   int(data["neighborhood_size"]))


@dataclass(frozen=True, eq=False)
class EncodedImage:
    """Binary encoding of one padded image.

    bits: (rows, cols) map, W inside active blocks and 0 elsewhere
    block_active: (block rows, block cols) region-inhibition outcome
    weights, scalars, overlap: intermediate stages (absent on stored templates)
    """

    bits: np.ndarray
    block_active: np.ndarray
    tiling: TilingSpec
    weights: Optional[np.ndarray] = field(default=None, repr=False)
    scalars: Optional[np.ndarray] = field(default=None, repr=False)
    overlap: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        bits = np.asarray(self.bits).astype(np.uint8)
        active = np.asarray(self.block_active).astype(np.uint8)
        if bits.ndim != 2 or active.ndim != 2:
            raise TilingError("bits", "encodings are 2-D maps")
        bh, bw = self.tiling.block_size
        if bits.shape != (active.shape[0] * bh, active.shape[1] * bw):
            raise TilingError("bits", f"map {bits.shape} does not match {active.shape} blocks of {bh}x{bw}")
        if np.any(bits > 1) or np.any(active > 1):
            raise TilingError("bits", "encodings hold only 0 and 1")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "block_active", active)

    @property
    def dims(self) -> Tuple[int, int]:
        return int(self.bits.shape[0]), int(self.bits.shape[1])

    @property
    def density(self) -> float:
        return float(self.bits.mean())

    def same_bits(self, other: "EncodedImage") -> bool:
        return (self.dims == other.dims and np.array_equal(self.bits, other.bits)
                and np.array_equal(self.block_active, other.block_active))


def _split_blocks(pixels: np.ndarray, block_size: Tuple[int, int]) -> np.ndarray:
    """(rows, cols) -> (block rows, block cols, bh, bw)"""
    bh, bw = block_size
    gr, gc = pixels.shape[0] // bh, pixels.shape[1] // bw
    return pixels.reshape(gr, bh, gc, bw).swapaxes(1, 2)


def _join_blocks(blocks: np.ndarray) -> np.ndarray:
    gr, gc, bh, bw = blocks.shape
    return blocks.swapaxes(1, 2).reshape(gr * bh, gc * bw)


def _window_sums(values: np.ndarray, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Sum and count of each cell's size x size window over the last two
    axes, clipped at the array border."""
    half = size // 2
    h, w = values.shape[-2:]
    lead = [(0, 0)] * (values.ndim - 2)
    padded = np.pad(values, lead + [(half, half), (half, half)])
    inside = np.pad(np.ones((h, w)), [(half, half), (half, half)])
    sums = np.zeros(values.shape, dtype=np.float64)
    counts = np.zeros((h, w), dtype=np.float64)
    for dy in range(size):
        for dx in range(size):
            sums += padded[..., dy:dy + h, dx:dx + w]
            counts += inside[dy:dy + h, dx:dx + w]
    return sums, counts


def block_weights(block, neighborhood_size: int, strict: bool = False) -> np.ndarray:
    """W(i) = 1 iff x(i) >= mean of x over its neighborhood N.

    Works on one block (h, w) or a stack of blocks (..., h, w); neighborhoods
    are clipped at block borders. strict=True uses > instead of >=.
    """
    x = np.asarray(block, dtype=np.float64)
    row = x.ndim == 1
    if row:
        x = x[None, :]
    sums, counts = _window_sums(x, neighborhood_size)
    w = compare_to_mean(x, sums, counts, strict=strict).astype(np.uint8)
    return w[0] if row else w


def random_weights(shape: Tuple[int, int], tiling: TilingSpec, config: SpConfig) -> np.ndarray:
    """Random-weight counterpart of block_weights for a padded image shape.

    Every block is one column whose receptive field is the block itself:
    W(p) = 1 iff p is in the potential pool (z < rho) and its permanence
    reaches theta_c. Draws are keyed by (seed, block index, pixel index), so
    the mask is fixed for a given seed and image size.
    """
    rows, cols = shape
    bh, bw = tiling.block_size
    if rows % bh or cols % bw:
        raise TilingError("block_size", f"shape {shape} is not a multiple of {tiling.block_size}")

    r, c = np.meshgrid(np.arange(rows, dtype=np.int64), np.arange(cols, dtype=np.int64), indexing="ij")
    block = (r // bh) * (cols // bw) + (c // bw)
    pixel = r * cols + c

    rng = CounterRng(config.seed)
    if config.rho >= 1.0:
        pooled = np.ones(shape, dtype=bool)
    else:
        pooled = rng.uniform(STREAM_POOL, block, pixel) < config.rho
    connected = rng.uniform(STREAM_PERMANENCE, block, pixel) >= config.theta_c
    return (pooled & connected).astype(np.uint8)


def apply_weights(block, weights) -> np.ndarray:
    """Elementwise W x block"""
    block = np.asarray(block, dtype=np.float64)
    weights = np.asarray(weights)
    if block.shape != weights.shape:
        raise TilingError("weights", f"mask shape {weights.shape} differs from block shape {block.shape}")
    return block * weights


def block_scalar(weighted) -> Union[float, np.ndarray]:
    """Mean of the weighted pixels of one block.

    A stack of blocks (..., h, w) gives one scalar per block.
    """
    weighted = np.asarray(weighted, dtype=np.float64)
    if weighted.size == 0:
        raise TilingError("block_size", "empty block")
    if weighted.ndim <= 2:
        return float(weighted.mean())
    return weighted.mean(axis=(-2, -1))


def inhibit_region(scalars) -> np.ndarray:
    """1 for blocks whose scalar is strictly above the region mean"""
    v = np.asarray(scalars, dtype=np.float64)
    if v.size == 0:
        raise TilingError("region_size", "region without blocks")
    flat = v.ravel()
    active = compare_to_mean(flat, np.full(flat.size, flat.sum()), np.full(flat.size, flat.size),
                             strict=True)
    return active.astype(np.uint8).reshape(v.shape)


def inhibit_region_percentile(scalars, s: float, theta_s: float = 0.0) -> np.ndarray:
    """Percentile inhibition inside one region: every other block of the
    region is a neighbor. A lone block is judged by theta_s alone."""
    v = np.asarray(scalars, dtype=np.float64)
    if v.size == 0:
        raise TilingError("region_size", "region without blocks")
    flat = v.ravel()
    active = np.zeros(flat.size, dtype=np.uint8)
    for k in range(flat.size):
        if flat[k] < theta_s:
            continue
        others = np.delete(flat, k)
        if others.size == 0 or flat[k] >= density_threshold(others, s):
            active[k] = 1
    return active.reshape(v.shape)


def _inhibit_regions(scalars: np.ndarray, tiling: TilingSpec, config: Optional[SpConfig]) -> np.ndarray:
    gr, gc = scalars.shape
    rh, rw = tiling.region_size
    regions = scalars.reshape(gr // rh, rh, gc // rw, rw).swapaxes(1, 2)
    percentile = config is not None and config.inhibit_mode == InhibitMode.PERCENTILE
    active = np.zeros(regions.shape, dtype=np.uint8)
    for a in range(regions.shape[0]):
        for b in range(regions.shape[1]):
            if percentile:
                active[a, b] = inhibit_region_percentile(regions[a, b], config.s, config.theta_s)
            else:
                active[a, b] = inhibit_region(regions[a, b])
    return active.swapaxes(1, 2).reshape(gr, gc)


def encode_image(image, tiling: TilingSpec, config: Optional[SpConfig] = None,
                 strict: bool = False, weights: Optional[np.ndarray] = None) -> EncodedImage:
    """pad -> tile -> weights -> apply -> block scalars -> region inhibition.

    config selects random or rule-based weights and mean or percentile
    region inhibition (rule-based with mean inhibition when omitted). A
    precomputed random mask may be passed as `weights` to reuse it across
    images of the same size.
    """
    gray = GrayImage.of(image)
    pixels = pad_image(gray, *tiling.multiple)
    blocks = _split_blocks(pixels, tiling.block_size)

    if weights is not None:
        w_map = np.asarray(weights, dtype=np.uint8)
        if w_map.shape != pixels.shape:
            raise TilingError("weights", f"mask shape {w_map.shape} differs from padded image {pixels.shape}")
    elif config is not None and config.init_mode == InitMode.RANDOM_WEIGHT:
        w_map = random_weights(pixels.shape, tiling, config)
    else:
        w_map = _join_blocks(block_weights(blocks, tiling.neighborhood_size, strict=strict))

    w_blocks = _split_blocks(w_map, tiling.block_size)
    weighted = apply_weights(blocks, w_blocks)
    scalars = block_scalar(weighted)
    active = _inhibit_regions(scalars, tiling, config)

    bits = w_blocks * active[:, :, None, None]
    encoded = EncodedImage(_join_blocks(bits), active, tiling, weights=w_map, scalars=scalars,
                           overlap=_join_blocks(weighted))
    logger.debug(f"Encoded {gray.shape} -> {encoded.dims}: {int(active.sum())}/{active.size} "
                 f"blocks active, density {encoded.density:.3f}")
    return encoded


def encode_many(images: Sequence, tiling: TilingSpec, config: Optional[SpConfig] = None,
                strict: bool = False):
    """Encode images sharing one random mask per padded size"""
    masks = {}
    encoded = []
    random_mode = config is not None and config.init_mode == InitMode.RANDOM_WEIGHT
    for image in images:
        gray = GrayImage.of(image)
        mask = None
        if random_mode:
            shape = tiling.padded_shape(*gray.shape)
            if shape not in masks:
                masks[shape] = random_weights(shape, tiling, config)
            mask = masks[shape]
        encoded.append(encode_image(gray, tiling, config, strict=strict, weights=mask))
    return encoded

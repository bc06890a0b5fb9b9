"""
Image pipeline: grayscale conversion, tiling, block weighting and region
inhibition producing binary encodings.
"""

from .image_io import (
    ImagingError, ImageFormatError, GrayImage, LUMA_WEIGHTS, load_image, load_gray,
    to_grayscale, resize_nearest, pad_image, to_uint8, save_pgm,
)
from .encoder import (
    TilingError, TilingSpec, EncodedImage, block_weights, random_weights, apply_weights,
    block_scalar, inhibit_region, inhibit_region_percentile, encode_image, encode_many,
)

__all__ = [
    'ImagingError', 'ImageFormatError', 'GrayImage', 'LUMA_WEIGHTS', 'load_image', 'load_gray',
    'to_grayscale', 'resize_nearest', 'pad_image', 'to_uint8', 'save_pgm',
    'TilingError', 'TilingSpec', 'EncodedImage', 'block_weights', 'random_weights',
    'apply_weights', 'block_scalar', 'inhibit_region', 'inhibit_region_percentile',
    'encode_image', 'encode_many',
]

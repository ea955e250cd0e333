"""Baseline JPEG codec (4:4:4) and luminance DC extraction."""

from .dc import DC_MAX, DC_MIN, extract_dc_luma, rgb_to_luma
from .decoder import decode_jpeg
from .encoder import encode_jpeg

__all__ = [
    "DC_MAX",
    "DC_MIN",
    "decode_jpeg",
    "encode_jpeg",
    "extract_dc_luma",
    "rgb_to_luma",
]

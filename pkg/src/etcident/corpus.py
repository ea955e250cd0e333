"""Source-image handling: directory ingestion and a synthetic desk corpus.

The benchmark ingests any directory of images readable by Pillow (the
published photographic corpora ship as plain JPEG directories).  For
self-contained desk-scale runs, :func:`write_synth_corpus` generates a
deterministic set of smooth, block-friendly pseudo-photographs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

CORPUS_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


def load_image(path) -> np.ndarray:
    """Read any Pillow-supported image as an (H, W, 3) uint8 RGB array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def list_corpus(directory) -> list[Path]:
    """Deterministically ordered image files under a corpus directory."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in CORPUS_SUFFIXES)
    if not paths:
        raise FileNotFoundError(f"no corpus images found in {root}")
    return paths


def _smooth_field(rng: np.random.Generator, height: int, width: int, cells_y: int, cells_x: int) -> np.ndarray:
    """Bilinear upsample of a random low-res RGB grid."""
    grid = rng.uniform(0.0, 255.0, size=(cells_y, cells_x, 3))
    ys = np.linspace(0.0, cells_y - 1.0, height)
    xs = np.linspace(0.0, cells_x - 1.0, width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, cells_y - 1)
    x1 = np.minimum(x0 + 1, cells_x - 1)
    fy = (ys - y0)[:, np.newaxis, np.newaxis]
    fx = (xs - x0)[np.newaxis, :, np.newaxis]
    a = grid[y0][:, x0]
    b = grid[y0][:, x1]
    c = grid[y1][:, x0]
    d = grid[y1][:, x1]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def synth_image(seed: int, height: int = 480, width: int = 640) -> np.ndarray:
    """One deterministic pseudo-photograph: smooth field, soft shapes, grain."""
    rng = np.random.default_rng(np.random.SeedSequence([0x45746349, seed]))
    img = _smooth_field(rng, height, width, int(rng.integers(4, 9)), int(rng.integers(5, 11)))

    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(int(rng.integers(2, 6))):
        cy = rng.uniform(0, height)
        cx = rng.uniform(0, width)
        ry = rng.uniform(height / 12, height / 3)
        rx = rng.uniform(width / 12, width / 3)
        dist = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2
        weight = np.clip(1.5 - dist, 0.0, 1.0)[:, :, np.newaxis]
        color = rng.uniform(0.0, 255.0, size=3)
        img = img * (1 - 0.8 * weight) + color * 0.8 * weight

    img += rng.normal(0.0, 2.5, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def write_synth_corpus(directory, count: int, height: int = 480, width: int = 640) -> list[Path]:
    """Write PNG files synth_0000.png .. into a directory; returns the paths."""
    if count < 1:
        raise ValueError(f"corpus count must be positive, got {count}")
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        path = root / f"synth_{i:04d}.png"
        Image.fromarray(synth_image(i, height=height, width=width)).save(path)
        paths.append(path)
    return paths

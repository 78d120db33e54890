"""Patch tokenization, random masking, and dataset ingestion.

An image is an (H, W, 3) float array with values in [0, 1].  ``patchify``
cuts it into non-overlapping P x P patches, flattened row-major over
(patch row, patch column, channel) and stacked in row-major patch-grid
order, so ``unpatchify`` is an exact inverse.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .errors import DimensionError

# Raw corpus file layout: little-endian int32 header [count, H, W, C]
# followed by count*H*W*C little-endian float32 pixel values.
RAW_HEADER_DTYPE = np.dtype("<i4")
RAW_VALUE_DTYPE = np.dtype("<f4")


@dataclasses.dataclass(frozen=True)
class PatchGrid:
    """An image decomposed into N flattened patches.

    patches has shape (N, P*P*3); row i is patch i in row-major order
    over the patch grid.
    """

    patches: np.ndarray
    patch_size: int

    def __post_init__(self):
        p = np.asarray(self.patches, dtype=float)
        if p.ndim != 2:
            raise DimensionError(f"patches must be 2-D, got shape {p.shape}")
        expected = 3 * self.patch_size**2
        if p.shape[1] != expected:
            raise DimensionError(
                f"patch rows have {p.shape[1]} values, expected "
                f"P*P*3 = {expected} for patch_size={self.patch_size}"
            )
        object.__setattr__(self, "patches", p)

    @property
    def n_patches(self) -> int:
        return self.patches.shape[0]

    @property
    def patch_dim(self) -> int:
        return self.patches.shape[1]


@dataclasses.dataclass(frozen=True)
class MaskSpec:
    """Which patch indices of an N-token image are masked.

    masked_indices is sorted, unique, and drawn uniformly without
    replacement; the same (n_patches, ratio, seed) triple always yields
    the same spec.
    """

    masked_indices: np.ndarray
    ratio: float
    seed: int
    n_patches: int

    def __post_init__(self):
        idx = np.asarray(self.masked_indices, dtype=np.intp)
        if idx.ndim != 1:
            raise ValueError("masked_indices must be 1-D")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_patches):
            raise IndexError(
                f"mask index out of range [0, {self.n_patches}): "
                f"{idx.min()}..{idx.max()}"
            )
        if np.unique(idx).size != idx.size:
            raise ValueError("masked_indices contains duplicates")
        object.__setattr__(self, "masked_indices", np.sort(idx))

    @property
    def n_masked(self) -> int:
        return self.masked_indices.size

    @property
    def visible_indices(self) -> np.ndarray:
        keep = np.ones(self.n_patches, dtype=bool)
        keep[self.masked_indices] = False
        return np.flatnonzero(keep)

    def bool_mask(self) -> np.ndarray:
        """Length-N boolean array, True at masked positions."""
        out = np.zeros(self.n_patches, dtype=bool)
        out[self.masked_indices] = True
        return out


def patchify(image: np.ndarray, patch_size: int) -> PatchGrid:
    """Cut an (H, W, 3) image into N = H*W/P^2 flattened patches."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"expected (H, W, 3) image, got shape {image.shape}")
    h, w, _ = image.shape
    p = int(patch_size)
    if p <= 0:
        raise ValueError(f"patch_size must be positive, got {patch_size}")
    if h % p or w % p:
        raise DimensionError(
            f"image dimensions H={h}, W={w} are not divisible by patch_size P={p}"
        )
    gh, gw = h // p, w // p
    grid = image.reshape(gh, p, gw, p, 3).transpose(0, 2, 1, 3, 4)
    return PatchGrid(patches=grid.reshape(gh * gw, p * p * 3), patch_size=p)


def unpatchify(grid: PatchGrid, height: int, width: int) -> np.ndarray:
    """Exact inverse of :func:`patchify` for the declared image size."""
    p = grid.patch_size
    if height % p or width % p:
        raise DimensionError(
            f"height={height}, width={width} not divisible by patch_size P={p}"
        )
    gh, gw = height // p, width // p
    if gh * gw != grid.n_patches:
        raise DimensionError(
            f"grid has N={grid.n_patches} patches but height={height}, "
            f"width={width}, P={p} imply N={gh * gw}"
        )
    patches = grid.patches.reshape(gh, gw, p, p, 3)
    return patches.transpose(0, 2, 1, 3, 4).reshape(height, width, 3)


def mask_count(n_patches: int, ratio: float) -> int:
    """Number of masked tokens: round(ratio*N), ties rounding half-up."""
    return int(np.floor(ratio * n_patches + 0.5))


def sample_mask(n_patches: int, ratio: float, seed: int) -> MaskSpec:
    """Draw round(ratio*N) masked indices uniformly without replacement."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"masking ratio must be in [0, 1], got {ratio}")
    if n_patches < 1:
        raise ValueError(f"n_patches must be >= 1, got {n_patches}")
    count = mask_count(n_patches, ratio)
    rng = np.random.default_rng(seed)
    idx = rng.choice(n_patches, size=count, replace=False)
    return MaskSpec(masked_indices=idx, ratio=ratio, seed=seed, n_patches=n_patches)


# ---------------------------------------------------------------------------
# dataset ingestion
# ---------------------------------------------------------------------------

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".gif")


def _normalize_pixels(images: np.ndarray) -> np.ndarray:
    """Map pixel values into [0, 1]; values above 1 are assumed 0-255."""
    images = np.asarray(images, dtype=float)
    if not np.isfinite(images).all():
        raise ValueError("pixel data contains non-finite values")
    if images.size and images.max() > 1.0 + 1e-6:
        images = images / 255.0
    return np.clip(images, 0.0, 1.0)


def load_image_dir(path: str | Path) -> np.ndarray:
    """Load a directory of raster images into a (count, H, W, 3) array.

    All images must share one size; files are read in sorted-name order.
    """
    from PIL import Image

    root = Path(path)
    files = sorted(
        f for f in root.iterdir() if f.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not files:
        raise FileNotFoundError(f"no image files found in {root}")
    frames = []
    for f in files:
        with Image.open(f) as im:
            frames.append(np.asarray(im.convert("RGB"), dtype=float))
    shapes = {a.shape for a in frames}
    if len(shapes) != 1:
        raise DimensionError(f"images in {root} have mixed shapes: {sorted(shapes)}")
    return _normalize_pixels(np.stack(frames))


def write_raw_tensor(path: str | Path, images: np.ndarray) -> None:
    """Write a (count, H, W, C) float array in the raw corpus layout."""
    images = np.asarray(images)
    if images.ndim != 4:
        raise DimensionError(f"expected (count, H, W, C) array, got {images.shape}")
    header = np.asarray(images.shape, dtype=RAW_HEADER_DTYPE)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(images.astype(RAW_VALUE_DTYPE).tobytes())


def read_raw_tensor(path: str | Path) -> np.ndarray:
    """Read a raw corpus file back into a normalized (count, H, W, C) array."""
    with open(path, "rb") as fh:
        header = np.frombuffer(fh.read(4 * RAW_HEADER_DTYPE.itemsize), RAW_HEADER_DTYPE)
        if header.size != 4 or (header <= 0).any():
            raise ValueError(f"bad raw-tensor header in {path}: {header}")
        count, h, w, c = (int(v) for v in header)
        data = np.frombuffer(fh.read(), RAW_VALUE_DTYPE)
    if data.size != count * h * w * c:
        raise DimensionError(
            f"raw-tensor payload has {data.size} values, header implies "
            f"{count * h * w * c}"
        )
    return _normalize_pixels(data.reshape(count, h, w, c).astype(float))


def load_corpus(path: str | Path) -> np.ndarray:
    """Load either ingestion format by inspecting the path."""
    path = Path(path)
    if path.is_dir():
        return load_image_dir(path)
    return read_raw_tensor(path)


# ---------------------------------------------------------------------------
# synthetic corpus
# ---------------------------------------------------------------------------


def make_synthetic_images(
    count: int, height: int = 32, width: int = 32, seed: int = 0
) -> np.ndarray:
    """Generate a reproducible corpus of structured color images.

    Each image mixes a power-law-filtered noise field (smooth spatial
    correlations, so neighboring patches are informative about each
    other), a random linear shading gradient, and a couple of soft
    geometric shapes.  Values are in [0, 1].
    """
    rng = np.random.default_rng(seed)
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    radius = np.sqrt(fy**2 + fx**2)
    images = np.empty((count, height, width, 3))
    yy, xx = np.mgrid[0:height, 0:width]
    for i in range(count):
        alpha = rng.uniform(1.0, 2.0)
        spectrum_scale = (radius + 1.0 / max(height, width)) ** (-alpha)
        base = np.fft.ifft2(
            np.fft.fft2(rng.standard_normal((height, width))) * spectrum_scale
        ).real
        lo, hi = base.min(), base.max()
        base = (base - lo) / (hi - lo + 1e-12)

        gx, gy = rng.uniform(-0.5, 0.5, size=2)
        gradient = gx * (xx / width - 0.5) + gy * (yy / height - 0.5)

        img = base[..., None] + gradient[..., None]
        img = img + rng.uniform(-0.15, 0.15, size=3)[None, None, :]

        for _ in range(rng.integers(1, 4)):
            cy, cx = rng.uniform(0, height), rng.uniform(0, width)
            r = rng.uniform(2.0, max(height, width) / 3.0)
            blob = np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * r * r)))
            img += rng.uniform(-0.6, 0.6) * blob[..., None]

        lo, hi = img.min(), img.max()
        images[i] = (img - lo) / (hi - lo + 1e-12)
    return images

"""Image container and bit-exact binary PGM/PPM I/O.

Samples live as float64 planes normalized to [0, 1]; 8-bit integers appear
only at the file boundary. Quantization is round-half-up, so a 0.5 gray
sample maps to byte 128.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PnmError(ValueError):
    """Malformed or unsupported PGM/PPM input."""


class PnmMagicError(PnmError):
    """Magic number is not P5 or P6."""


class PnmMaxvalError(PnmError):
    """Header maxval is not 255."""


class PnmTruncatedError(PnmError):
    """Pixel payload is shorter than the header promises."""


@dataclass(frozen=True)
class Image:
    """Channel-planar raster: one (height, width) float64 array per channel.

    Gray images carry 1 plane, RGB images 3. Planes are copied and made
    read-only at construction, so instances are safe to share across
    concurrent workers. Producers (loaders, denoisers) clamp their output
    to [0, 1]; intermediates such as unclamped noisy images may hold
    out-of-range samples.
    """

    planes: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.planes) not in (1, 3):
            raise ValueError(f"expected 1 or 3 planes, got {len(self.planes)}")
        frozen = []
        shape = None
        for p in self.planes:
            arr = np.array(p, dtype=np.float64, copy=True)
            if arr.ndim != 2 or arr.size == 0:
                raise ValueError("each plane must be a non-empty 2-D array")
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise ValueError(f"plane shapes differ: {arr.shape} vs {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError("plane contains non-finite samples")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "planes", tuple(frozen))

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def channels(self) -> int:
        return len(self.planes)

    @classmethod
    def from_gray(cls, plane) -> "Image":
        return cls(planes=(np.asarray(plane),))

    @classmethod
    def from_planes(cls, planes) -> "Image":
        return cls(planes=tuple(np.asarray(p) for p in planes))


def quantize(img: Image) -> np.ndarray:
    """8-bit samples as a (channels, height, width) uint8 array.

    Clamps to [0, 1] first, then rounds half-up: byte = floor(255*s + 0.5).
    """
    stack = np.stack([np.clip(p, 0.0, 1.0) for p in img.planes])
    return np.floor(stack * 255.0 + 0.5).astype(np.uint8)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comment lines."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in b" \t\r\n":
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PnmTruncatedError("header ended before all fields were read")
    start = pos
    while pos < n and data[pos : pos + 1] not in b" \t\r\n":
        pos += 1
    return data[start:pos], pos


def load_image(path) -> Image:
    """Read a binary PGM (P5, gray) or PPM (P6, RGB) file.

    Only 8-bit maxval-255 files are supported; samples are mapped to
    v / 255 exactly.
    """
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmMagicError(f"unsupported magic number {magic!r} (want P5 or P6)")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise PnmError(f"non-numeric {name} field {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"maxval {maxval} unsupported (want 255)")
    if pos >= len(data) or data[pos : pos + 1] not in b" \t\r\n":
        raise PnmError("missing whitespace after maxval")
    pos += 1
    count = width * height * channels
    payload = data[pos : pos + count]
    if len(payload) < count:
        raise PnmTruncatedError(
            f"payload holds {len(payload)} bytes, header promises {count}"
        )
    raw = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        planes = (raw.reshape(height, width) / 255.0,)
    else:
        rgb = raw.reshape(height, width, 3)
        planes = tuple(rgb[:, :, c] / 255.0 for c in range(3))
    return Image(planes=planes)


def save_image(img: Image, path) -> None:
    """Write img as binary P5 (gray) or P6 (RGB), maxval 255.

    Byte output is a deterministic function of the image: fixed header
    layout, round-half-up quantization.
    """
    q = quantize(img)
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    if img.channels == 1:
        payload = q[0].tobytes()
    else:
        payload = np.transpose(q, (1, 2, 0)).tobytes()
    Path(path).write_bytes(header + payload)


def to_gray(img: Image) -> Image:
    """BT.601 luma conversion: gray = 0.299 R + 0.587 G + 0.114 B.

    Computed as (299 R + 587 G + 114 B) / 1000 so that the weights sum to
    exactly 1. Gray input is returned unchanged.
    """
    if img.channels == 1:
        return img
    r, g, b = img.planes
    gray = (299.0 * r + 587.0 * g + 114.0 * b) / 1000.0
    return Image.from_gray(np.clip(gray, 0.0, 1.0))

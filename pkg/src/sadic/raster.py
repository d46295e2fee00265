"""Deterministic point-cloud rasterization and byte-level image I/O.

Images are numpy uint8 arrays of shape (height, width, 3).  PPM (P6) is
written and read raw (fully deterministic, used for golden-raster
regression); PNG is written by a minimal encoder (zlib, filter 0).
"""

from __future__ import annotations

import struct
import zlib
from typing import Optional, Sequence

import numpy as np

DEFAULT_PALETTE = (
    (221, 52, 52),  # letter 0: red
    (47, 158, 79),  # letter 1: green
    (61, 90, 217),  # letter 2: blue
    (201, 143, 38),  # letter 3: amber
)

WHITE = (255, 255, 255)


def blank(width: int, height: int, color=WHITE) -> np.ndarray:
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, :] = color
    return img


def window_of(points_list: Sequence[np.ndarray], pad: float = 0.05):
    """Bounding window (xmin, xmax, ymin, ymax) of a list of (n,2) arrays."""
    pts = [p for p in points_list if len(p)]
    if not pts:
        return (-1.0, 1.0, -1.0, 1.0)
    allp = np.concatenate(pts)
    xmin, ymin = allp.min(axis=0)
    xmax, ymax = allp.max(axis=0)
    dx = max(xmax - xmin, 1e-12)
    dy = max(ymax - ymin, 1e-12)
    return (
        float(xmin - pad * dx),
        float(xmax + pad * dx),
        float(ymin - pad * dy),
        float(ymax + pad * dy),
    )


def bin_points(
    img: np.ndarray, points: np.ndarray, window, color, dot: int = 1
) -> None:
    """Paint points into the image in place; deterministic overwrite order."""
    if len(points) == 0:
        return
    height, width = img.shape[:2]
    xmin, xmax, ymin, ymax = window
    xs = (points[:, 0] - xmin) / (xmax - xmin) * (width - 1)
    ys = (points[:, 1] - ymin) / (ymax - ymin) * (height - 1)
    px = np.floor(xs + 0.5).astype(np.int64)
    py = np.floor(ys + 0.5).astype(np.int64)
    keep = (px >= 0) & (px < width) & (py >= 0) & (py < height)
    px, py = px[keep], py[keep]
    for ox in range(dot):
        for oy in range(dot):
            qx = np.clip(px + ox - dot // 2, 0, width - 1)
            qy = np.clip(py + oy - dot // 2, 0, height - 1)
            img[height - 1 - qy, qx] = color


def write_ppm(path: str, img: np.ndarray) -> None:
    height, width = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (width, height))
        fh.write(img.astype(np.uint8).tobytes())


def read_ppm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P6"):
        raise ValueError("not a P6 PPM file")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    width, height, maxval = map(int, fields)
    if maxval != 255:
        raise ValueError("only maxval 255 supported")
    pos += 1
    raw = data[pos : pos + width * height * 3]
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()


def write_png(path: str, img: np.ndarray) -> None:
    height, width = img.shape[:2]
    raw = b"".join(
        b"\x00" + img[row].astype(np.uint8).tobytes() for row in range(height)
    )

    def chunk(tag: bytes, payload: bytes) -> bytes:
        return (
            struct.pack(">I", len(payload))
            + tag
            + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
        )

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(chunk(b"IHDR", header))
        fh.write(chunk(b"IDAT", zlib.compress(raw, 9)))
        fh.write(chunk(b"IEND", b""))


def write_image(path: str, img: np.ndarray) -> None:
    if path.endswith(".ppm"):
        write_ppm(path, img)
    elif path.endswith(".png"):
        write_png(path, img)
    else:
        raise ValueError("unsupported image extension (use .png or .ppm)")


def pixel_diff_fraction(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of pixels that differ between two images of equal shape."""
    if a.shape != b.shape:
        raise ValueError("image shapes differ")
    return float((a != b).any(axis=2).mean())

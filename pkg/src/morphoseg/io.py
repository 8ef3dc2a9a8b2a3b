"""Image file I/O: binary PGM/PPM, PNG (via Pillow) and PFM.

All loaders return float64 arrays scaled to ``[0, 1]``; label images are
stored as 16-bit grayscale PNG so that they round-trip bit-exactly.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np
from PIL import Image

from .exceptions import FormatError, LabelRangeError
from .validation import check_labels

__all__ = [
    "load_image",
    "read_pnm",
    "write_pnm",
    "read_pfm",
    "write_pfm",
    "save_labels",
    "load_labels",
    "save_png",
]

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_MAX_LABEL = 65535
_SKIP = re.compile(rb"\s*(#[^\n]*\n\s*)*")
_INT = re.compile(rb"\d+")


def _read_bytes(path) -> bytes:
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _pnm_header(data: bytes, n_fields: int) -> tuple[list[int], int]:
    """Parse the whitespace/comment separated integer fields after the magic."""
    fields: list[int] = []
    pos = 2
    while len(fields) < n_fields:
        m = _SKIP.match(data, pos)
        pos = m.end()
        m = _INT.match(data, pos)
        if m is None:
            raise FormatError("truncated or malformed PNM header")
        fields.append(int(m.group()))
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos : pos + 1] not in b" \t\r\n":
        raise FormatError("malformed PNM header terminator")
    return fields, pos + 1


def read_pnm(path) -> np.ndarray:
    """Decode a binary P5 (gray) or P6 (RGB) file, 8- or 16-bit.

    Returns float64 samples divided by the file's maxval, shaped ``(H, W)``
    or ``(H, W, 3)``.
    """
    data = _read_bytes(path)
    return _decode_pnm(data)


def _decode_pnm(data: bytes) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported PNM magic {magic!r}")
    (width, height, maxval), offset = _pnm_header(data, 3)
    if width <= 0 or height <= 0:
        raise FormatError(f"invalid PNM dimensions {width}x{height}")
    if not 0 < maxval < 65536:
        raise FormatError(f"unsupported PNM maxval {maxval}")
    channels = 3 if magic == b"P6" else 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    if len(data) - offset < count * dtype.itemsize:
        raise FormatError("truncated PNM raster")
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
    shape = (height, width, 3) if channels == 3 else (height, width)
    return raw.reshape(shape).astype(np.float64) / maxval


def write_pnm(path, img: np.ndarray, maxval: int = 255) -> None:
    """Write a ``[0, 1]`` float image as P5 or P6 with the given maxval."""
    img = np.asarray(img, dtype=np.float64)
    magic = b"P6" if img.ndim == 3 else b"P5"
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    dtype = ">u2" if maxval > 255 else "u1"
    header = b"%s\n%d %d\n%d\n" % (magic, img.shape[1], img.shape[0], maxval)
    Path(path).write_bytes(header + q.astype(dtype).tobytes())


def read_pfm(path) -> np.ndarray:
    """Decode a grayscale (``Pf``) or color (``PF``) portable float map.

    Rows are stored bottom-to-top; the returned array is top-to-bottom.
    Samples are returned unmodified (no clamping).
    """
    data = _read_bytes(path)
    return _decode_pfm(data)


def _decode_pfm(data: bytes) -> np.ndarray:
    lines = []
    pos = 0
    for _ in range(3):
        end = data.find(b"\n", pos)
        if end < 0:
            raise FormatError("truncated PFM header")
        lines.append(data[pos:end].strip())
        pos = end + 1
    magic = lines[0]
    if magic not in (b"Pf", b"PF"):
        raise FormatError(f"unsupported PFM magic {magic[:2]!r}")
    try:
        width, height = (int(v) for v in lines[1].split())
        scale = float(lines[2])
    except ValueError:
        raise FormatError("malformed PFM header") from None
    if width <= 0 or height <= 0 or scale == 0.0:
        raise FormatError("malformed PFM header")
    channels = 3 if magic == b"PF" else 1
    dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
    count = width * height * channels
    if len(data) - pos < count * 4:
        raise FormatError("truncated PFM raster")
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    shape = (height, width, 3) if channels == 3 else (height, width)
    return np.flipud(raw.reshape(shape)).astype(np.float64)


def write_pfm(path, img: np.ndarray) -> None:
    """Write a little-endian (scale -1.0) PFM."""
    img = np.asarray(img, dtype=np.float64)
    magic = b"PF" if img.ndim == 3 else b"Pf"
    header = b"%s\n%d %d\n-1.0\n" % (magic, img.shape[1], img.shape[0])
    body = np.ascontiguousarray(np.flipud(img)).astype("<f4").tobytes()
    Path(path).write_bytes(header + body)


def _decode_png(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            arr = np.array(im)
    except OSError as exc:
        raise FormatError(f"cannot decode PNG {path}: {exc}") from exc
    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode == "RGB":
        return arr.astype(np.float64) / 255.0
    if mode in ("I;16", "I;16B", "I"):
        if arr.min() < 0 or arr.max() > 65535:
            raise FormatError(f"PNG mode {mode} holds values outside 16 bits")
        return arr.astype(np.float64) / 65535.0
    raise FormatError(f"unsupported PNG mode {mode!r}")


def load_image(path) -> np.ndarray:
    """Load a PGM, PPM or PNG file as a float image in ``[0, 1]``.

    Gray files give an ``(H, W)`` array, color files ``(H, W, 3)``.

    Raises
    ------
    OSError
        The file cannot be read.
    FormatError
        The format or bit depth is unsupported; the message carries the
        offending magic bytes.
    """
    data = _read_bytes(path)
    if data[:2] in (b"P5", b"P6"):
        return _decode_pnm(data)
    if data[:8] == _PNG_MAGIC:
        return _decode_png(path)
    if data[:2] in (b"Pf", b"PF"):
        return _decode_pfm(data)
    raise FormatError(f"unsupported image format, magic bytes {data[:4]!r}")


def save_labels(labels, path) -> None:
    """Write labels as a 16-bit grayscale PNG whose values are the labels."""
    arr = check_labels(labels)
    if arr.max() > _MAX_LABEL:
        raise LabelRangeError(f"label {int(arr.max())} exceeds 16-bit PNG range ({_MAX_LABEL})")
    Image.fromarray(arr.astype(np.uint16)).save(os.fspath(path), format="PNG")


def load_labels(path) -> np.ndarray:
    """Read integer labels from a PNG (8/16-bit gray) or P5 PGM file."""
    data = _read_bytes(path)
    if data[:2] == b"P5":
        (_, _, maxval), _ = _pnm_header(data, 3)
        return np.rint(_decode_pnm(data) * maxval).astype(np.int64)
    if data[:8] != _PNG_MAGIC:
        raise FormatError(f"unsupported label format, magic bytes {data[:4]!r}")
    with Image.open(path) as im:
        if im.mode not in ("L", "I;16", "I;16B", "I"):
            raise FormatError(f"label PNG must be grayscale, got mode {im.mode!r}")
        return np.array(im).astype(np.int64)


def save_png(path, img: np.ndarray) -> None:
    """Save a ``[0, 1]`` float gray or RGB image as an 8-bit PNG."""
    q = np.rint(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255).astype(np.uint8)
    Image.fromarray(q).save(os.fspath(path), format="PNG")

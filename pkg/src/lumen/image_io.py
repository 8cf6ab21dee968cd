"""Reading and writing frames as 8-bit PNG or binary PPM (P6).

Values map linearly between [0, 1] floats and the 0..255 byte range;
writing rounds half away from zero.  Anything that is not an 8-bit
RGB/RGBA PNG or a maxval-255 P6 file is rejected with ImageFormatError
rather than silently converted.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image

from .core import RgbImage
from .errors import ImageFormatError, ParameterError

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_RGB = 2
_RGBA = 6


def _check_png_header(header: bytes, path) -> None:
    # IHDR is always the first chunk: depth at byte 24, color type at 25
    if len(header) < 26:
        raise ImageFormatError(f"{path}: truncated png header")
    depth, color_type = header[24], header[25]
    if depth != 8:
        raise ImageFormatError(
            f"{path}: only 8-bit png supported, got bit depth {depth}")
    if color_type not in (_RGB, _RGBA):
        raise ImageFormatError(
            f"{path}: only rgb/rgba png supported, got color type {color_type}")


def _load_png(path) -> np.ndarray:
    with open(path, "rb") as fh:
        _check_png_header(fh.read(26), path)
    try:
        with Image.open(path) as im:
            im.load()
            arr = np.asarray(im)
    except OSError as exc:
        raise ImageFormatError(f"{path}: undecodable png ({exc})") from exc
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ImageFormatError(f"{path}: expected rgb/rgba data")
    return arr[:, :, :3]


def _load_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P6"):
        raise ImageFormatError(f"{path}: not a binary P6 file")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data):
            byte = data[pos:pos + 1]
            if byte.isspace():
                pos += 1
            elif byte == b"#":
                newline = data.find(b"\n", pos)
                pos = len(data) if newline < 0 else newline + 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if pos == start:
            raise ImageFormatError(f"{path}: truncated ppm header")
        fields.append(data[start:pos])
    pos += 1  # the single whitespace byte that ends the header
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise ImageFormatError(f"{path}: malformed ppm header") from None
    if maxval != 255:
        raise ImageFormatError(f"{path}: only maxval 255 supported, got {maxval}")
    expected = width * height * 3
    raster = data[pos:pos + expected]
    if len(raster) < expected:
        raise ImageFormatError(f"{path}: ppm raster truncated "
                               f"({len(raster)} of {expected} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


def load_image(path) -> RgbImage:
    """Read a PNG or PPM file into unit-range floats.

    The format is sniffed from the file's magic bytes, not its name.
    """
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic == _PNG_MAGIC:
        arr = _load_png(path)
    elif magic.startswith(b"P6"):
        arr = _load_ppm(path)
    else:
        raise ImageFormatError(f"{path}: not a png or binary ppm file")
    try:
        return RgbImage(arr.astype(np.float64) / 255.0)
    except ParameterError as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc


def quantize_bytes(img: RgbImage) -> np.ndarray:
    """Unit floats to 0..255 uint8, rounding half away from zero."""
    return np.floor(img.pixels * 255.0 + 0.5).astype(np.uint8)


def save_image(img: RgbImage, path) -> None:
    """Write as PNG or PPM, chosen by file extension."""
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    data = quantize_bytes(img)
    if suffix == ".png":
        Image.fromarray(data, mode="RGB").save(path, format="PNG")
    elif suffix == ".ppm":
        header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
        with open(path, "wb") as fh:
            fh.write(header + data.tobytes())
    else:
        raise ImageFormatError(
            f"{path}: unsupported extension {suffix!r}, use .png or .ppm")

"""Binary portable graymap (P5) encoder and decoder.

Only the two maxvals that map onto whole bytes are accepted: 255 (one byte
per sample) and 65535 (two bytes per sample, big-endian as the format
requires)."""

import numpy as np

from ..common.errors import InputError, PgmError

MAXVALS = {255: np.dtype(np.uint8), 65535: np.dtype(">u2")}
_WHITESPACE = b" \t\r\n\x0b\x0c"


def encode_pgm(image, maxval=None):
    """Serialize a 2-D image as "P5\\n<width> <height> <maxval>\\n" followed by the raster"""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"A PGM holds a 2-D image, got shape {image.shape}")
    if maxval is None:
        maxval = 255 if image.dtype == np.uint8 else 65535
    if maxval not in MAXVALS:
        raise ValueError(f"PGM maxval must be 255 or 65535, got {maxval}")
    if image.size and (image.min() < 0 or image.max() > maxval):
        raise ValueError(f"Image values exceed the PGM maxval {maxval}")
    height, width = image.shape
    header = f"P5\n{width} {height} {maxval}\n".encode("ascii")
    return header + np.ascontiguousarray(image.astype(MAXVALS[maxval])).tobytes()


class _HeaderReader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def skip_separators(self):
        data = self.data
        while self.offset < len(data):
            byte = data[self.offset : self.offset + 1]
            if byte in _WHITESPACE:
                self.offset += 1
            elif byte == b"#":
                end = data.find(b"\n", self.offset)
                self.offset = len(data) if end < 0 else end + 1
            else:
                break

    def integer(self, what):
        self.skip_separators()
        start = self.offset
        while self.offset < len(self.data) and self.data[self.offset : self.offset + 1].isdigit():
            self.offset += 1
        if self.offset == start:
            if start >= len(self.data):
                raise PgmError(f"Header ends before the {what}", start)
            raise PgmError(f"Expected the {what} as a decimal integer", start)
        return int(self.data[start : self.offset]), start


def decode_pgm(data):
    """Parse P5 bytes into a uint8 or uint16 array of shape [height, width]"""
    data = bytes(data)
    if data[:2] != b"P5":
        raise PgmError("Not a binary PGM: magic number 'P5' missing", 0)
    reader = _HeaderReader(data)
    reader.offset = 2
    if reader.offset < len(data) and data[reader.offset : reader.offset + 1] not in _WHITESPACE + b"#":
        raise PgmError("Expected whitespace after the magic number", reader.offset)
    width, width_at = reader.integer("width")
    height, height_at = reader.integer("height")
    maxval, maxval_at = reader.integer("maxval")
    if width < 1:
        raise PgmError(f"Width must be positive, got {width}", width_at)
    if height < 1:
        raise PgmError(f"Height must be positive, got {height}", height_at)
    if maxval not in MAXVALS:
        raise PgmError(f"Unsupported maxval {maxval}, expected 255 or 65535", maxval_at)
    if reader.offset >= len(data) or data[reader.offset : reader.offset + 1] not in _WHITESPACE:
        raise PgmError("Expected a single whitespace byte before the raster", reader.offset)
    raster_at = reader.offset + 1
    sample = MAXVALS[maxval]
    needed = width * height * sample.itemsize
    available = len(data) - raster_at
    if available < needed:
        raise PgmError(f"Truncated raster: {needed} bytes expected, {available} present", len(data))
    raster = np.frombuffer(data, dtype=sample, count=width * height, offset=raster_at)
    native = np.uint8 if maxval == 255 else np.uint16
    return raster.reshape(height, width).astype(native)


def read_pgm(path):
    try:
        with open(path, "rb") as file:
            data = file.read()
    except OSError as e:
        raise InputError(f"Cannot read image {path}: {e.strerror}") from e
    try:
        return decode_pgm(data)
    except PgmError as e:
        error = PgmError(f"{path}: {e.args[0]}")
        error.offset = e.offset
        raise error from e


def write_pgm(path, image, maxval=None):
    with open(path, "wb") as file:
        file.write(encode_pgm(image, maxval))

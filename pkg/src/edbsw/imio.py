"""Image and file I/O: PNG/PGM reading, 8-bit PNG writing, atomic writes."""

import io
import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "IMAGE_SUFFIXES",
    "LUMA601",
    "ImageReadError",
    "read_image",
    "to_uint8",
    "encode_png",
    "write_png",
    "atomic_write_bytes",
    "atomic_write_text",
    "list_images",
]

IMAGE_SUFFIXES = (".png", ".pgm", ".ppm", ".pnm")
LUMA601 = (0.299, 0.587, 0.114)
_FORMATS = {"PNG", "PPM"}  # Pillow reports PGM/PPM/PNM as "PPM"


class ImageReadError(OSError):
    """Unreadable or unsupported input image."""


def read_image(path):
    """Load a PNG or binary PGM/PPM as a float grid in ``[0, 1]``.

    Colour images are reduced with Rec.601 luma weights; 16-bit data is
    divided by 65535, everything else by 255. Alpha is dropped.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in _FORMATS:
                raise ImageReadError(f"{path}: unsupported format {im.format}")
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            if mode in ("I;16", "I;16B", "I;16L", "I"):
                data = np.asarray(im, dtype=float) / 65535.0
            elif mode in ("RGB", "RGBA", "RGBX"):
                rgb = np.asarray(im, dtype=float)[..., :3]
                data = rgb @ np.array(LUMA601) / 255.0
            elif mode in ("L", "LA"):
                data = np.asarray(im, dtype=float)
                data = (data[..., 0] if data.ndim == 3 else data) / 255.0
            elif mode == "1":
                data = np.asarray(im, dtype=float)
            else:
                raise ImageReadError(f"{path}: unsupported pixel mode {mode}")
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise ImageReadError(f"{path}: {exc.strerror or exc}") from None
    except UnidentifiedImageError:
        raise ImageReadError(f"{path}: not a readable image") from None
    return np.clip(data, 0.0, 1.0)


def to_uint8(grid):
    """``round(255 * g)`` after clamping to ``[0, 1]``."""
    g = np.clip(np.nan_to_num(np.asarray(grid, dtype=float)), 0.0, 1.0)
    return np.rint(255.0 * g).astype(np.uint8)


def encode_png(grid):
    buf = io.BytesIO()
    Image.fromarray(to_uint8(grid)).save(buf, format="PNG")
    return buf.getvalue()


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write_bytes(path, data):
    """Write via a sibling temp file and ``os.replace`` so readers never see
    a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_png(path, grid):
    atomic_write_bytes(path, encode_png(grid))


def list_images(directory):
    """Sorted image files directly inside ``directory``."""
    d = Path(directory)
    if not d.is_dir():
        raise ImageReadError(f"{d}: not a directory")
    return sorted(p for p in d.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)

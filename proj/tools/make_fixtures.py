#!/usr/bin/env python3
"""Regenerates tests/data/natural/*.pgm from images bundled with scikit-image,
plus the small PNG decoder fixtures in tests/data/io.

Colour images are reduced to BT.601 luminance and every image is cropped to
even dimensions so it can be decimated by 2.
"""
import pathlib

import numpy as np
import skimage.data
from PIL import Image

NAMES = ["astronaut", "camera", "chelsea", "coffee", "coins", "moon"]


def luminance(img):
    if img.ndim == 2:
        return img.astype(np.float64)
    rgb = img[..., :3].astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def write_png_fixtures(io_dir):
    io_dir.mkdir(parents=True, exist_ok=True)
    gray = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    Image.fromarray(gray, mode="L").save(io_dir / "gray_4x3.png")
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    rgb[0, 1] = (0, 255, 0)
    rgb[1, 0] = (0, 0, 255)
    rgb[1, 1] = (100, 150, 200)
    Image.fromarray(rgb, mode="RGB").save(io_dir / "rgb_2x2.png")
    rgba = np.dstack([rgb, np.full((2, 2), 128, dtype=np.uint8)])
    Image.fromarray(rgba, mode="RGBA").save(io_dir / "rgba_2x2.png")


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
    write_png_fixtures(root / "io")
    out_dir = root / "natural"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in NAMES:
        y = luminance(getattr(skimage.data, name)())
        h, w = y.shape
        y = y[: h - h % 2, : w - w % 2]
        pixels = np.clip(np.rint(y), 0, 255).astype(np.uint8)
        with open(out_dir / f"{name}.pgm", "wb") as f:
            f.write(b"P5\n%d %d\n255\n" % (pixels.shape[1], pixels.shape[0]))
            f.write(pixels.tobytes())
        print(name, pixels.shape)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate the public test images under data/.

cameraman.pgm: scikit-image's CC0 camera image, 2x2 box-averaged to 256x256.
phantom.pgm:   scikit-image's Shepp-Logan phantom (400x400), 2x2 box-averaged to 200x200.
"""
import pathlib

import numpy as np
import skimage.data


def box2(img):
    img = img.astype(np.float64)
    h, w = img.shape
    img = img[: h - h % 2, : w - w % 2]
    return (img[0::2, 0::2] + img[1::2, 0::2] + img[0::2, 1::2] + img[1::2, 1::2]) / 4.0


def write_pgm(path, img):
    img = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    write_pgm(out / "cameraman.pgm", box2(skimage.data.camera()))
    phantom = skimage.io.imread(pathlib.Path(skimage.data.__file__).parent / "phantom.png")
    if phantom.ndim == 3:
        phantom = phantom[..., :3].mean(axis=2)
    write_pgm(out / "phantom.pgm", box2(phantom))


if __name__ == "__main__":
    main()

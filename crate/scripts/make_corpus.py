"""Build the local 512x512 grayscale test corpus.

Sources are natural photographs bundled with Python packages:
scikit-image (installed), PyWavelets and SciPy 1.9.3 (wheels fetched with
`pip download`, read directly from the archive without installing).

Usage: python3 scripts/make_corpus.py [OUT_DIR]
"""
import bz2
import glob
import io
import os
import subprocess
import sys
import tempfile
import zipfile

import numpy as np
from PIL import Image
import skimage.data

SKIMAGE = os.path.dirname(skimage.data.__file__)
WHEELS = ["PyWavelets==1.8.0", "scipy==1.9.3"]

# (output name, loader key, crop origin (left, top) or None)
ITEMS = [
    ("aero", "pywt:aero", None),
    ("ascent", "pywt:ascent", None),
    ("astronaut", "skimage:astronaut.png", None),
    ("brick", "skimage:brick.png", None),
    ("camera", "skimage:camera.png", None),
    ("face", "scipy:face", (256, 128)),
    ("grass", "skimage:grass.png", None),
    ("gravel", "skimage:gravel.png", None),
    ("hubble", "skimage:hubble_deep_field.jpg", (244, 180)),
    ("moon", "skimage:moon.png", None),
]


def to_luma(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.rint(y), 0, 255).astype(np.uint8)


def fetch_wheels(dest):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:", "-q", "-d", dest, *WHEELS],
        check=True,
    )
    return {
        "pywt": zipfile.ZipFile(glob.glob(os.path.join(dest, "[Pp]y[Ww]avelets-*.whl"))[0]),
        "scipy": zipfile.ZipFile(glob.glob(os.path.join(dest, "scipy-*.whl"))[0]),
    }


def load(key, wheels):
    kind, name = key.split(":")
    if kind == "skimage":
        im = Image.open(os.path.join(SKIMAGE, name))
        return np.asarray(im) if im.mode == "L" else to_luma(im.convert("RGB"))
    if kind == "pywt":
        return np.load(io.BytesIO(wheels["pywt"].read(f"pywt/data/{name}.npz")))["data"]
    raw = bz2.decompress(wheels["scipy"].read(f"scipy/misc/{name}.dat"))
    return to_luma(np.frombuffer(raw, dtype=np.uint8).reshape(768, 1024, 3))


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "corpus"
    os.makedirs(out, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheels = fetch_wheels(tmp)
        for name, key, crop in ITEMS:
            y = load(key, wheels)
            if crop is not None:
                left, top = crop
                y = y[top : top + 512, left : left + 512]
            assert y.shape == (512, 512), (name, y.shape)
            Image.fromarray(np.ascontiguousarray(y), mode="L").save(os.path.join(out, name + ".png"), optimize=True)
            print(name, y.mean().round(2), y.std().round(2))


if __name__ == "__main__":
    main()

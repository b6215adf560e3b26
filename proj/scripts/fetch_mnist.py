#!/usr/bin/env python3
"""Fetch 10,000 MNIST digits and write them as IDX files.

The digits come from the `mnist` npm package, which stores every image as
pixel intensities rounded to three decimals; round(v * 255) recovers the
original byte exactly. Output goes to data/mnist/ by default.
"""

import argparse
import json
import pathlib
import struct
import subprocess
import sys
import tarfile
import tempfile

PIXELS = 28 * 28


def fetch_package(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(["npm", "pack", "mnist@1.1.0", "--silent"], cwd=workdir, check=True, stdout=subprocess.DEVNULL)
    tarball = next(workdir.glob("mnist-*.tgz"))
    with tarfile.open(tarball) as tar:
        tar.extractall(workdir)
    return workdir / "package" / "src" / "digits"


def load_digits(digits_dir: pathlib.Path):
    images, labels = bytearray(), bytearray()
    for digit in range(10):
        flat = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
        if len(flat) % PIXELS:
            sys.exit(f"{digit}.json: {len(flat)} values is not a multiple of {PIXELS}")
        images.extend(round(v * 255) for v in flat)
        labels.extend([digit] * (len(flat) // PIXELS))
    return bytes(images), bytes(labels)


def write_idx(out_dir: pathlib.Path, images: bytes, labels: bytes) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    count = len(labels)
    with open(out_dir / "mnist-images.idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, count, 28, 28))
        f.write(images)
    with open(out_dir / "mnist-labels.idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, count))
        f.write(labels)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "data" / "mnist")
    parser.add_argument("--package-dir", type=pathlib.Path,
                        help="already-extracted package/src/digits directory (skips npm)")
    args = parser.parse_args()

    if args.package_dir:
        images, labels = load_digits(args.package_dir)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            images, labels = load_digits(fetch_package(pathlib.Path(tmp)))
    write_idx(args.out, images, labels)
    print(f"wrote {len(labels)} images to {args.out}")


if __name__ == "__main__":
    main()

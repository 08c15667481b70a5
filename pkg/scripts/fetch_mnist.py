#!/usr/bin/env python3
"""Download the four MNIST IDX files into data/mnist (gzipped).

Usage: python scripts/fetch_mnist.py [--dest DIR] [--base-url URL]

The default mirror serves the canonical gzipped IDX files; any mirror
laid out the same way works (e.g. https://ossci-datasets.s3.amazonaws.com/mnist
or a raw copy of github.com/fgnt/mnist). The loader accepts both the .gz
files written here and decompressed copies.
"""

import argparse
import gzip
import struct
import sys
import urllib.request
from pathlib import Path

FILES = [
    "train-images-idx3-ubyte.gz",
    "train-labels-idx1-ubyte.gz",
    "t10k-images-idx3-ubyte.gz",
    "t10k-labels-idx1-ubyte.gz",
]
DEFAULT_BASE = "https://ossci-datasets.s3.amazonaws.com/mnist"
MAGICS = {"images": 2051, "labels": 2049}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dest", default="data/mnist")
    ap.add_argument("--base-url", default=DEFAULT_BASE)
    args = ap.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name in FILES:
        target = dest / name
        if target.exists():
            print(f"{target} already present, skipping")
            continue
        url = f"{args.base_url.rstrip('/')}/{name}"
        print(f"fetching {url}")
        urllib.request.urlretrieve(url, target)
        magic = struct.unpack(">i", gzip.open(target, "rb").read(4))[0]
        expected = MAGICS["images" if "images" in name else "labels"]
        if magic != expected:
            print(f"error: {target} has magic {magic}, expected {expected}")
            target.unlink()
            return 1
    print(f"done; point EDGE_ATLAS_DATA at {dest} or pass --data-dir")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
# Copyright 2026 The atpqnn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes IDX files from the 5000-sample MNIST subset bundled with mlxtend.

The subset holds 500 images per digit. Usage:

    pip download --no-deps -d /tmp/wheels mlxtend
    python3 scripts/make_mnist_subset.py /tmp/wheels/mlxtend-*.whl data/mnist-01 --classes 0,1
"""
import argparse
import gzip
import io
import struct
import zipfile
from pathlib import Path

CSV_MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("wheel")
    ap.add_argument("out_dir")
    ap.add_argument("--classes", default="", help="comma list; empty keeps all digits")
    args = ap.parse_args()

    keep = {int(c) for c in args.classes.split(",") if c}
    with zipfile.ZipFile(args.wheel) as whl:
        raw = gzip.decompress(whl.read(CSV_MEMBER)).decode()

    images, labels = [], []
    for line in io.StringIO(raw):
        vals = [int(float(v)) for v in line.strip().split(",")]
        label = vals[-1]
        if keep and label not in keep:
            continue
        images.append(bytes(vals[:-1]))
        labels.append(label)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(img)
    with open(out / "labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))
    print(f"wrote {len(images)} samples to {out}")


if __name__ == "__main__":
    main()

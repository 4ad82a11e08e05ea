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
"""Writes the expected gate sequence of the s = 3 model circuit.

Pixel k is (k + 1) / 10 and flat parameter j is 0.01 * (j + 1).
"""
import math
import sys

S = 3
N = S * S
R = N
LAYERS = 3


def main(out):
    lines = []
    for k in range(N):
        lines.append("RX %d %.12f" % (k, math.pi * ((k + 1) / 10)))
    lines.append("X %d" % R)
    lines.append("H %d" % R)
    j = 0
    for layer in range(LAYERS):
        for d in range(N):
            lines.append("XX %d %d %.12f" % (d, R, 0.01 * (j + 1)))
            j += 1
            lines.append("ZZ %d %d %.12f" % (d, R, 0.01 * (j + 1)))
            j += 1
    lines.append("H %d" % R)
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "model_circuit_s3.txt")

"""Compare the numba kernels with their numpy twins.

Each backend runs in its own interpreter because the backend is fixed at
import time by QPUF_NUMBA.  Usage::

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import time

CASES = {
    "genie N=256": "genie",
    "SCL L=4 N=256": "scl",
    "Gray histogram r=10 N=256": "gray",
}

WORKER = r"""
import json, sys, time
import numpy as np
from qpuf import channel, quantizer, puf_model as pm
from qpuf.polar.construction import genie_construct
from qpuf.polar import decoder
from qpuf.leakage import subcode_rows, weight_histogram

quick = sys.argv[1] == "1"
t = quantizer.thresholds_for_uniform()
_, joint = channel.main_matrix_expected(pm.SRAM, t, 1000)
a = channel.additive_channel(joint)
res = {}

def timeit(name, fn, units):
    fn(1)  # warm up / compile
    t0 = time.perf_counter()
    fn(units)
    res[name] = (time.perf_counter() - t0) / units

frames = 256 if quick else 2048
timeit("genie", lambda n: genie_construct(a, 256, n if n > 1 else 4, 1), frames)

rng = np.random.default_rng(0)
mask = np.zeros(256, bool); mask[:192] = True
vals = np.zeros(256, np.uint8)
y = rng.integers(0, 4, (frames, 256))
llrs = decoder.llr_init(y, a)
timeit("scl", lambda n: decoder.scl_decode_best(llrs[:max(n, 1)], mask, vals), 64 if quick else 512)

sub = subcode_rows(256, range(246, 256))
timeit("gray", lambda n: weight_histogram(sub), 1)
print(json.dumps(res))
"""


def run(backend, quick):
    env = dict(os.environ, QPUF_NUMBA="1" if backend == "numba" else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, "1" if quick else "0"], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    t0 = time.perf_counter()
    nb = run("numba", args.quick)
    npy = run("numpy", args.quick)
    print(f"{'kernel':28} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for label, key in CASES.items():
        unit = "s/run" if key == "gray" else "ms/frame"
        scale = 1 if key == "gray" else 1e3
        print(f"{label:28} {nb[key] * scale:9.3f} {unit:>2} {npy[key] * scale:9.3f} {unit:>2} "
              f"{npy[key] / nb[key]:7.1f}x")
    print(f"total {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()

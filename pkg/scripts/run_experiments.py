#!/usr/bin/env python3
"""Run all four benchmark experiments at desk scale and write CSVs.

Results land in ./results/ (one file per experiment). Equivalent to calling
the `corebench` CLI once per experiment; tweak the argument lists below or
use the CLI directly for other settings. Set COREBENCH_THREADS to
parallelize trials.
"""

import pathlib
import sys

from corebench.cli import main

OUT = pathlib.Path("results")

RUNS = {
    "synth_gauss.csv": ["synth-gauss"],
    "synth_vectors.csv": ["synth-vectors"],
    "ortho.csv": ["ortho"],
    "regress_logistic.csv": ["regress", "--model", "logistic"],
    "regress_poisson.csv": ["regress", "--model", "poisson"],
}

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    for filename, args in RUNS.items():
        out = OUT / filename
        print(f"==> {' '.join(args)} -> {out}")
        code = main(args + ["--out", str(out)])
        if code != 0:
            sys.exit(code)
    print("done.")

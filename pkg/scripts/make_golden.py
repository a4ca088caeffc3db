"""Regenerate the golden CSV fixture and its frozen ``fcvt test`` output.

Usage: python scripts/make_golden.py
"""

import csv
import io
import json
from pathlib import Path

from fcvt import gen_design, gen_errors
from fcvt.cli import main

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"
N, K, SEED = 512, 3, 2024


def write_csv(path):
    X = gen_design("normal", N, K, seed=SEED).entries
    y = 1.0 + X @ [0.5, -1.0, 2.0] + gen_errors("normal", N, seed=SEED + 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "x3", "y"])
        for row, resp in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [repr(float(resp))])


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    csv_path = DATA / "golden_h0.csv"
    write_csv(csv_path)
    out = io.StringIO()
    assert main(["test", "--data", str(csv_path), "--response", "y", "--format", "json"], out=out) == 0
    (DATA / "golden_h0.json").write_text(json.dumps(json.loads(out.getvalue()), indent=2) + "\n")
    print(out.getvalue())

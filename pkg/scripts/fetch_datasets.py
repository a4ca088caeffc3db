"""Download the two public regression datasets used by the optional
real-data acceptance check and convert them to headed CSV files in ``data/``.

* death rate: 60 US metropolitan areas, 15 covariates, response ``mortality``
  (McDonald and Schwing, 1973), from John Burkardt's regression collection.
* mortgage: 1049 weekly US economic indicators, 15 covariates, response
  ``rate30`` (30-year conventional mortgage rate), from the KEEL repository.

Usage: python scripts/fetch_datasets.py [--dest DIR]

No preprocessing is applied beyond parsing: all covariates are kept in their
published units and the CLI adds an intercept.
"""

import argparse
import csv
import io
import urllib.request
import zipfile
from pathlib import Path

DEATHRATE_URL = "https://people.sc.fsu.edu/~jburkardt/datasets/regression/x28.txt"
MORTGAGE_URL = "https://sci2s.ugr.es/keel/dataset/data/regression/mortgage.zip"


def _get(url):
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def _numeric_rows(lines, width):
    rows = []
    for line in lines:
        tokens = line.replace(",", " ").split()
        if len(tokens) != width:
            continue
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            continue
    return rows


def deathrate(dest):
    text = _get(DEATHRATE_URL).decode("latin-1")
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    # index, A1..A15, B
    rows = _numeric_rows(lines, 17)
    if len(rows) != 60:
        raise SystemExit(f"death-rate file: expected 60 rows, parsed {len(rows)}")
    header = [f"A{k}" for k in range(1, 16)] + ["mortality"]
    _write(dest / "deathrate.csv", header, [r[1:] for r in rows])


def mortgage(dest):
    with zipfile.ZipFile(io.BytesIO(_get(MORTGAGE_URL))) as zf:
        name = next(n for n in zf.namelist() if n.endswith(".dat"))
        text = zf.read(name).decode("latin-1")
    lines = text.splitlines()
    attrs = [ln.split()[1] for ln in lines if ln.lower().startswith("@attribute")]
    data = [ln for ln in lines if ln.strip() and not ln.startswith("@")]
    rows = _numeric_rows(data, len(attrs))
    if len(rows) != 1049:
        raise SystemExit(f"mortgage file: expected 1049 rows, parsed {len(rows)}")
    _write(dest / "mortgage.csv", attrs[:-1] + ["rate30"], rows)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([repr(v) for v in r] for r in rows)
    print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dest", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    args = ap.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    deathrate(args.dest)
    mortgage(args.dest)

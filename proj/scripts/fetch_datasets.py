#!/usr/bin/env python3
"""Materialize the benchmark datasets under data/.

Local sources (no network): wine, wdbc, digits via scikit-learn.
Network sources (UCI/OpenML): banknote, seeds, breast_cancer, mnist_5k.
Every output is a comma-separated file with a header row and the label in the
last column, named "class".
"""

import argparse
import io
import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


def sanitize(name: str) -> str:
    return name.strip().lower().replace(" ", "_").replace(",", "_")


def from_sklearn(loader, path: Path):
    bundle = loader()
    header = [sanitize(n) for n in bundle.feature_names] + ["class"]
    rows = [list(x) + [int(y)] for x, y in zip(bundle.data, bundle.target)]
    write_csv(path, header, rows)


def fetch_text(url: str) -> str:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read().decode("utf-8")


def banknote(path: Path):
    text = fetch_text(f"{UCI}/00267/data_banknote_authentication.txt")
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    write_csv(path, ["variance", "skewness", "curtosis", "entropy", "class"], rows)


def seeds(path: Path):
    text = fetch_text(f"{UCI}/00236/seeds_dataset.txt")
    rows = []
    for line in text.splitlines():
        cells = line.split()
        if len(cells) != 8:
            continue
        rows.append(cells[:7] + [int(float(cells[7])) - 1])
    header = ["area", "perimeter", "compactness", "kernel_length", "kernel_width",
              "asymmetry", "groove_length", "class"]
    write_csv(path, header, rows)


def breast_cancer(path: Path):
    # Original Wisconsin file: sample id, nine 1-10 features, class 2/4.
    # Rows with missing cells ('?') are dropped; the loader rejects them.
    text = fetch_text(f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data")
    rows = []
    for line in text.splitlines():
        cells = line.strip().split(",")
        if len(cells) != 11 or "?" in cells:
            continue
        rows.append(cells[1:10] + [0 if cells[10] == "2" else 1])
    header = ["clump_thickness", "uniformity_size", "uniformity_shape", "adhesion",
              "epithelial_size", "bare_nuclei", "bland_chromatin", "normal_nucleoli",
              "mitoses", "class"]
    write_csv(path, header, rows)


def mnist_5k(path: Path, n_rows=5000, seed=0):
    from sklearn.datasets import fetch_openml
    import numpy as np

    print("fetching mnist_784 from OpenML (large download)")
    bundle = fetch_openml("mnist_784", version=1, as_frame=False, parser="auto")
    rng = np.random.RandomState(seed)
    picked = rng.choice(bundle.data.shape[0], size=n_rows, replace=False)
    header = [f"p{i}" for i in range(bundle.data.shape[1])] + ["class"]
    rows = [list(bundle.data[i].astype(int)) + [int(bundle.target[i])] for i in picked]
    write_csv(path, header, rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", nargs="*", default=None,
                        help="subset of dataset names to materialize")
    args = parser.parse_args()

    DATA_DIR.mkdir(exist_ok=True)

    from sklearn.datasets import load_breast_cancer, load_digits, load_wine

    local = {
        "wine": lambda p: from_sklearn(load_wine, p),
        "wdbc": lambda p: from_sklearn(load_breast_cancer, p),
        "digits": lambda p: from_sklearn(
            lambda: type("B", (), {
                "data": load_digits().data,
                "target": load_digits().target,
                "feature_names": [f"p{i}" for i in range(64)],
            })(), p),
    }
    remote = {
        "banknote": banknote,
        "seeds": seeds,
        "breast_cancer": breast_cancer,
        "mnist_5k": mnist_5k,
    }

    failures = []
    for name, fn in {**local, **remote}.items():
        if args.only is not None and name not in args.only:
            continue
        target = DATA_DIR / f"{name}.csv"
        if target.exists():
            print(f"kept existing {target}")
            continue
        try:
            fn(target)
        except Exception as err:  # noqa: BLE001 - report and continue
            failures.append(name)
            print(f"could not materialize {name}: {err}", file=sys.stderr)

    if failures:
        print(f"\nunavailable without network access: {', '.join(failures)}", file=sys.stderr)
        print("re-run this script on a machine with internet access", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Write data/wdbc.data in the UCI WDBC layout (id, diagnosis, 30 features).

Feature values come from the Wisconsin Diagnostic Breast Cancer table bundled
with scikit-learn, copied as text. That copy carries no patient ids, so
sequential ids starting at 1 are written instead.
"""

import csv
import importlib.resources as resources
import sys
from pathlib import Path


def main() -> int:
    default = Path(__file__).resolve().parents[1] / "data" / "wdbc.data"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else default
    text = resources.files("sklearn.datasets.data").joinpath("breast_cancer.csv").read_text()
    rows = list(csv.reader(text.splitlines()))[1:]  # first line is a shape header
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        for i, row in enumerate(rows, start=1):
            diagnosis = "M" if row[30] == "0" else "B"  # target 0 is malignant
            fh.write(",".join([str(i), diagnosis, *row[:30]]) + "\n")
    print(f"wrote {len(rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

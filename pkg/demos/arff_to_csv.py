# Convert a PROMISE .arff file into the CSV layout the loader expects.
#
#   python3 demos/arff_to_csv.py desharnais.arff data/desharnais.csv

import csv
import sys

from scipy.io import arff

src, dst = sys.argv[1], sys.argv[2]
rows, meta = arff.loadarff(src)
names = meta.names()

with open(dst, "w", newline="", encoding="utf-8") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(names)
    for row in rows:
        out = []
        for v in row:
            if isinstance(v, bytes):
                v = v.decode()
                out.append("" if v == "?" else v)
            else:
                out.append("" if v != v else repr(float(v)))  # NaN marks a missing value
        w.writerow(out)
print(f"{len(rows)} rows, columns: {', '.join(names)}")

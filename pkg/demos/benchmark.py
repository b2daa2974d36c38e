# Multi-seed benchmark through the command-line layer, written to ./results.
#
#   python3 demos/benchmark.py [DATA.csv DATA.schema]
#
# Without arguments a synthetic dataset is generated first.

import sys
import tempfile
from pathlib import Path

from mteba import synthetic
from mteba.cli import RunConfig, cmd_compare, cmd_run

if len(sys.argv) == 3:
    data, schema = Path(sys.argv[1]), Path(sys.argv[2])
else:
    tmp = Path(tempfile.mkdtemp())
    data, schema = tmp / "synthetic.csv", tmp / "synthetic.schema"
    data.write_text(synthetic.to_csv(synthetic.make_dataset(77)), encoding="utf-8")
    schema.write_text(synthetic.schema_text(), encoding="utf-8")

config = RunConfig(data, schema, ["mt-eba", "eba", "r-eba", "l-eba", "s-eba"], [1, 2, 3],
                   seeds=list(range(5)), out=Path("results"))
rows = cmd_run(config)
print()
cmd_compare(RunConfig(data, schema, ["eba", "r-eba", "l-eba", "s-eba"], [2], seeds=[0], out=config.out), "mt-eba")

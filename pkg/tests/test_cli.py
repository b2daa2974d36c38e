import csv
import subprocess
import sys

import numpy as np
import pytest

from mteba.cli import RunConfig, cmd_compare, cmd_inspect_tree, cmd_run, main
from mteba.synthetic import make_dataset, schema_text, to_csv


@pytest.fixture
def files(tmp_path):
    data, schema = tmp_path / "d.csv", tmp_path / "d.schema"
    data.write_text(to_csv(make_dataset(30, seed=3)), encoding="utf-8")
    schema.write_text(schema_text(), encoding="utf-8")
    return data, schema


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_run_rows_and_files(files, tmp_path, capsys):
    data, schema = files
    out = tmp_path / "out"
    code, stdout, err = run_cli(capsys, "run", "--dataset", data, "--schema", schema,
                                "--strategy", "eba", "--strategy", "mt-eba", "--k", "1,2,3", "--out", out)
    assert code == 0 and err == ""
    report = read_csv(out / "report.csv")
    assert len(report) == 6
    assert [(r["strategy"], r["K"]) for r in report] == [
        ("eba", "1"), ("eba", "2"), ("eba", "3"), ("mt-eba", "1"), ("mt-eba", "2"), ("mt-eba", "3")]
    assert len(read_csv(out / "residuals.csv")) == 6 * 30
    assert len(read_csv(out / "boxplot.csv")) == 6
    # printed grid agrees with the file at one decimal
    grid = stdout.splitlines()[1:]
    for line, row in zip(grid, report):
        mmre, mdmre, pred = line.split()[3:]
        assert mmre == f"{100 * float(row['mmre']):.1f}"
        assert mdmre == f"{100 * float(row['mdmre']):.1f}"
        assert pred == f"{float(row['pred25']):.1f}"


def test_reba_k_forced_to_one(files, tmp_path):
    data, schema = files
    rows = cmd_run(RunConfig(data, schema, ["r-eba", "eba"], [1, 2, 3], out=tmp_path / "o"))
    assert [(r.strategy, r.k) for r in rows] == [("r-eba", 1), ("eba", 1), ("eba", 2), ("eba", 3)]


def test_multi_seed_median_rows(files, tmp_path):
    data, schema = files
    rows = cmd_run(RunConfig(data, schema, ["eba"], [1], seeds=[0, 1, 2], out=tmp_path / "o"))
    assert [r.seed for r in rows] == ["0", "1", "2", "median"]
    assert rows[-1].report.mmre == float(np.median([r.report.mmre for r in rows[:3]]))


def test_report_files_byte_identical(files, tmp_path):
    data, schema = files
    for name in ("a", "b"):
        cmd_run(RunConfig(data, schema, ["mt-eba", "s-eba"], [1, 2], seeds=[4, 5], out=tmp_path / name))
    for f in ("report.csv", "residuals.csv", "boxplot.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_l_eba_without_size_column(tmp_path, capsys):
    d = make_dataset(12)
    schema = tmp_path / "s.schema"
    schema.write_text(schema_text().replace("PointsAdjust:size_numeric", "PointsAdjust:numeric"), encoding="utf-8")
    data = tmp_path / "d.csv"
    data.write_text(to_csv(d), encoding="utf-8")
    code, _, err = run_cli(capsys, "run", "--dataset", data, "--schema", schema, "--strategy", "l-eba")
    assert code != 0
    assert "size" in err
    assert len(err.strip().splitlines()) == 1


@pytest.mark.parametrize("argv, needle", [
    (["run", "--dataset", "{missing}", "--schema", "{schema}", "--strategy", "eba"], "cannot read"),
    (["run", "--dataset", "{data}", "--schema", "{data}", "--strategy", "eba"], ""),
    (["run", "--dataset", "{data}", "--schema", "{schema}", "--strategy", "magic"], "unknown strategy"),
    (["run", "--dataset", "{data}", "--schema", "{schema}", "--strategy", "eba", "--k", "40"], "too small"),
    (["run", "--dataset", "{data}", "--schema", "{schema}"], "--strategy"),
    (["inspect-tree", "--dataset", "{data}", "--schema", "{schema}", "--fold", "7"], "fold"),
    (["bogus"], "invalid choice"),
])
def test_error_paths_one_line(files, tmp_path, capsys, argv, needle):
    data, schema = files
    argv = [a.format(data=data, schema=schema, missing=tmp_path / "nope.csv") for a in argv]
    code, _, err = run_cli(capsys, *argv, "--out", tmp_path / "o") if argv[0] != "bogus" else run_cli(capsys, *argv)
    assert code != 0
    assert len(err.strip().splitlines()) == 1
    assert err.startswith("mteba: error:")
    assert needle in err


def test_compare_rows(files, tmp_path, capsys):
    data, schema = files
    cfg = RunConfig(data, schema, ["eba", "l-eba", "s-eba", "r-eba"], [2], out=tmp_path / "c")
    rows = cmd_compare(cfg, "mt-eba")
    assert len(rows) == 4
    table = read_csv(tmp_path / "c" / "significance.csv")
    assert [r["strategy"] for r in table] == ["eba", "l-eba", "s-eba", "r-eba"]
    assert "a: significant at 1%, b: significant at 5%" in capsys.readouterr().out


def test_compare_self(files, tmp_path):
    data, schema = files
    (row,) = cmd_compare(RunConfig(data, schema, ["eba"], [1], out=tmp_path / "c"), "eba")
    assert (row.z, row.p, row.marker) == (0.0, 1.0, "")


def test_inspect_tree_constant_effort(tmp_path):
    d = make_dataset(30, seed=2)
    text = to_csv(d).splitlines()
    header = text[0].split(",")
    col = header.index("Effort")
    rows = [line.split(",") for line in text[1:]]
    for r in rows:
        r[col] = "500"
    data = tmp_path / "c.csv"
    data.write_text("\n".join([text[0]] + [",".join(r) for r in rows]) + "\n", encoding="utf-8")
    schema = tmp_path / "c.schema"
    schema.write_text(schema_text(), encoding="utf-8")
    path = cmd_inspect_tree(RunConfig(data, schema, ["mt-eba"], out=tmp_path / "t"), 0, 0)
    assert path.name == "tree_fold0_seed0.txt"
    assert path.read_text(encoding="utf-8").splitlines()[-1] == "Number of rules in the tree: 1"


def test_inspect_tree_deterministic_and_branching(files, tmp_path):
    data, schema = files
    cfg_a = RunConfig(data, schema, ["mt-eba"], out=tmp_path / "a")
    cfg_b = RunConfig(data, schema, ["mt-eba"], out=tmp_path / "b")
    a = cmd_inspect_tree(cfg_a, 1, 3).read_bytes()
    b = cmd_inspect_tree(cfg_b, 1, 3).read_bytes()
    assert a == b


def test_inspect_tree_piecewise(tmp_path):
    # productivity jumps with team experience; with seed 1 every fold's tree branches
    rng = np.random.default_rng(0)
    n = 60
    exp = rng.integers(1, 6, n)
    size = rng.uniform(100, 400, n)
    effort = np.where(exp <= 2, 20 * size, 5 * size)
    lines = ["Project,TeamExp,PointsAdjust,Effort"]
    lines += [f"{i},{e},{float(s)!r},{float(y)!r}" for i, (e, s, y) in enumerate(zip(exp, size, effort), 1)]
    data = tmp_path / "p.csv"
    data.write_text("\n".join(lines) + "\n", encoding="utf-8")
    schema = tmp_path / "p.schema"
    schema.write_text("Project:id\nTeamExp:numeric\nPointsAdjust:size_numeric\nEffort:effort\n", encoding="utf-8")
    text = cmd_inspect_tree(RunConfig(data, schema, ["mt-eba"], out=tmp_path / "t"), 0, 1).read_text()
    assert any(line.strip().startswith("if ") for line in text.splitlines())


def test_inspect_tree_requires_mt_eba(files, tmp_path, capsys):
    data, schema = files
    code, _, err = run_cli(capsys, "inspect-tree", "--dataset", data, "--schema", schema,
                           "--strategy", "eba", "--fold", "0", "--out", tmp_path / "o")
    assert code != 0 and "mt-eba" in err


def test_console_entry_point(files, tmp_path):
    data, schema = files
    proc = subprocess.run(
        [sys.executable, "-m", "mteba.cli", "run", "--dataset", str(data), "--schema", str(schema),
         "--strategy", "eba", "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[0].split() == ["strategy", "K", "seed", "MMRE%", "MdMRE%", "PRED%"]

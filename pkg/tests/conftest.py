import numpy as np
import pytest

from mteba.dataset import Column, Dataset, Project, Schema

ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def random_dataset(rng, n, n_num=3, n_cat=2, n_tokens=3, with_size=True):
    """Mixed-type dataset with normalized-looking numeric features."""
    cols = [Column("id", "id")]
    cols += [Column(f"num{j}", "numeric") for j in range(n_num)]
    cols += [Column(f"cat{j}", "categorical") for j in range(n_cat)]
    if with_size:
        cols.append(Column("size", "size_numeric"))
    cols.append(Column("effort", "effort"))
    schema = Schema(tuple(cols))
    projects = []
    for i in range(n):
        feats = [float(v) for v in rng.random(n_num)]
        feats += [f"t{int(t)}" for t in rng.integers(0, n_tokens, n_cat)]
        size = None
        if with_size:
            size = float(rng.integers(10, 500))
            feats.append(size)
        effort = float(rng.uniform(50, 5000))
        projects.append(Project(str(i), tuple(feats), effort, size))
    return Dataset(schema, tuple(projects))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}".rstrip())

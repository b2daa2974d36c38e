import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mteba.modeltree import (
    Leaf,
    LinearModel,
    ModelTree,
    Split,
    TrainingMatrix,
    TreeParams,
    build_tree,
    dump_tree,
    fit_leaf_model,
    n_leaves,
    predict,
    prune,
    sd_reduction,
)


def line_data(n=50):
    x = np.linspace(0.0, 1.0, n)
    return x[:, None], 2 * x + 1


def piecewise_data(n=100):
    x = np.linspace(0.0, 1.0, n)
    return x[:, None], np.where(x <= 0.5, 2 * x, -x + 3)


def closed_form_line(x, y):
    """Slope/intercept from centered sums."""
    xm, ym = x.mean(), y.mean()
    slope = np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2)
    return ym - slope * xm, slope


def rmse(root, X, y, k=0.0):
    pred = np.array([predict(root, row, k) for row in X])
    return float(np.sqrt(np.mean((pred - y) ** 2)))


def test_sd_reduction_examples():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    assert sd_reduction(X, np.full(4, 7.0), 0, 1.5) == 0.0
    # population sd of {0, 0, 10, 10} is 5; both halves are constant
    assert sd_reduction(X, np.array([0.0, 0.0, 10.0, 10.0]), 0, 1.5) == pytest.approx(5.0)


def test_sd_reduction_degenerate_split():
    X = np.array([[0.0], [1.0]])
    with pytest.raises(ValueError, match="degenerate"):
        sd_reduction(X, np.array([1.0, 2.0]), 0, 5.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-1e3, 1e3)), min_size=2, max_size=25),
       st.integers(0, 24))
def test_sd_reduction_nonnegative(rows, cut):
    X = np.array([[r[0]] for r in rows])
    y = np.array([r[1] for r in rows])
    xs = np.unique(X[:, 0])
    if xs.size < 2:
        return
    i = cut % (xs.size - 1)
    thr = 0.5 * (xs[i] + xs[i + 1])
    if not (X[:, 0] <= thr).any() or (X[:, 0] <= thr).all():
        return
    assert sd_reduction(X, y, 0, thr) >= -1e-9 * (1 + np.std(y))


def test_leaf_model_singleton():
    m = fit_leaf_model(np.array([[3.0, 4.0]]), np.array([7.0]))
    assert m == LinearModel(7.0)
    assert m.predict([1.0, 2.0]) == 7.0


def test_leaf_model_exact_line():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([1.0, 3.0, 5.0])
    m = fit_leaf_model(X, y)
    b0, b1 = closed_form_line(X[:, 0], y)
    assert m.inputs == (0,)
    assert m.intercept == pytest.approx(b0, abs=1e-12) == pytest.approx(1.0)
    assert m.coefficients[0] == pytest.approx(b1, abs=1e-12) == pytest.approx(2.0)


def test_leaf_model_singular_falls_back_to_mean():
    m = fit_leaf_model(np.array([[1.0], [1.0]]), np.array([2.0, 6.0]))
    assert m == LinearModel(4.0)


def test_leaf_model_drops_useless_input():
    rng = np.random.default_rng(0)
    x = rng.random(30)
    noise = rng.random(30)
    m = fit_leaf_model(np.column_stack([x, noise]), 3 * x + 0.5)
    assert m.inputs == (0,)


def test_constant_outputs_give_single_leaf():
    X = np.random.default_rng(1).random((30, 3))
    root = build_tree(TrainingMatrix(X, np.full(30, 4.25)))
    assert isinstance(root, Leaf)
    assert root.model.predict(X[0]) == 4.25


def test_line_recovery():
    X, y = line_data()
    root = build_tree(TrainingMatrix(X, y))
    b0, b1 = closed_form_line(X[:, 0], y)
    assert isinstance(root, Leaf)
    assert abs(root.model.intercept - b0) < 1e-6 and abs(root.model.intercept - 1) < 1e-6
    assert abs(root.model.coefficients[0] - b1) < 1e-6 and abs(root.model.coefficients[0] - 2) < 1e-6


def test_unpruned_line_collapses_when_pruned():
    X, y = line_data()
    grown = build_tree(TrainingMatrix(X, y), TreeParams(prune=False))
    assert n_leaves(grown) > 1
    assert n_leaves(prune(grown)) == 1


def test_piecewise_recovery():
    X, y = piecewise_data()
    root = build_tree(TrainingMatrix(X, y))
    assert n_leaves(root) >= 2
    assert rmse(root, X, y) < 1e-6
    # per-segment least squares fits each half exactly; a single line does not
    left = X[:, 0] <= 0.5
    for mask in (left, ~left):
        b0, b1 = closed_form_line(X[mask, 0], y[mask])
        assert np.max(np.abs(b0 + b1 * X[mask, 0] - y[mask])) < 1e-9
    b0, b1 = closed_form_line(X[:, 0], y)
    assert np.sqrt(np.mean((b0 + b1 * X[:, 0] - y) ** 2)) > 0.1


def test_prune_leaf_identity():
    leaf = Leaf(LinearModel(1.0), 5)
    assert prune(leaf) is leaf


def test_row_counts_and_min_leaf():
    rng = np.random.default_rng(3)
    X = rng.random((120, 4))
    y = np.sin(6 * X[:, 0]) * 10 + X[:, 1] + rng.normal(0, 0.1, 120)
    params = TreeParams(min_leaf=4, prune=False)
    root = build_tree(TrainingMatrix(X, y), params)

    def walk(node):
        if isinstance(node, Leaf):
            assert node.n >= params.min_leaf
            return
        assert node.n == node.left.n + node.right.n
        assert node.left.n < node.n and node.right.n < node.n
        walk(node.left)
        walk(node.right)

    walk(root)
    assert n_leaves(root) > 1
    pruned = prune(root)
    assert n_leaves(pruned) <= n_leaves(root)
    assert all(np.isfinite(predict(pruned, row, 15.0)) for row in X)


def test_determinism():
    rng = np.random.default_rng(5)
    X = rng.integers(0, 2, (60, 3)).astype(float)
    y = X @ np.array([3.0, -2.0, 1.0]) + rng.normal(0, 0.5, 60)
    m = TrainingMatrix(X, y)
    assert build_tree(m) == build_tree(m)
    assert dump_tree(build_tree(m)) == dump_tree(build_tree(m))


def test_tie_prefers_lower_input():
    x = np.repeat([0.0, 1.0], 8)
    X = np.column_stack([x, x])
    y = 5 * x
    root = build_tree(TrainingMatrix(X, y), TreeParams(prune=False))
    assert isinstance(root, Split) and root.input_index == 0


def hand_tree():
    left = Leaf(LinearModel(2.0, (3.0,), (0,)), 12)
    right = Leaf(LinearModel(10.0), 8)
    return Split(0, 0.5, left, right, LinearModel(1.0, (1.0,), (0,)), 20, 1.0)


def test_smoothing_hand_evaluation():
    root = hand_tree()
    # x = 0.25 -> leaf 2 + 0.75 = 2.75, root model 1.25; (20*2.75 + 15*1.25)/35
    assert predict(root, [0.25], 15.0) == pytest.approx((20 * 2.75 + 15 * 1.25) / 35, abs=1e-12)
    # x = 1 -> leaf 10, root 2; (200 + 30)/35
    assert predict(root, [1.0], 15.0) == pytest.approx(230 / 35, abs=1e-12)


def test_smoothing_identities():
    root = hand_tree()
    for x in (0.1, 0.4, 0.9):
        raw = (root.left if x <= 0.5 else root.right).model.predict([x])
        assert predict(root, [x], 0.0) == raw
    leaf = Leaf(LinearModel(1.0, (2.0,), (0,)), 9)
    assert predict(leaf, [3.0], 15.0) == 7.0 == predict(leaf, [3.0], 0.0)


def test_predict_arity_mismatch():
    tree = ModelTree(hand_tree(), ("a", "b"))
    with pytest.raises(ValueError):
        tree.predict([0.1])


def test_dump_single_leaf():
    text = dump_tree(Leaf(LinearModel(3.5), 10))
    assert text == "y = 3.5 (10)\nNumber of rules in the tree: 1\n"


def test_dump_two_leaves():
    text = dump_tree(hand_tree(), ["z1"])
    lines = text.splitlines()
    assert sum(l.strip().startswith("if ") for l in lines) == 1
    assert sum(l.strip() == "else" for l in lines) == 1
    assert lines[-1] == "Number of rules in the tree: 2"
    assert text == (
        "if z1 <= 0.5\n"
        "  y = 2 + 3*z1 (12)\n"
        "else\n"
        "  y = 10 (8)\n"
        "Number of rules in the tree: 2\n"
    )


def test_dump_six_rule_tree():
    def leaf(c, n):
        return Leaf(LinearModel(c), n)

    m = LinearModel(0.0)
    inner = Split(3, 0.5, leaf(0.0, 10), leaf(0.01, 15), m, 25, 1.0)
    inner2 = Split(3, 0.5, leaf(-0.07, 11), leaf(1.01, 16), m, 27, 1.0)
    z2 = Split(1, 0.5, inner, inner2, m, 52, 1.0)
    z3 = Split(2, 0.5, leaf(0.02, 23), z2, m, 75, 1.0)
    root = Split(4, 0.5, z3, leaf(2.99, 25), m, 100, 1.0)
    text = dump_tree(root, ["z1", "z2", "z3", "z4", "z5"])
    assert text.splitlines()[0] == "if z5 <= 0.5"
    assert text.splitlines()[-1] == "Number of rules in the tree: 6"


def test_model_tree_wrapper():
    X, y = piecewise_data()
    tree = ModelTree.fit(TrainingMatrix(X, y, ("d",)), TreeParams(smoothing_k=0.0))
    assert tree.n_leaves >= 2
    assert tree.predict([0.25]) == pytest.approx(0.5, abs=1e-9)
    assert "if d <= " in tree.dump()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(8, 60), st.integers(1, 3))
def test_global_linear_data_fits_exactly(seed, n, m):
    rng = np.random.default_rng(seed)
    X = rng.random((n, m))
    coef = rng.uniform(-5, 5, m)
    y = 1.5 + X @ coef
    root = build_tree(TrainingMatrix(X, y))
    assert rmse(root, X, y, k=15.0) < 1e-6

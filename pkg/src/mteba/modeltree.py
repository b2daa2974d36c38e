"""M5-style model trees: SDR splitting, linear node models, pruning and smoothing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class TrainingMatrix:
    X: np.ndarray
    y: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"training inputs must be a non-empty 2-D matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError("one output per training row is required")
        names = tuple(self.names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError("one name per input column is required")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "names", names)


@dataclass(frozen=True)
class TreeParams:
    min_leaf: int = 4
    sd_stop_fraction: float = 0.05
    smoothing_k: float = 15.0
    prune: bool = True

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be positive")
        if not 0.0 < self.sd_stop_fraction < 1.0:
            raise ValueError("sd_stop_fraction must lie in (0, 1)")
        if self.smoothing_k < 0:
            raise ValueError("smoothing_k must be non-negative")


@dataclass(frozen=True)
class LinearModel:
    intercept: float
    coefficients: tuple[float, ...] = ()
    inputs: tuple[int, ...] = ()

    def predict(self, x: Sequence[float]) -> float:
        value = self.intercept
        for c, j in zip(self.coefficients, self.inputs):
            value += c * x[j]
        return float(value)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.intercept, dtype=float)
        for c, j in zip(self.coefficients, self.inputs):
            out += c * X[:, j]
        return out


@dataclass(frozen=True)
class Leaf:
    model: LinearModel
    n: int
    error: float = 0.0
    sd: float = 0.0


@dataclass(frozen=True)
class Split:
    input_index: int
    threshold: float
    left: "Node"
    right: "Node"
    model: LinearModel
    n: int
    sd: float
    error: float = 0.0


Node = Union[Leaf, Split]


def _pop_sd(y: np.ndarray) -> float:
    return float(np.std(y)) if y.size else 0.0


def sd_reduction(X: np.ndarray, y: np.ndarray, input_index: int, threshold: float) -> float:
    """sd(T) minus the size-weighted sd of the two sides of ``x <= threshold``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = X[:, input_index] <= threshold
    n, n_left = y.size, int(mask.sum())
    if n_left == 0 or n_left == n:
        raise ValueError("degenerate split: one side is empty")
    left, right = y[mask], y[~mask]
    return _pop_sd(y) - (left.size / n) * _pop_sd(left) - (right.size / n) * _pop_sd(right)


def _adjusted_error(residuals: np.ndarray, v: int) -> float:
    n = residuals.size
    factor = (n + v) / max(n - v, 1)
    return factor * float(np.mean(np.abs(residuals)))


def _ols(X: np.ndarray, y: np.ndarray, inputs: Sequence[int]) -> LinearModel | None:
    A = np.column_stack([np.ones(len(y))] + [X[:, j] for j in inputs])
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        return None
    return LinearModel(float(coef[0]), tuple(float(c) for c in coef[1:]), tuple(inputs))


def _model_error(model: LinearModel, X: np.ndarray, y: np.ndarray) -> float:
    return _adjusted_error(y - model.predict_many(X), 1 + len(model.inputs))


def fit_leaf_model(X: np.ndarray, y: np.ndarray) -> LinearModel:
    """Least squares over the non-constant inputs, then greedy input elimination.

    An input is dropped while doing so does not increase the adjusted error
    (n + v) / (n - v) * mean |residual|.  Too few rows, or a singular system,
    gives the intercept-only mean model.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = y.size
    mean_model = LinearModel(float(np.mean(y)))
    inputs = [j for j in range(X.shape[1]) if np.ptp(X[:, j]) > 0]
    if not inputs or n < len(inputs) + 2:
        return mean_model
    model = _ols(X, y, inputs)
    if model is None:
        return mean_model
    error = _model_error(model, X, y)
    while model.inputs:
        best = None
        for j in model.inputs:
            rest = [i for i in model.inputs if i != j]
            cand = _ols(X, y, rest) if rest else mean_model
            if cand is None:
                continue
            cand_error = _model_error(cand, X, y)
            if best is None or cand_error < best[0]:
                best = (cand_error, cand)
        if best is None or best[0] > error:
            break
        error, model = best
    return model


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int, tol: float):
    n = y.size
    sd = _pop_sd(y)
    yc = y - y.mean()
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], yc[order]
        s1, s2 = np.cumsum(ys), np.cumsum(ys * ys)
        tot1, tot2 = s1[-1], s2[-1]
        for i in range(min_leaf, n - min_leaf + 1):
            if xs[i - 1] == xs[i]:
                continue
            nl, nr = i, n - i
            m1l, m1r = s1[i - 1] / nl, (tot1 - s1[i - 1]) / nr
            sdl = math.sqrt(max(s2[i - 1] / nl - m1l * m1l, 0.0))
            sdr = math.sqrt(max((tot2 - s2[i - 1]) / nr - m1r * m1r, 0.0))
            red = sd - (nl / n) * sdl - (nr / n) * sdr
            if red > tol and (best is None or red > best[0]):
                best = (red, j, 0.5 * (xs[i - 1] + xs[i]))
    return best


def _grow(X, y, idx, params, root_sd, tol) -> Node:
    Xn, yn = X[idx], y[idx]
    n = idx.size
    sd = _pop_sd(yn)
    model = fit_leaf_model(Xn, yn)
    error = _model_error(model, Xn, yn)
    if n < 2 * params.min_leaf or sd < params.sd_stop_fraction * root_sd:
        return Leaf(model, n, error, sd)
    found = _best_split(Xn, yn, params.min_leaf, tol)
    if found is None:
        return Leaf(model, n, error, sd)
    _, j, thr = found
    mask = Xn[:, j] <= thr
    if mask.all() or not mask.any():
        return Leaf(model, n, error, sd)
    left = _grow(X, y, idx[mask], params, root_sd, tol)
    right = _grow(X, y, idx[~mask], params, root_sd, tol)
    return Split(j, float(thr), left, right, model, n, sd, error)


def build_tree(m: TrainingMatrix, params: TreeParams | None = None) -> Node:
    params = params or TreeParams()
    root_sd = _pop_sd(m.y)
    tol = 1e-12 * max(root_sd, np.finfo(float).tiny)
    root = _grow(m.X, m.y, np.arange(m.y.size), params, root_sd, tol)
    return prune(root) if params.prune else root


def _subtree_error(node: Node) -> float:
    if isinstance(node, Leaf):
        return node.error
    return (node.left.n * _subtree_error(node.left) + node.right.n * _subtree_error(node.right)) / node.n


def prune(root: Node, tol: float | None = None) -> Node:
    """Collapse, bottom-up, every split whose own model is no worse than its subtree.

    ``tol`` absorbs round-off when both errors are essentially zero; it
    defaults to a tiny fraction of the root's output spread.
    """
    if isinstance(root, Leaf):
        return root
    if tol is None:
        tol = 1e-9 * root.sd

    def walk(node: Node) -> Node:
        if isinstance(node, Leaf):
            return node
        left, right = walk(node.left), walk(node.right)
        node = Split(node.input_index, node.threshold, left, right, node.model, node.n, node.sd, node.error)
        if node.error <= _subtree_error(node) + tol:
            return Leaf(node.model, node.n, node.error, node.sd)
        return node

    return walk(root)


def n_leaves(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    return n_leaves(node.left) + n_leaves(node.right)


def n_inputs(node: Node) -> int:
    """Smallest input arity consistent with the splits and models of the tree."""
    used = set(node.model.inputs)
    if isinstance(node, Split):
        used.add(node.input_index)
        return max(n_inputs(node.left), n_inputs(node.right), max(used) + 1)
    return max(used) + 1 if used else 0


def predict(root: Node, x: Sequence[float], k: float = 15.0, arity: int | None = None) -> float:
    """Route ``x`` to a leaf, then blend back towards the root.

    At each ancestor the running value p becomes (n*p + k*q)/(n + k), with q
    the ancestor's own model output and n its training row count.
    """
    x = np.asarray(x, dtype=float)
    if arity is not None and x.shape != (arity,):
        raise ValueError(f"expected {arity} inputs, got {x.shape[0] if x.ndim else 0}")
    if x.ndim != 1 or x.shape[0] < n_inputs(root):
        raise ValueError("input vector is shorter than the tree arity")
    path = []
    node = root
    while isinstance(node, Split):
        path.append(node)
        node = node.left if x[node.input_index] <= node.threshold else node.right
    value = node.model.predict(x)
    if k == 0:
        return value
    for anc in reversed(path):
        q = anc.model.predict(x)
        value = value + k * (q - value) / (anc.n + k)
    return value


def _fmt(v: float) -> str:
    return f"{v:.8g}"


def _model_text(model: LinearModel, names: Sequence[str]) -> str:
    text = _fmt(model.intercept)
    for c, j in zip(model.coefficients, model.inputs):
        sign = "-" if c < 0 else "+"
        text += f" {sign} {_fmt(abs(c))}*{names[j]}"
    return f"y = {text}"


def dump_tree(root: Node, names: Sequence[str] | None = None, indent: str = "  ") -> str:
    """Readable nested if/else listing, ending with the rule (leaf) count."""
    if names is None:
        names = [f"x{j + 1}" for j in range(max(n_inputs(root), 1))]
    lines: list[str] = []

    def emit(node: Node, depth: int):
        pad = indent * depth
        if isinstance(node, Leaf):
            lines.append(f"{pad}{_model_text(node.model, names)} ({node.n})")
            return
        lines.append(f"{pad}if {names[node.input_index]} <= {_fmt(node.threshold)}")
        emit(node.left, depth + 1)
        lines.append(f"{pad}else")
        emit(node.right, depth + 1)

    emit(root, 0)
    lines.append(f"Number of rules in the tree: {n_leaves(root)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ModelTree:
    """A built tree bundled with its input names and smoothing constant."""

    root: Node
    names: tuple[str, ...]
    smoothing_k: float = 15.0
    params: TreeParams = field(default_factory=TreeParams)

    @classmethod
    def fit(cls, m: TrainingMatrix, params: TreeParams | None = None) -> "ModelTree":
        params = params or TreeParams()
        return cls(build_tree(m, params), m.names, params.smoothing_k, params)

    def predict(self, x: Sequence[float]) -> float:
        return predict(self.root, x, self.smoothing_k, arity=len(self.names))

    def dump(self) -> str:
        return dump_tree(self.root, self.names)

    @property
    def n_leaves(self) -> int:
        return n_leaves(self.root)

"""Binary classification trees with exact per-leaf class counts.

Scoring needs the number of positive and negative training rows in every
leaf, which off-the-shelf tree packages do not expose after pruning, so
the trees are grown here: recursive binary splits on ``value <= threshold``
chosen to maximize information gain (entropy in bits), candidate
thresholds at midpoints between consecutive distinct sorted values, and a
random feature subset per node. The split scan is the hot loop and runs
as a compiled kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numba
import numpy as np

GAIN_EPS = 1e-12


@dataclass
class Leaf:
    p: int
    n: int


@dataclass
class Split:
    feature: int
    threshold: float
    low: "Node" = None  # type: ignore[assignment]
    high: "Node" = None  # type: ignore[assignment]


Node = Union[Leaf, Split]


def binary_entropy(n_pos: int, n_total: int) -> float:
    """Entropy in bits of a two-class source with n_pos of n_total positive."""
    if n_pos <= 0 or n_pos >= n_total:
        return 0.0
    p = n_pos / n_total
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@numba.njit(cache=True)
def _best_split_kernel(vals: np.ndarray, labels: np.ndarray, min_leaf: int):
    """Best threshold of one pre-sorted feature column.

    Returns (gain in bits, threshold); gain is -1 when no valid split
    exists. Candidate cuts fall between consecutive distinct values and
    must leave at least min_leaf rows on each side.
    """
    n = vals.shape[0]
    total_pos = 0
    for i in range(n):
        total_pos += labels[i]
    if total_pos == 0 or total_pos == n:
        return -1.0, 0.0
    p = total_pos / n
    parent = -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))
    best_gain = -1.0
    best_thr = 0.0
    pos_left = 0
    for i in range(n - 1):
        pos_left += labels[i]
        nl = i + 1
        nr = n - nl
        if nl < min_leaf:
            continue
        if nr < min_leaf:
            break
        if vals[i] == vals[i + 1]:
            continue
        pl = pos_left / nl
        pr = (total_pos - pos_left) / nr
        hl = 0.0
        if 0.0 < pl < 1.0:
            hl = -(pl * np.log2(pl) + (1.0 - pl) * np.log2(1.0 - pl))
        hr = 0.0
        if 0.0 < pr < 1.0:
            hr = -(pr * np.log2(pr) + (1.0 - pr) * np.log2(1.0 - pr))
        gain = parent - (nl * hl + nr * hr) / n
        if gain > best_gain:
            best_gain = gain
            best_thr = 0.5 * (vals[i] + vals[i + 1])
    return best_gain, best_thr


def fit_tree_arrays(
    X: np.ndarray,
    y: np.ndarray,
    feature_subset_size: int,
    min_leaf: int,
    stop_entropy: float,
    rng: np.random.Generator,
    max_depth: int = 64,
) -> Node:
    """Grow a tree on (rows x features, bool labels); leaves carry exact counts."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    labels = np.ascontiguousarray(y, dtype=np.int64)
    n_features = X.shape[1]
    k = min(feature_subset_size, n_features)

    root_holder = Split(-1, 0.0)
    stack: list[tuple[np.ndarray, Split, str, int]] = [
        (np.arange(X.shape[0]), root_holder, "low", 0)
    ]
    while stack:
        rows, parent, slot, depth = stack.pop()
        n_total = rows.size
        n_pos = int(labels[rows].sum())
        leaf = Leaf(n_pos, n_total - n_pos)
        if (
            n_total < 2 * min_leaf
            or depth >= max_depth
            or binary_entropy(n_pos, n_total) < stop_entropy
        ):
            setattr(parent, slot, leaf)
            continue
        feats = rng.choice(n_features, size=k, replace=False)
        best_gain, best_thr, best_feat = -1.0, 0.0, -1
        ylocal = labels[rows]
        for f in feats:
            col = X[rows, f]
            order = np.argsort(col, kind="stable")
            gain, thr = _best_split_kernel(col[order], ylocal[order], min_leaf)
            if gain > best_gain:
                best_gain, best_thr, best_feat = gain, thr, int(f)
        if best_gain <= GAIN_EPS:
            setattr(parent, slot, leaf)
            continue
        node = Split(best_feat, float(best_thr))
        setattr(parent, slot, node)
        mask = X[rows, best_feat] <= best_thr
        stack.append((rows[mask], node, "low", depth + 1))
        stack.append((rows[~mask], node, "high", depth + 1))
    return root_holder.low


def subtree_counts(node: Node) -> tuple[int, int]:
    """Total (positive, negative) training counts under a node."""
    p = n = 0
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Leaf):
            p += cur.p
            n += cur.n
        else:
            stack.append(cur.low)
            stack.append(cur.high)
    return p, n


def leaves_of(node: Node) -> list[Leaf]:
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Leaf):
            out.append(cur)
        else:
            stack.append(cur.high)
            stack.append(cur.low)
    return out


def predict_rows(node: Node, X: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Majority-class prediction per row (ties predict negative)."""
    out = np.zeros(rows.size, dtype=bool)
    stack = [(node, np.arange(rows.size))]
    while stack:
        cur, idx = stack.pop()
        if idx.size == 0:
            continue
        if isinstance(cur, Leaf):
            out[idx] = cur.p > cur.n
        else:
            vals = X[rows[idx], cur.feature]
            mask = vals <= cur.threshold
            stack.append((cur.low, idx[mask]))
            stack.append((cur.high, idx[~mask]))
    return out


def prune_oob(
    node: Node, X: np.ndarray, y: np.ndarray, rows: np.ndarray
) -> tuple[Node, int]:
    """Bottom-up reduced-error pruning against the out-of-bag rows.

    A subtree is replaced by its merged leaf whenever doing so does not
    increase the number of misclassified out-of-bag rows routed through
    it (ties collapse, favoring smaller trees). Children are resolved
    before parents, so each pass is optimal for the given OOB set.
    Returns (pruned node, OOB errors under it).
    """
    if isinstance(node, Leaf):
        pred = node.p > node.n
        errors = int(np.sum(y[rows] != pred)) if rows.size else 0
        return node, errors
    vals = X[rows, node.feature] if rows.size else np.empty(0)
    mask = vals <= node.threshold
    low, err_low = prune_oob(node.low, X, y, rows[mask])
    high, err_high = prune_oob(node.high, X, y, rows[~mask])
    node.low, node.high = low, high
    subtree_err = err_low + err_high
    p, n = subtree_counts(node)
    merged_pred = p > n
    merged_err = int(np.sum(y[rows] != merged_pred)) if rows.size else 0
    if merged_err <= subtree_err:
        return Leaf(p, n), merged_err
    return node, subtree_err


def reachable_sums(
    node: Node, known: dict[int, float]
) -> tuple[int, int, int, int]:
    """(sum p, sum n, reachable leaves, total leaves) given known features.

    A leaf stays reachable unless a decision on a known feature
    contradicts the known value; unknown features keep both branches
    open. At least one leaf is always reachable.
    """
    sum_p = sum_n = n_reach = n_total = 0
    stack: list[tuple[Node, bool]] = [(node, True)]
    while stack:
        cur, reach = stack.pop()
        if isinstance(cur, Leaf):
            n_total += 1
            if reach:
                n_reach += 1
                sum_p += cur.p
                sum_n += cur.n
            continue
        value = known.get(cur.feature)
        if value is None:
            stack.append((cur.low, reach))
            stack.append((cur.high, reach))
        else:
            goes_low = value <= cur.threshold
            stack.append((cur.low, reach and goes_low))
            stack.append((cur.high, reach and not goes_low))
    return sum_p, sum_n, n_reach, n_total


def node_to_json(node: Node, feature_labels: list[str]) -> dict:
    if isinstance(node, Leaf):
        return {"p": node.p, "n": node.n}
    return {
        "feature": feature_labels[node.feature],
        "threshold": node.threshold,
        "low": node_to_json(node.low, feature_labels),
        "high": node_to_json(node.high, feature_labels),
    }


def node_from_json(doc: dict, feature_index: dict[str, int]) -> Node:
    if "p" in doc:
        return Leaf(int(doc["p"]), int(doc["n"]))
    return Split(
        feature_index[doc["feature"]],
        float(doc["threshold"]),
        node_from_json(doc["low"], feature_index),
        node_from_json(doc["high"], feature_index),
    )

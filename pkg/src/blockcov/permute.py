"""Variable clustering and permutation recovery.

When the block structure of the correlation matrix is latent (columns
arrive in scrambled order), a complete-linkage clustering of the
variables yields a leaf ordering that makes the blocks contiguous again.
The same tree also provides flat clusterings for the block-constant
baseline estimators.
"""

from dataclasses import dataclass

import numpy as np

DISSIMILARITY_KINDS = ("one_minus_corr", "one_minus_abs_corr", "euclidean_columns")


@dataclass
class Dendrogram:
    """Binary merge tree over ``n_leaves`` items.

    ``merges[k] = (left, right, height)``; node ids below ``n_leaves`` are
    leaves and node ``n_leaves + k`` is the cluster created by merge k.
    Complete linkage makes the heights non-decreasing.
    """

    n_leaves: int
    merges: list


def dissimilarity(values, kind="one_minus_abs_corr"):
    """Pairwise variable dissimilarities.

    ``values`` is a correlation matrix for the correlation-based kinds and
    the n x q observation matrix for ``euclidean_columns``. The default
    1 - |r| treats strong negative correlation as closeness, which matters
    when blocks interact with negative loadings.
    """
    values = np.asarray(values, dtype=float)
    if kind == "one_minus_corr":
        d = 1.0 - values
    elif kind == "one_minus_abs_corr":
        d = 1.0 - np.abs(values)
    elif kind == "euclidean_columns":
        sq = (values ** 2).sum(axis=0)
        d = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * values.T @ values, 0.0))
    else:
        raise ValueError(f"unknown dissimilarity kind {kind!r}; expected one of {DISSIMILARITY_KINDS}")
    d = (d + d.T) / 2
    d = np.maximum(d, 0.0)
    np.fill_diagonal(d, 0.0)
    return d


def hclust_complete(d):
    """Agglomerative clustering with complete (maximum pairwise) linkage.

    When several pairs are at the minimal distance, the pair with the
    lexicographically smallest node ids merges first, so the tree is
    identical across platforms.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"dissimilarity matrix must be square, got shape {d.shape}")
    if not np.isfinite(d).all():
        raise ValueError("dissimilarity matrix contains non-finite entries")
    q = d.shape[0]
    D = d.astype(float).copy()
    np.fill_diagonal(D, np.inf)
    ids = np.arange(q)  # node id held by each matrix slot
    merges = []
    for step in range(q - 1):
        height = D.min()
        best = None
        best_slots = None
        for i, j in np.argwhere(D == height):
            if i >= j:
                continue
            pair = (ids[i], ids[j]) if ids[i] < ids[j] else (ids[j], ids[i])
            if best is None or pair < best:
                best = pair
                best_slots = (int(i), int(j))
        si, sj = best_slots
        merges.append((*_order_children(int(ids[si]), int(ids[sj]), q), float(height)))
        # complete linkage: distance to the union is the max of the two
        row = np.maximum(D[si], D[sj])
        D[si, :] = row
        D[:, si] = row
        D[si, si] = np.inf
        D[sj, :] = np.inf
        D[:, sj] = np.inf
        ids[si] = q + step
    return Dendrogram(n_leaves=q, merges=merges)


def _order_children(a, b, n_leaves):
    # Earlier-formed clusters sit on the left; leaves (never merged) come
    # after clusters and are ordered by index among themselves.
    ka = (a < n_leaves, a)
    kb = (b < n_leaves, b)
    return (a, b) if ka < kb else (b, a)


def leaf_order(tree):
    """Depth-first left-to-right leaf enumeration of the dendrogram.

    Plotting the tree in this order has no crossing branches, so
    reordering variables by it makes latent blocks contiguous.
    """
    q = tree.n_leaves
    if not tree.merges:
        return np.arange(q)
    order = []
    stack = [q + len(tree.merges) - 1]
    while stack:
        node = stack.pop()
        if node < q:
            order.append(node)
        else:
            left, right, _ = tree.merges[node - q]
            stack.append(right)
            stack.append(left)
    return np.array(order)


def cut_tree(tree, k):
    """Flat clustering with ``k`` clusters.

    Drops the k-1 highest merges (the last ones, heights being monotone)
    and labels the connected components 0..k-1 in leaf order of first
    appearance.
    """
    q = tree.n_leaves
    if not 1 <= k <= q:
        raise ValueError(f"k must be in [1, {q}], got {k}")
    parent = list(range(q + len(tree.merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, (a, b, _) in enumerate(tree.merges[: len(tree.merges) - (k - 1)]):
        node = q + step
        parent[find(a)] = node
        parent[find(b)] = node
    labels = np.empty(q, dtype=int)
    seen = {}
    for leaf in leaf_order(tree):
        root = find(int(leaf))
        if root not in seen:
            seen[root] = len(seen)
        labels[leaf] = seen[root]
    return labels


def permute_matrix(M, order, inverse=False):
    """Simultaneous row/column reordering: out[i, j] = M[p[i], p[j]].

    With ``inverse`` the inverse permutation is applied instead, undoing a
    previous call with the same ``order``.
    """
    M = np.asarray(M)
    p = np.asarray(order, dtype=int)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != p.size:
        raise ValueError(f"matrix of shape {M.shape} does not match permutation of {p.size}")
    if not np.array_equal(np.sort(p), np.arange(p.size)):
        raise ValueError("order is not a permutation")
    if inverse:
        p = np.argsort(p)
    return M[np.ix_(p, p)]

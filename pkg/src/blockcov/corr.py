"""Sample correlation and the structural transforms around it.

The estimation pipeline works on the (q-1) x (q-1) symmetric arrangement
of the off-diagonal correlations rather than on the q x q matrix itself,
because that arrangement inherits low rank from a low-rank-plus-diagonal
covariance. This module provides the correlation computation, the
rearrangement and its half-vectorization, and the inverse assembly step.
"""

import numpy as np


def validate_observations(X):
    """Check an observation matrix and return it as a float array.

    Rows are samples and columns are variables. Requirements: at least two
    rows, at least two columns, all entries finite, and no column with zero
    sample variance (its correlations would be undefined).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"observations must be a 2-d array, got shape {X.shape}")
    n, q = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if q < 2:
        raise ValueError(f"need at least 2 variables, got {q}")
    if not np.isfinite(X).all():
        raise ValueError("observations contain non-finite entries")
    variances = X.var(axis=0, ddof=1)
    dead = np.flatnonzero(variances == 0.0)
    if dead.size:
        raise ValueError(f"column {dead[0]} has zero sample variance")
    return X


def sample_correlation(X):
    """Pearson correlation matrix of the columns of ``X``.

    The covariance underneath uses the unbiased n-1 denominator (some
    ecosystems default to n). The result is symmetrized, clipped to
    [-1, 1], and its diagonal is set to exactly 1 so that 1 +/- ulp noise
    never reaches the thresholding step.
    """
    X = validate_observations(X)
    n = X.shape[0]
    centered = X - X.mean(axis=0)
    S = centered.T @ centered / (n - 1)
    sd = np.sqrt(np.diag(S))
    R = S / np.outer(sd, sd)
    R = (R + R.T) / 2
    R = np.clip(R, -1.0, 1.0)
    np.fill_diagonal(R, 1.0)
    return R


def build_gamma(R):
    """Symmetric (q-1) x (q-1) arrangement of the off-diagonal entries of ``R``.

    Entry (i, j) with i <= j holds R[i, j+1]; the lower triangle follows by
    symmetry. Every strictly-upper entry of R appears exactly once in the
    upper-including-diagonal triangle of the result.
    """
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {R.shape}")
    if R.shape[0] < 2:
        raise ValueError("need at least 2 variables")
    G = np.triu(R[:-1, 1:])
    return G + np.triu(G, 1).T


def vech_indices(m):
    """Index pair (rows, cols) addressing the entries of ``vech``.

    ``vech(A)[k] == A[rows[k], cols[k]]``; the order is column-major over
    the lower-including-diagonal triangle.
    """
    iu, ju = np.triu_indices(m)
    return ju, iu


def vech(A):
    """Half-vectorization of a square matrix.

    Stacks each column after striking out its first i-1 entries, i.e. the
    lower-including-diagonal triangle column by column; the result has
    length m(m+1)/2.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"vech needs a square matrix, got shape {A.shape}")
    rows, cols = vech_indices(A.shape[0])
    return A[rows, cols]


def assemble_sigma(v, q):
    """Rebuild a unit-diagonal symmetric q x q matrix from off-diagonal values.

    ``v`` must be the half-vectorization of the off-diagonal arrangement
    (length q(q-1)/2); the upper triangle is filled so that
    ``vech(build_gamma(result)) == v`` and the lower triangle follows by
    symmetry. Exact inverse of ``vech(build_gamma(.))``.
    """
    v = np.asarray(v, dtype=float)
    expected = q * (q - 1) // 2
    if v.ndim != 1 or v.size != expected:
        raise ValueError(f"expected q(q-1)/2 = {expected} values for q={q}, got {v.size}")
    iu, ju = np.triu_indices(q - 1)
    S = np.eye(q)
    S[iu, ju + 1] = v
    S[ju + 1, iu] = v
    return S

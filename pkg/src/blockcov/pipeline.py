"""End-to-end correlation estimation.

Steps: optionally reorder the variables by a clustering leaf order so
latent blocks become contiguous, approximate the off-diagonal arrangement
at low rank, hard-threshold it at a data-driven sparsity level, repair
positive definiteness, take the thresholded inverse square root, and map
everything back to the original variable order.

Two stock configurations mirror the selector pairings that matter in
practice: cattell+elbow (fast, default) and pa+bl.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .corr import build_gamma, sample_correlation, validate_observations, vech
from .lowrank import RankSelection, scree, select_rank_cattell, select_rank_pa, truncate_rank
from .permute import dissimilarity, hclust_complete, leaf_order, permute_matrix
from .psd import InvSqrtResult, PsdConfig, inv_sqrt, nearest_correlation
from .sparsify import (LambdaSelection, candidate_lambdas, hard_threshold,
                       select_lambda_bl, select_lambda_elbow, sparse_sigma)


@dataclass
class PipelineConfig:
    """Estimation policy: selectors, reordering, numerical controls."""

    rank_method: str | int = "cattell"     # "cattell", "pa", or a fixed rank
    lambda_method: str | float = "elbow"   # "elbow", "bl", or a fixed threshold
    reorder: bool = False
    dissimilarity_kind: str = "one_minus_abs_corr"
    psd: PsdConfig = field(default_factory=PsdConfig)
    inv_sqrt_threshold: float = 0.1
    compute_inv_sqrt: bool = True
    seed: int = 0
    r_max: int | None = None             # cattell scan limit; default min(n-1, q-2, 50)
    pa_permutations: int = 50
    pa_quantile: float = 0.95
    lambda_max_grid: int = 100
    bl_splits: int = 50


@dataclass
class SelectionTrace:
    """Curves recorded during parameter selection, for diagnostics export."""

    scree: np.ndarray
    rank: dict
    lam: dict


@dataclass
class CorrelationEstimate:
    """Final estimate and everything produced on the way.

    ``sigma_hat`` is the positive-definite estimate, ``sigma_tilde`` the
    sparse pre-projection matrix whose exact zeros define ``support``
    (strictly off-diagonal, symmetric). All matrices are in the original
    variable order; ``permutation`` records the reordering used
    internally (identity when reordering is off).
    """

    sigma_hat: np.ndarray
    sigma_tilde: np.ndarray
    support: np.ndarray
    rank: RankSelection
    lam: LambdaSelection
    permutation: np.ndarray
    trace: SelectionTrace
    inv_sqrt: InvSqrtResult | None = None
    timings: dict = field(default_factory=dict)


class PipelineError(RuntimeError):
    """A pipeline step failed; ``step`` names it."""

    def __init__(self, step, cause):
        super().__init__(f"pipeline step '{step}' failed: {cause}")
        self.step = step


@contextmanager
def _step(name, timings):
    start = time.perf_counter()
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def estimate(X, cfg=None):
    """Run the full estimation pipeline on an n x q observation matrix."""
    cfg = PipelineConfig() if cfg is None else cfg
    X = validate_observations(X)
    n, q = X.shape
    timings = {}

    perm = np.arange(q)
    with _step("reorder", timings):
        if cfg.reorder:
            if cfg.dissimilarity_kind == "euclidean_columns":
                d = dissimilarity(X, cfg.dissimilarity_kind)
            else:
                d = dissimilarity(sample_correlation(X), cfg.dissimilarity_kind)
            perm = leaf_order(hclust_complete(d))
            X = X[:, perm]

    with _step("correlation", timings):
        R = sample_correlation(X)
        G = build_gamma(R)
        s = scree(G)

    with _step("rank-selection", timings):
        if isinstance(cfg.rank_method, (int, np.integer)):
            r = int(cfg.rank_method)
            if not 1 <= r <= q - 1:
                raise ValueError(f"fixed rank must be in [1, {q - 1}], got {r}")
            rank = RankSelection(r=r, method="fixed")
        elif cfg.rank_method == "cattell":
            r_max = cfg.r_max if cfg.r_max is not None else max(2, min(n - 1, q - 2, 50))
            rank = select_rank_cattell(s, r_max=r_max)
        elif cfg.rank_method == "pa":
            rank = select_rank_pa(X, n_perm=cfg.pa_permutations,
                                  quantile=cfg.pa_quantile, seed=cfg.seed)
        else:
            raise ValueError(f"unknown rank method {cfg.rank_method!r}")
        G_r = truncate_rank(G, rank.r)

    with _step("lambda-selection", timings):
        if isinstance(cfg.lambda_method, str):
            grid = candidate_lambdas(vech(G_r), cfg.lambda_max_grid)
            if cfg.lambda_method == "elbow":
                lam = select_lambda_elbow(R, G_r, grid)
            elif cfg.lambda_method == "bl":
                lam = select_lambda_bl(X, rank.r, grid, n_splits=cfg.bl_splits, seed=cfg.seed)
            else:
                raise ValueError(f"unknown lambda method {cfg.lambda_method!r}")
        else:
            value = float(cfg.lambda_method)
            if value < 0:
                raise ValueError(f"fixed lambda must be non-negative, got {value}")
            size = int(np.count_nonzero(hard_threshold(vech(G_r), value)))
            lam = LambdaSelection(lam=value, method="fixed", support_size=size)
        S_tilde = sparse_sigma(G_r, lam.lam, q)

    with _step("psd-projection", timings):
        S_hat = nearest_correlation(S_tilde, cfg.psd)

    W = None
    with _step("inverse-square-root", timings):
        if cfg.compute_inv_sqrt:
            W = inv_sqrt(S_hat, cfg.inv_sqrt_threshold)

    with _step("back-permutation", timings):
        if cfg.reorder:
            S_hat = permute_matrix(S_hat, perm, inverse=True)
            S_tilde = permute_matrix(S_tilde, perm, inverse=True)
            if W is not None:
                W = InvSqrtResult(matrix=permute_matrix(W.matrix, perm, inverse=True),
                                  kept=W.kept, dropped=W.dropped)
        support = S_tilde != 0.0
        np.fill_diagonal(support, False)

    return CorrelationEstimate(
        sigma_hat=S_hat, sigma_tilde=S_tilde, support=support,
        rank=rank, lam=lam, permutation=perm,
        trace=SelectionTrace(scree=s, rank=rank.trace, lam=lam.trace),
        inv_sqrt=W, timings=timings)


def whiten(X, est):
    """Decorrelate the rows of ``X`` with the estimated inverse square root."""
    if est.inv_sqrt is None:
        raise ValueError("estimate has no inverse square root; rerun with compute_inv_sqrt=True")
    X = np.asarray(X, dtype=float)
    q = est.inv_sqrt.matrix.shape[0]
    if X.ndim != 2 or X.shape[1] != q:
        raise ValueError(f"observations of shape {X.shape} do not match a {q}-variable estimate")
    return X @ est.inv_sqrt.matrix

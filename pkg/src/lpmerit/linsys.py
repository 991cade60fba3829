"""Regularized Newton systems: a structured block solve and a dense reference path.

The system (hessian + mu*I) delta = -gradient has a rank-one-plus-structured
matrix: after eliminating the s block it reduces to a block-diagonal matrix
diag(A'A + D1, A*W*A' + D2) with W = D3 (I + D3)^{-1}, corrected by the
rank-one term v v' with v = (c; -b).  Only n x n and m x m Cholesky
factorizations are required, plus one O((m+n)^2) rank-one factor update.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import merit
from .errors import FactorizationFailure, KindMismatch, NonPositiveRegularization
from .merit import MeritKind, MeritSpec
from .problems import StandardFormLp

RANK_ONE_BACKENDS = ("cholesky-update", "sherman-morrison")


@dataclass
class FactorizationStats:
    """Instrumentation: sizes of Cholesky factorizations and rank-one updates."""

    cholesky_sizes: list = field(default_factory=list)
    rank_one_updates: int = 0


@dataclass(frozen=True)
class ReducedSystem:
    """The eliminated Newton system: positive diagonals, rhs blocks, coupling v."""

    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    rhs_x: np.ndarray
    rhs_lam: np.ndarray
    rhs_s: np.ndarray
    v: np.ndarray


def build_reduced(spec: MeritSpec, lp: StandardFormLp, point, mu: float) -> ReducedSystem:
    """Assemble diagonals and right-hand side of the reduced system at ``point``.

    D1, D2, D3 are the penalty diagonal plus mu (all strictly positive for
    mu > 0); the right-hand side is the negative merit gradient split into
    (x, lam, s) blocks.  Not defined for the HOMOGENEOUS merit, whose extra
    dense rows fall outside this elimination; use solve_dense there.
    """
    if spec.kind is MeritKind.HOMOGENEOUS:
        raise KindMismatch("the reduced system covers only primal-dual merits")
    if not mu > 0.0:
        raise NonPositiveRegularization(f"mu must be positive, got {mu}")
    g = merit.eval_gradient(spec, lp, point)
    diag = merit.penalty_diagonal_at(spec, lp, point.as_vector())
    n, m = lp.n, lp.m
    return ReducedSystem(
        d1=mu + diag[:n],
        d2=mu + diag[n : n + m],
        d3=mu + diag[n + m :],
        rhs_x=-g[:n],
        rhs_lam=-g[n : n + m],
        rhs_s=-g[n + m :],
        v=np.concatenate([lp.c, -lp.b]),
    )


def cholesky_rank_one_update(factor: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Given lower-triangular L with M = L L', return the factor of M + v v'.

    O(k^2) sweep of Givens-like eliminations; M + v v' is SPD whenever M is,
    so the update cannot break down.
    """
    L = np.array(factor, dtype=float)
    w = np.array(v, dtype=float).ravel()
    k = L.shape[0]
    if L.shape != (k, k) or w.shape != (k,):
        raise ValueError(f"factor {L.shape} and vector {w.shape} are inconsistent")
    for j in range(k):
        ljj = L[j, j]
        r = np.hypot(ljj, w[j])
        c = r / ljj
        s = w[j] / ljj
        L[j, j] = r
        if j + 1 < k:
            col = (L[j + 1 :, j] + s * w[j + 1 :]) / c
            w[j + 1 :] = c * w[j + 1 :] - s * col
            L[j + 1 :, j] = col
    return L


def solve_structured(
    system: ReducedSystem,
    lp: StandardFormLp,
    *,
    backend: str = "cholesky-update",
    stats: FactorizationStats | None = None,
):
    """Solve the full regularized Newton system via the eliminated form.

    Returns (dx, dlam, ds).  ``backend`` selects how the rank-one coupling is
    absorbed: a Cholesky factor update of the joint block factor (default) or
    an algebraically equivalent Sherman-Morrison correction.  Raises
    FactorizationFailure when a block is not numerically SPD.
    """
    if backend not in RANK_ONE_BACKENDS:
        raise ValueError(f"backend must be one of {RANK_ONE_BACKENDS}, got {backend!r}")
    A, m, n = lp.A, lp.m, lp.n
    shift = 1.0 + system.d3
    M_x = A.T @ A
    M_x[np.diag_indices(n)] += system.d1
    M_lam = (A * (system.d3 / shift)) @ A.T
    M_lam[np.diag_indices(m)] += system.d2
    try:
        L_x = np.linalg.cholesky(M_x)
        L_lam = np.linalg.cholesky(M_lam)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"block factorization failed: {exc}") from exc
    if stats is not None:
        stats.cholesky_sizes += [n, m]
    rhs = np.concatenate([system.rhs_x, system.rhs_lam - A @ (system.rhs_s / shift)])
    v = system.v
    if backend == "cholesky-update":
        L = np.zeros((n + m, n + m))
        L[:n, :n] = L_x
        L[n:, n:] = L_lam
        L = cholesky_rank_one_update(L, v)
        if stats is not None:
            stats.rank_one_updates += 1
        u = cho_solve((L, True), rhs)
    else:
        def block_solve(r):
            return np.concatenate(
                [cho_solve((L_x, True), r[:n]), cho_solve((L_lam, True), r[n:])]
            )

        u0 = block_solve(rhs)
        y = block_solve(v)
        u = u0 - y * float(v @ u0) / (1.0 + float(v @ y))
    dx, dlam = u[:n], u[n:]
    ds = (system.rhs_s - A.T @ dlam) / shift
    return dx, dlam, ds


def solve_dense(
    spec: MeritSpec, lp: StandardFormLp, point, mu: float, rhs: np.ndarray
) -> np.ndarray:
    """Factor the full (hessian + mu*I) directly and solve against ``rhs``.

    Reference path for tests and the fallback when the structured solve fails;
    one step of iterative refinement keeps the residual near round-off.
    """
    if not mu > 0.0:
        raise NonPositiveRegularization(f"mu must be positive, got {mu}")
    H = merit.hessian_base(spec, lp).copy()
    idx = np.diag_indices_from(H)
    H[idx] += merit.penalty_diagonal_at(spec, lp, point.as_vector()) + mu
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (H.shape[0],):
        raise ValueError(f"rhs must have shape ({H.shape[0]},), got {rhs.shape}")
    try:
        factor = cho_factor(H, lower=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"dense factorization failed: {exc}") from exc
    sol = cho_solve(factor, rhs)
    sol += cho_solve(factor, rhs - H @ sol)
    return sol

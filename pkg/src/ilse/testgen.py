"""Seeded generators for ILSE test problems.

A is built as Q D U with Q signature-orthogonal (Q^T S Q = S), D a
rectangular diagonal whose values decay geometrically from 1 to 1/kappa,
and U random orthogonal, then normalized to unit spectral norm. Because Q
is generally not orthogonal, the achieved condition number of A differs
from the nominal ladder ratio and is measured and returned. B gets
prescribed singular values the same way; b and d are standard Gaussian.

All randomness flows through the counter-based Philox generator keyed by
64-bit seeds; sub-streams are derived with fixed XOR constants, so every
generator is a pure, bitwise-reproducible function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import GenerationError, IlseProblem, PerturbationQuadruple, SignatureMatrix
from .solver import check_well_posedness

_MASK64 = (1 << 64) - 1

# Stream ids for sub-seed derivation (seed XOR stream). Nested derivations
# stack XORs, so instance-level and factor-level ids must stay disjoint.
_STREAM_Q_PLUS = 0x9E3779B97F4A7C15
_STREAM_Q_MINUS = 0xC2B2AE3D27D4EB4F
_STREAM_ROTATIONS = 0x165667B19E3779F9
_STREAM_U = 0xD6E8FEB86659FD93
_STREAM_B_LEFT = 0xA24BAED4963EE407
_STREAM_B_RIGHT = 0x9FB21C651E98DF25
_STREAM_SIGMA = 0x94D049BB133111EB
_STREAM_B_MAT = 0xBF58476D1CE4E5B9
_STREAM_RHS_B = 0x2545F4914F6CDD1D
_STREAM_RHS_D = 0x7FB5D329728EA185
_STREAM_RETRY = 0xD1342543DE82EF95


def subseed(seed: int, stream: int) -> int:
    """Derive a 64-bit sub-seed as seed XOR stream-id."""
    return (int(seed) ^ int(stream)) & _MASK64


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


@dataclass(frozen=True)
class GenParams:
    """Dimensions, conditioning targets and seed for one generated instance.

    hyper_bound caps the modulus of the hyperbolic rotation angles used in
    the signature-orthogonal factor; 0 makes that factor orthogonal.
    """

    m: int
    n: int
    s: int
    p: int
    q: int
    kappa_a: float
    kappa_b: float
    seed: int
    hyper_bound: float = 1.0

    def __post_init__(self):
        if self.p + self.q != self.m:
            raise ValueError(f"p + q must equal m: {self.p} + {self.q} != {self.m}")
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m={self.m}, n={self.n}")
        if self.s > self.n:
            raise ValueError(f"need s <= n, got s={self.s}, n={self.n}")
        if self.kappa_a < 1.0 or self.kappa_b < 1.0:
            raise ValueError("condition targets must be >= 1")
        if self.hyper_bound < 0.0:
            raise ValueError("hyper_bound must be >= 0")


def gen_random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Random n x n orthogonal matrix: n-1 Gaussian Householder reflectors
    applied to the identity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    Q = np.eye(n)
    for k in range(n - 1):
        x = rng.standard_normal(n - k)
        v = x.copy()
        v[0] += math.copysign(np.linalg.norm(x), x[0])  # sign choice avoids cancellation
        vv = float(v @ v)
        if vv == 0.0:
            continue
        Q[k:, :] -= np.outer(v, (2.0 / vv) * (v @ Q[k:, :]))
    return Q


def gen_sigma_orthogonal(p: int, q: int, seed: int, hyper_bound: float = 1.0) -> np.ndarray:
    """Random Q of order p+q with Q^T diag(I_p, -I_q) Q = diag(I_p, -I_q).

    Construction: a block-diagonal pair of random orthogonal factors,
    min(p, q) hyperbolic plane rotations with angles uniform in
    [-hyper_bound, hyper_bound] on random mixed-sign planes, and a second
    block-diagonal orthogonal pair. Each hyperbolic rotation preserves the
    indefinite form through cosh^2 - sinh^2 = 1, and block-diagonal
    orthogonal factors commute with the signature matrix, so the identity
    holds by construction.
    """
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    m = p + q

    def block(seed_p, seed_q):
        M = np.eye(m)
        if p > 0:
            M[:p, :p] = gen_random_orthogonal(p, seed_p)
        if q > 0:
            M[p:, p:] = gen_random_orthogonal(q, seed_q)
        return M

    Q = block(subseed(seed, _STREAM_Q_PLUS), subseed(seed, _STREAM_Q_MINUS))
    k = min(p, q)
    if k > 0:
        rng = _rng(subseed(seed, _STREAM_ROTATIONS))
        for _ in range(k):
            i = int(rng.integers(0, p))
            j = p + int(rng.integers(0, q))
            t = float(rng.uniform(-hyper_bound, hyper_bound))
            c, s = np.cosh(t), np.sinh(t)
            col_i = Q[:, i].copy()
            col_j = Q[:, j].copy()
            Q[:, i] = c * col_i + s * col_j
            Q[:, j] = s * col_i + c * col_j
    right = block(subseed(seed, _STREAM_Q_PLUS ^ _STREAM_U), subseed(seed, _STREAM_Q_MINUS ^ _STREAM_U))
    return Q @ right


def gen_geometric_diagonal(rows: int, cols: int, kappa: float) -> np.ndarray:
    """rows x cols matrix whose diagonal decreases geometrically from 1 to 1/kappa."""
    if kappa < 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if rows < cols or cols < 1:
        raise ValueError(f"need rows >= cols >= 1, got {rows} x {cols}")
    if cols == 1:
        ladder = np.ones(1)
    else:
        ladder = kappa ** (-np.arange(cols) / (cols - 1))
    D = np.zeros((rows, cols))
    np.fill_diagonal(D, ladder)
    return D


def gen_conditioned_matrix(s: int, n: int, kappa: float, seed: int) -> np.ndarray:
    """s x n matrix with unit spectral norm and singular values decaying
    geometrically to 1/kappa (condition number exactly kappa)."""
    if s > n:
        raise ValueError(f"need s <= n, got s={s}, n={n}")
    U = gen_random_orthogonal(s, subseed(seed, _STREAM_B_LEFT))
    V = gen_random_orthogonal(n, subseed(seed, _STREAM_B_RIGHT))
    D = gen_geometric_diagonal(n, s, kappa).T
    return U @ D @ V.T


def gen_ilse_instance(params: GenParams) -> tuple[IlseProblem, float]:
    """Generate a well-posed instance; returns it with the achieved
    condition number of A.

    Ill-posed draws (possible at extreme conditioning) are regenerated
    from a derived sub-seed, up to 10 attempts.
    """
    for attempt in range(10):
        seed = params.seed if attempt == 0 else subseed(params.seed, _STREAM_RETRY * attempt)
        Q = gen_sigma_orthogonal(params.p, params.q, subseed(seed, _STREAM_SIGMA), params.hyper_bound)
        D = gen_geometric_diagonal(params.m, params.n, params.kappa_a)
        U = gen_random_orthogonal(params.n, subseed(seed, _STREAM_U))
        A = Q @ D @ U
        sv = sla.svdvals(A)
        A = A / sv[0]
        B = gen_conditioned_matrix(params.s, params.n, params.kappa_b, subseed(seed, _STREAM_B_MAT))
        b = _rng(subseed(seed, _STREAM_RHS_B)).standard_normal(params.m)
        d = _rng(subseed(seed, _STREAM_RHS_D)).standard_normal(params.s)
        problem = IlseProblem(A, b, B, d, SignatureMatrix(params.p, params.q))
        if check_well_posedness(problem).well_posed:
            achieved = float(sv[0] / sv[-1])
            return problem, achieved
    raise GenerationError(
        f"no well-posed instance after 10 attempts (seed={params.seed}, "
        f"kappa_a={params.kappa_a:g}, kappa_b={params.kappa_b:g})"
    )


def gen_perturbation(problem: IlseProblem, eps: float, seed: int) -> PerturbationQuadruple:
    """Gaussian perturbation quadruple at magnitude eps.

    E and F are eps times standard Gaussian matrices; the right-hand-side
    perturbations are additionally scaled by |b|_2 and |d|_2.
    """
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    rng = _rng(seed)
    m, n, s = problem.m, problem.n, problem.s
    E = eps * rng.standard_normal((m, n))
    f = eps * float(np.linalg.norm(problem.b)) * rng.standard_normal(m)
    F = eps * rng.standard_normal((s, n))
    g = eps * float(np.linalg.norm(problem.d)) * rng.standard_normal(s)
    return PerturbationQuadruple(E=E, f=f, F=F, g=g)

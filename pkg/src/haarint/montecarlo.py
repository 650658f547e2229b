"""Monte Carlo and exact O(2) oracles for Haar integrals.

Haar samples come from a batched Householder QR of Gaussian matrices with
the sign of each column fixed by diag(R); without that fix the Q factor is
not Haar distributed.

Seeding: the sample stream is cut into blocks of :data:`BLOCK_SIZE` draws.
Block ``k`` of a run with master seed ``s`` uses a PCG64 generator seeded
with ``splitmix64((s + k * 0x9E3779B97F4A7C15) mod 2**64)``.  Blocks are
reduced in index order with Chan's pairwise update, so the estimate is
bit-identical whatever the number of concurrent chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .diagram import Monomial, canonicalize, parse_monomial, required_dimension
from .exact import DimensionTooSmall, double_factorial

BLOCK_SIZE = 8192
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def block_seed(seed: int, index: int) -> int:
    return splitmix64((seed + index * _GOLDEN) & _MASK64)


def householder_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR of a stack of square matrices, shape (..., n, n)."""
    r = np.array(a, dtype=float, copy=True)
    n = r.shape[-1]
    q = np.broadcast_to(np.eye(n), r.shape).copy()
    for k in range(n - 1):
        x = r[..., k:, k]
        norm = np.linalg.norm(x, axis=-1)
        sign = np.where(x[..., 0] >= 0, 1.0, -1.0)
        v = x.copy()
        v[..., 0] += sign * norm
        vnorm = np.linalg.norm(v, axis=-1, keepdims=True)
        # x == 0 has probability zero; leave such columns untouched
        v = np.divide(v, vnorm, out=np.zeros_like(v), where=vnorm > 0)
        r[..., k:, :] -= 2.0 * v[..., :, None] * np.einsum("...i,...ij->...j", v, r[..., k:, :])[..., None, :]
        q[..., :, k:] -= 2.0 * np.einsum("...ij,...j->...i", q[..., :, k:], v)[..., :, None] * v[..., None, :]
    return q, r


def sample_haar_batch(N: int, size: int, rng: np.random.Generator, check: bool = False) -> np.ndarray:
    """``size`` independent Haar-distributed N x N orthogonal matrices."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    g = rng.standard_normal((size, N, N))
    q, r = householder_qr(g)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q *= np.where(diag < 0, -1.0, 1.0)[:, None, :]
    if check:
        resid = orthogonality_residual(q)
        bound = 1e-12
        if resid.max() > bound:
            raise AssertionError(f"sampled matrix not orthogonal: residual {resid.max():.3g}")
    return q


def sample_haar(N: int, rng: np.random.Generator, check: bool = False) -> np.ndarray:
    return sample_haar_batch(N, 1, rng, check=check)[0]


def orthogonality_residual(q: np.ndarray) -> np.ndarray:
    """max |Q^T Q - I| per matrix."""
    n = q.shape[-1]
    gram = np.einsum("...ki,...kj->...ij", q, q)
    return np.abs(gram - np.eye(n)).max(axis=(-2, -1))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def sigma_distance(self, exact) -> float:
        diff = abs(self.mean - float(exact))
        if self.std_error == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.std_error


def _compact(m: Monomial) -> Monomial:
    """Relabel indices onto 1..t and 1..s, keeping their order."""
    rows = {r: k + 1 for k, r in enumerate(sorted({f.row for f in m.factors}))}
    cols = {c: k + 1 for k, c in enumerate(sorted({f.col for f in m.factors}))}
    return m.relabel(rows, cols)


def _monomial_values(q: np.ndarray, m: Monomial) -> np.ndarray:
    out = np.ones(q.shape[0])
    for f in m.factors:
        out *= q[:, f.row - 1, f.col - 1] ** f.power
    return out


def _block_stats(args):
    monomials, N, seed, index, size, left, right = args
    rng = np.random.Generator(np.random.PCG64(block_seed(seed, index)))
    q = sample_haar_batch(N, size, rng)
    if left is not None:
        q = left @ q
    if right is not None:
        q = q @ right
    stats = []
    for m in monomials:
        vals = _monomial_values(q, m)
        mean = vals.mean()
        stats.append((size, mean, float(((vals - mean) ** 2).sum())))
    return stats


def _merge(a, b):
    n_a, mean_a, m2_a = a
    n_b, mean_b, m2_b = b
    n = n_a + n_b
    delta = mean_b - mean_a
    return n, mean_a + delta * n_b / n, m2_a + m2_b + delta * delta * n_a * n_b / n


def mc_estimate_many(
    monomials: Sequence[Monomial | str],
    N: int,
    samples: int,
    seed: int,
    chunks: int = 1,
    left: np.ndarray | None = None,
    right: np.ndarray | None = None,
) -> list[MCEstimate]:
    """Estimate several monomials on one shared stream of Haar samples.

    ``left`` / ``right`` optionally multiply every sample by a fixed matrix,
    which is how Haar invariance is tested.  ``chunks`` is the number of
    concurrent workers; it does not change the result.
    """
    monomials = [_compact(parse_monomial(m) if isinstance(m, str) else m) for m in monomials]
    if samples < 2:
        raise ValueError("need at least 2 samples")
    for m in monomials:
        need = required_dimension(canonicalize(m))
        if need > N:
            raise DimensionTooSmall(f"{m} needs N >= {need}, got N={N}")
    seed &= _MASK64
    n_blocks = -(-samples // BLOCK_SIZE)
    jobs = [
        (monomials, N, seed, k, min(BLOCK_SIZE, samples - k * BLOCK_SIZE), left, right)
        for k in range(n_blocks)
    ]
    if chunks > 1:
        with ThreadPoolExecutor(max_workers=chunks) as pool:
            blocks = list(pool.map(_block_stats, jobs))
    else:
        blocks = [_block_stats(job) for job in jobs]

    estimates = []
    for i in range(len(monomials)):
        acc = blocks[0][i]
        for b in blocks[1:]:
            acc = _merge(acc, b[i])
        n, mean, m2 = acc
        std_error = math.sqrt(m2 / (n - 1)) / math.sqrt(n)
        estimates.append(MCEstimate(float(mean), std_error, samples, seed))
    return estimates


def mc_estimate(m: Monomial | str, N: int, samples: int, seed: int, chunks: int = 1) -> MCEstimate:
    return mc_estimate_many([m], N, samples, seed, chunks)[0]


def _wallis(a: int, b: int) -> Fraction:
    """Average of cos^a sin^b over a full period."""
    if a % 2 or b % 2:
        return Fraction(0)
    return Fraction(double_factorial(a - 1) * double_factorial(b - 1), double_factorial(a + b))


# (sign, is_sin) of each entry; rotation [[c,-s],[s,c]], reflection [[c,s],[s,-c]]
_O2_ROTATION = {(1, 1): (1, False), (1, 2): (-1, True), (2, 1): (1, True), (2, 2): (1, False)}
_O2_REFLECTION = {(1, 1): (1, False), (1, 2): (1, True), (2, 1): (1, True), (2, 2): (-1, False)}


def o2_exact(m: Monomial | str) -> Fraction:
    """Exact Haar integral over O(2): half rotations, half reflections."""
    if isinstance(m, str):
        m = parse_monomial(m)
    for f in m.factors:
        if f.row > 2 or f.col > 2:
            raise ValueError(f"O(2) has no entry ({f.row},{f.col})")
    total = Fraction(0)
    for component in (_O2_ROTATION, _O2_REFLECTION):
        sign, cos_pow, sin_pow = 1, 0, 0
        for f in m.factors:
            s, is_sin = component[f.row, f.col]
            sign *= s**f.power
            if is_sin:
                sin_pow += f.power
            else:
                cos_pow += f.power
        total += sign * _wallis(cos_pow, sin_pow)
    return total / 2

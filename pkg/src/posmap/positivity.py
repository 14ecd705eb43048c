"""Positivity hierarchy tests.

Complete positivity is decided exactly through PSD-ness of the Choi
blocks. k-positivity of a self-adjoint map is equivalent to
<x| C |x> >= 0 for all unit vectors x of Schmidt rank <= k, which is
falsified here by an alternating eigenvector descent over the rank-k
factors. A negative certificate (Witness) is always re-verified from
scratch; absence of a witness is reported as UNFALSIFIED, not as a proof.

The trace-mixing family psi_lambda(a) = lambda tr_n(a) 1 + (1 - lambda) a
on M_n is k-positive iff lambda <= 1 + 1/(nk - 1) (Tomiyama's threshold),
which serves as the exact oracle for the falsifier's test suite.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import Element, FiniteCStar
from .errors import BadRangeError, DimensionMismatchError
from .linalg import hermitian_part, op_norm, psd_min_eig
from .maps import PMap

CERTIFIED_POSITIVE = "CERTIFIED_POSITIVE"
UNFALSIFIED = "UNFALSIFIED"
VIOLATED = "VIOLATED"

DEFAULT_RESTARTS = 32
DEFAULT_TOL = 1e-8
_MAX_ITERS = 500
_FTOL = 1e-12


def thread_cap() -> int:
    """Parallelism cap from POSMAP_THREADS; defaults to the available cores."""
    raw = os.environ.get("POSMAP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = os.cpu_count() or 1
    return n


def is_cp(phi: PMap, tol: float = DEFAULT_TOL) -> bool:
    """Choi criterion: completely positive iff every Choi block is PSD."""
    for c in phi.choi_blocks:
        scale = max(1.0, op_norm(c))
        if op_norm(c - c.conj().T) > 1e-9 * scale:
            return False
        if psd_min_eig(hermitian_part(c)) < -tol * scale:
            return False
    return True


def tomiyama_threshold(n: int, k: int) -> float:
    """Largest lambda for which the trace-mixing map on M_n is k-positive."""
    if not (1 <= k <= n) or n * k < 2:
        raise BadRangeError(f"need 1 <= k <= n and nk >= 2, got n={n}, k={k}")
    return float(Fraction(1) + Fraction(1, n * k - 1))


def tomiyama_map(n: int, lam: float) -> PMap:
    """The unital self-adjoint map a -> lambda tr_n(a) 1 + (1 - lambda) a on M_n."""
    if n < 2:
        raise BadRangeError(f"need n >= 2, got {n}")
    if lam < 0:
        raise BadRangeError(f"need lambda >= 0, got {lam}")
    alg = FiniteCStar((n,))
    images = []
    for i in range(n):
        for j in range(n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = 1.0 - lam
            if i == j:
                m += (lam / n) * np.eye(n)
            images.append(Element(alg, [m]))
    return PMap.from_action(alg, alg, images)


@dataclass(frozen=True)
class Witness:
    """A Schmidt-rank-bounded unit vector with negative Choi expectation.

    x = sum_r factors_left[r] (x) factors_right[r] refutes k-positivity of
    the map restricted to source block `block`.
    """

    k: int
    factors_left: tuple[np.ndarray, ...]
    factors_right: tuple[np.ndarray, ...]
    value: float
    vector_norm: float
    block: int = 0

    def assemble(self) -> np.ndarray:
        n = self.factors_left[0].shape[0]
        d = self.factors_right[0].shape[0]
        x = np.zeros(n * d, dtype=np.complex128)
        for a, b in zip(self.factors_left, self.factors_right):
            x += np.kron(a, b)
        return x


@dataclass(frozen=True)
class KposVerdict:
    status: str
    witness: Optional[Witness]
    restarts_used: int
    best_value: float


def _quadratic_value(c: np.ndarray, x: np.ndarray) -> float:
    return float(np.real(x.conj() @ (c @ x)))


def witness_verify(phi: PMap, w: Witness, tol: float = DEFAULT_TOL) -> bool:
    """Recompute the witness value from scratch and check every invariant."""
    if w.block < 0 or w.block >= phi.source.n_blocks:
        raise DimensionMismatchError(f"witness block {w.block} out of range")
    n = phi.source.block_sizes[w.block]
    d = phi.target.embed_dim
    if len(w.factors_left) != len(w.factors_right):
        return False
    if len(w.factors_left) > w.k or len(w.factors_left) == 0:
        return False
    for a, b in zip(w.factors_left, w.factors_right):
        if a.shape != (n,) or b.shape != (d,):
            raise DimensionMismatchError("witness factor dimensions do not match the map")
    x = w.assemble()
    nrm = float(np.linalg.norm(x))
    if not (1 - 1e-9 <= nrm <= 1 + 1e-9):
        return False
    c = hermitian_part(phi.choi_blocks[w.block])
    value = _quadratic_value(c, x)
    if abs(value - w.value) > 1e-9 * max(1.0, abs(value)):
        return False
    return value < -tol * max(1.0, op_norm(c))


def _schmidt_factors(wmat: np.ndarray, k: int):
    """Top-k Schmidt factors of the vector with coefficient matrix wmat.

    x[(i,s)] = wmat[i,s] = sum_r (u[:,r] s_r)[i] * vh[r,:][s], so the right
    factors are the rows of vh, not their conjugates.
    """
    u, s, vh = np.linalg.svd(wmat)
    k = min(k, len(s))
    left = tuple(u[:, r] * s[r] for r in range(k))
    right = tuple(vh[r, :] for r in range(k))
    return left, right


def _seesaw_restart(
    c_herm: np.ndarray, n: int, d: int, k: int, rng: np.random.Generator
) -> tuple[float, np.ndarray]:
    """One seeded run of the alternating descent; returns (value, coefficient matrix)."""
    t = c_herm.reshape(n, d, n, d)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    b_frame, _ = np.linalg.qr(g)
    wmat = None
    prev = np.inf
    for _ in range(_MAX_ITERS):
        # left step: quadratic form in the stacked left factors
        m = np.einsum("sr,isjt,tq->riqj", b_frame.conj(), t, b_frame, optimize=True)
        m = m.reshape(k * n, k * n)
        vals, vecs = np.linalg.eigh(hermitian_part(m))
        value = float(vals[0])
        stacked = vecs[:, 0].reshape(k, n)
        wmat = stacked.T @ b_frame.T  # x[(i,s)] = sum_r A[i,r] B[s,r]
        if prev - value < _FTOL:
            break
        prev = value
        # right step: orthonormal left frame from the Schmidt decomposition
        u, _, _ = np.linalg.svd(wmat)
        a_frame = u[:, :k]
        m = np.einsum("ir,isjt,jq->rsqt", a_frame.conj(), t, a_frame, optimize=True)
        m = m.reshape(k * d, k * d)
        vals, vecs = np.linalg.eigh(hermitian_part(m))
        value = float(vals[0])
        stacked = vecs[:, 0].reshape(k, d)
        wmat = a_frame @ stacked
        if prev - value < _FTOL:
            break
        prev = value
        _, _, vh = np.linalg.svd(wmat)
        b_frame = vh[:k, :].T  # columns are the current right Schmidt factors
    x = wmat.reshape(-1)
    return _quadratic_value(c_herm, x), wmat


def _falsify_block(
    c: np.ndarray, n: int, d: int, k: int, restarts: int, seed: int
) -> tuple[float, Optional[tuple]]:
    """Best value and Schmidt factors found on one source block."""
    c_herm = hermitian_part(c)
    k_eff = min(k, n, d)
    if k_eff >= min(n, d):
        # Schmidt constraint is vacuous: the exact minimum is the bottom eigenvector
        vals, vecs = np.linalg.eigh(c_herm)
        x = vecs[:, 0]
        factors = _schmidt_factors(x.reshape(n, d), k_eff)
        return float(vals[0]), factors

    def run(r: int) -> tuple[float, np.ndarray]:
        rng = np.random.default_rng(seed ^ r)
        return _seesaw_restart(c_herm, n, d, k_eff, rng)

    cap = thread_cap()
    if cap > 1 and restarts >= 8:
        with ThreadPoolExecutor(max_workers=min(cap, restarts)) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(r) for r in range(restarts)]

    best_value, best_w = np.inf, None
    for value, wmat in results:  # index order resolves ties deterministically
        if value < best_value:
            best_value, best_w = value, wmat
    factors = _schmidt_factors(best_w, k_eff) if best_w is not None else None
    return float(best_value), factors


def k_positivity_falsify(
    phi: PMap,
    k: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> KposVerdict:
    """Search for a Schmidt-rank-<=k vector with negative Choi expectation.

    Runs blockwise over the source; VIOLATED comes with a re-verified
    Witness, and the CP fast path upgrades a fruitless search to
    CERTIFIED_POSITIVE. Deterministic in (seed, restarts): restart r uses
    the generator seeded with seed XOR r.
    """
    if k < 1:
        raise BadRangeError(f"need k >= 1, got {k}")
    if restarts < 1:
        raise BadRangeError(f"need restarts >= 1, got {restarts}")
    d = phi.target.embed_dim
    best_value = np.inf
    best = None  # (block, factors)
    used = 0
    for bi, (c, n) in enumerate(zip(phi.choi_blocks, phi.source.block_sizes)):
        k_eff = min(k, n, d)
        if k_eff < min(n, d):
            used += restarts
        value, factors = _falsify_block(c, n, d, k, restarts, seed)
        if value < best_value:
            best_value = value
            best = (bi, factors)

    scale = max(1.0, max(op_norm(hermitian_part(c)) for c in phi.choi_blocks))
    if best is not None and best_value < -tol * scale:
        bi, (left, right) = best
        w = Witness(
            k=k,
            factors_left=left,
            factors_right=right,
            value=best_value,
            vector_norm=float(
                np.linalg.norm(sum(np.kron(a, b) for a, b in zip(left, right)))
            ),
            block=bi,
        )
        if witness_verify(phi, w, tol):
            return KposVerdict(VIOLATED, w, used, best_value)
    if is_cp(phi, tol):
        return KposVerdict(CERTIFIED_POSITIVE, None, used, float(best_value))
    return KposVerdict(UNFALSIFIED, None, used, float(best_value))

"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

A FiniteCStar is just its ordered tuple of block sizes; an Element carries
one square complex block per summand. Elements are immutable after
construction (blocks are copied and marked read-only) so they are safe to
share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraMismatchError, BadRangeError
from .linalg import as_complex, hermitian_part, op_norm, psd_min_eig


@dataclass(frozen=True)
class FiniteCStar:
    """Direct sum of full matrix algebras, given by its block sizes."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if len(sizes) == 0:
            raise BadRangeError("an algebra needs at least one block")
        if any(s < 1 for s in sizes):
            raise BadRangeError(f"block sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def dim(self) -> int:
        """Linear dimension sum(n_i^2)."""
        return sum(s * s for s in self.block_sizes)

    @property
    def embed_dim(self) -> int:
        """Size sum(n_i) of the block-diagonal embedding into one matrix algebra."""
        return sum(self.block_sizes)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    def __repr__(self):
        return f"FiniteCStar{self.block_sizes}"


def _freeze(block: np.ndarray) -> np.ndarray:
    out = np.array(block, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


class Element:
    """An element of a FiniteCStar: one square complex matrix per block."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: FiniteCStar, blocks: Sequence[np.ndarray]):
        blocks = [as_complex(b) for b in blocks]
        if len(blocks) != algebra.n_blocks:
            raise AlgebraMismatchError(
                f"expected {algebra.n_blocks} blocks, got {len(blocks)}"
            )
        for b, size in zip(blocks, algebra.block_sizes):
            if b.shape != (size, size):
                raise AlgebraMismatchError(
                    f"block of shape {b.shape} does not match size {size}"
                )
            if not np.all(np.isfinite(b.real)) or not np.all(np.isfinite(b.imag)):
                raise AlgebraMismatchError("block contains non-finite entries")
        self.algebra = algebra
        self.blocks = tuple(_freeze(b) for b in blocks)

    def _check_same(self, other: "Element") -> None:
        if self.algebra != other.algebra:
            raise AlgebraMismatchError(
                f"elements of {self.algebra} and {other.algebra} cannot be combined"
            )

    def __add__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check_same(other)
            return Element(
                self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)]
            )
        return Element(self.algebra, [complex(other) * b for b in self.blocks])

    def __rmul__(self, scalar) -> "Element":
        return Element(self.algebra, [complex(scalar) * b for b in self.blocks])

    def __neg__(self) -> "Element":
        return Element(self.algebra, [-b for b in self.blocks])

    def adj(self) -> "Element":
        """Adjoint (conjugate transpose, blockwise)."""
        return Element(self.algebra, [b.conj().T for b in self.blocks])

    def norm(self) -> float:
        """C*-norm: max over blocks of the operator norm."""
        return max(op_norm(b) for b in self.blocks)

    def embedded(self) -> np.ndarray:
        """Block-diagonal embedding into one embed_dim x embed_dim matrix."""
        d = self.algebra.embed_dim
        out = np.zeros((d, d), dtype=np.complex128)
        off = 0
        for b, size in zip(self.blocks, self.algebra.block_sizes):
            out[off : off + size, off : off + size] = b
            off += size
        return out

    def __repr__(self):
        return f"Element({self.algebra}, norm={self.norm():.4g})"


def from_embedded(algebra: FiniteCStar, m: np.ndarray) -> Element:
    """Split the diagonal blocks of an embed_dim square matrix into an Element."""
    m = as_complex(m)
    d = algebra.embed_dim
    if m.shape != (d, d):
        raise AlgebraMismatchError(f"expected shape {(d, d)}, got {m.shape}")
    blocks = []
    off = 0
    for size in algebra.block_sizes:
        blocks.append(m[off : off + size, off : off + size])
        off += size
    return Element(algebra, blocks)


def zero(algebra: FiniteCStar) -> Element:
    return Element(algebra, [np.zeros((s, s)) for s in algebra.block_sizes])


def unit(algebra: FiniteCStar) -> Element:
    return Element(algebra, [np.eye(s) for s in algebra.block_sizes])


def basis_element(algebra: FiniteCStar, block: int, i: int, j: int) -> Element:
    """The matrix unit e_ij of the given block, zero elsewhere."""
    blocks = [np.zeros((s, s)) for s in algebra.block_sizes]
    blocks[block][i, j] = 1.0
    return Element(algebra, blocks)


def matrix_units(algebra: FiniteCStar) -> list[Element]:
    """All matrix units, block by block, row-major within each block."""
    units = []
    for b, size in enumerate(algebra.block_sizes):
        for i in range(size):
            for j in range(size):
                units.append(basis_element(algebra, b, i, j))
    return units


def is_positive(x: Element, tol: float = 1e-9) -> bool:
    """True iff every block is Hermitian within tol and PSD at scale max(1, ||x||)."""
    scale = max(1.0, x.norm())
    for b in x.blocks:
        if op_norm(b - b.conj().T) > tol * scale:
            return False
        if psd_min_eig(hermitian_part(b)) < -tol * scale:
            return False
    return True


def spanning_positive_contractions(algebra: FiniteCStar) -> list[Element]:
    """Positive contractions whose span is the whole algebra.

    Per block: the diagonal units e_ii and, for i < j, the rank-one
    projections onto (e_i + e_j)/sqrt(2) and (e_i + i e_j)/sqrt(2).
    """
    out = []
    for b, size in enumerate(algebra.block_sizes):
        for i in range(size):
            out.append(basis_element(algebra, b, i, i))
        for i in range(size):
            for j in range(i + 1, size):
                for phase in (1.0, 1.0j):
                    blk = [np.zeros((s, s)) for s in algebra.block_sizes]
                    v = np.zeros(size, dtype=np.complex128)
                    v[i] = 1.0
                    v[j] = phase
                    blk[b] = np.outer(v, v.conj()) / 2.0
                    out.append(Element(algebra, blk))
    return out


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _positive_contraction_blocks(rng: np.random.Generator, sizes: Iterable[int]):
    blocks = []
    for n in sizes:
        g = _ginibre(rng, n)
        w = g.conj().T @ g
        blocks.append(w / op_norm(w))
    return blocks


def random_positive_contraction(algebra: FiniteCStar, seed: int) -> Element:
    """Wishart-normalized positive contraction, deterministic in seed.

    Blockwise g*g / ||g*g|| with g complex standard normal, so every block
    has norm exactly 1.
    """
    rng = np.random.default_rng(seed)
    return Element(algebra, _positive_contraction_blocks(rng, algebra.block_sizes))


def random_contraction(algebra: FiniteCStar, seed: int) -> Element:
    """Ginibre matrix normalized to operator norm 1, blockwise."""
    rng = np.random.default_rng(seed)
    blocks = []
    for n in algebra.block_sizes:
        g = _ginibre(rng, n)
        blocks.append(g / op_norm(g))
    return Element(algebra, blocks)


def random_hermitian(algebra: FiniteCStar, seed: int) -> Element:
    """Hermitian element with blockwise norm 1."""
    rng = np.random.default_rng(seed)
    blocks = []
    for n in algebra.block_sizes:
        h = hermitian_part(_ginibre(rng, n))
        blocks.append(h / op_norm(h))
    return Element(algebra, blocks)

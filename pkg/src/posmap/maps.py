"""Linear maps between finite-dimensional C*-algebras.

A PMap stores, for each source block of size n, the unnormalized Choi
matrix C = sum_ij e_ij (x) phi(e_ij) of the restriction to that block,
with the target direct sum embedded block-diagonally into one matrix
algebra of size D = target.embed_dim. C is an (n*D) x (n*D) matrix whose
(i,s),(j,t) entry is phi(e_ij)[s,t].
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import Element, FiniteCStar, from_embedded, matrix_units, unit
from .errors import (
    AlgebraMismatchError,
    CountMismatchError,
    DimensionMismatchError,
    MultiBlockUnsupportedError,
)
from .linalg import as_complex

LEAK_TOL = 1e-10


def _offdiag_mask(target: FiniteCStar) -> np.ndarray:
    """Boolean D x D mask of entries outside the embedded diagonal blocks."""
    d = target.embed_dim
    mask = np.ones((d, d), dtype=bool)
    off = 0
    for size in target.block_sizes:
        mask[off : off + size, off : off + size] = False
        off += size
    return mask


class PMap:
    """A linear map between FiniteCStar algebras, stored as per-block Choi matrices."""

    __slots__ = ("source", "target", "choi_blocks")

    def __init__(self, source: FiniteCStar, target: FiniteCStar, choi_blocks, _validate=True):
        blocks = [as_complex(c) for c in choi_blocks]
        if len(blocks) != source.n_blocks:
            raise DimensionMismatchError(
                f"expected {source.n_blocks} Choi blocks, got {len(blocks)}"
            )
        d = target.embed_dim
        for c, n in zip(blocks, source.block_sizes):
            if c.shape != (n * d, n * d):
                raise DimensionMismatchError(
                    f"Choi block shape {c.shape} does not match {(n * d, n * d)}"
                )
            if not np.all(np.isfinite(c.real)) or not np.all(np.isfinite(c.imag)):
                raise DimensionMismatchError("Choi block contains non-finite entries")
        if _validate:
            mask = _offdiag_mask(target)
            for bi, (c, n) in enumerate(zip(blocks, source.block_sizes)):
                # images phi(e_ij) must lie in the embedded direct sum
                offd = c.reshape(n, d, n, d).transpose(0, 2, 1, 3)[:, :, mask]
                leak = float(np.max(np.abs(offd))) if offd.size else 0.0
                scale = max(1.0, float(np.max(np.abs(c))) if c.size else 0.0)
                if leak > LEAK_TOL * scale:
                    raise DimensionMismatchError(
                        f"Choi block {bi} leaks outside the embedded target blocks "
                        f"(max off-diagonal entry {leak:.3e})"
                    )
        frozen = []
        for c in blocks:
            arr = np.array(c, copy=True)
            arr.setflags(write=False)
            frozen.append(arr)
        self.source = source
        self.target = target
        self.choi_blocks = tuple(frozen)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_action(
        cls, source: FiniteCStar, target: FiniteCStar, images: Sequence[Element]
    ) -> "PMap":
        """Build a map from its values on the matrix units of the source.

        images are ordered like matrix_units(source): block by block,
        row-major within each block.
        """
        if len(images) != source.dim:
            raise CountMismatchError(
                f"expected {source.dim} matrix-unit images, got {len(images)}"
            )
        d = target.embed_dim
        blocks = []
        off = 0
        for n in source.block_sizes:
            t = np.zeros((n, d, n, d), dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    img = images[off + i * n + j]
                    if img.algebra != target:
                        raise AlgebraMismatchError("image does not belong to the target")
                    t[i, :, j, :] = img.embedded()
            blocks.append(t.reshape(n * d, n * d))
            off += n * n
        return cls(source, target, blocks, _validate=False)

    @classmethod
    def from_choi(cls, source: FiniteCStar, target: FiniteCStar, choi_blocks) -> "PMap":
        return cls(source, target, choi_blocks, _validate=True)

    @classmethod
    def identity(cls, algebra: FiniteCStar) -> "PMap":
        return cls.from_action(algebra, algebra, matrix_units(algebra))

    # -- action ------------------------------------------------------------

    def apply(self, x: Element) -> Element:
        if x.algebra != self.source:
            raise AlgebraMismatchError("element does not belong to the source algebra")
        d = self.target.embed_dim
        out = np.zeros((d, d), dtype=np.complex128)
        for blk, c, n in zip(x.blocks, self.choi_blocks, self.source.block_sizes):
            t = c.reshape(n, d, n, d)
            out += np.einsum("ij,isjt->st", blk, t, optimize=True)
        return from_embedded(self.target, out)

    def __call__(self, x: Element) -> Element:
        return self.apply(x)

    def unit_image(self) -> Element:
        return self.apply(unit(self.source))

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "PMap") -> None:
        if self.source != other.source or self.target != other.target:
            raise AlgebraMismatchError("maps act between different algebras")

    def __add__(self, other: "PMap") -> "PMap":
        self._check_compatible(other)
        return PMap(
            self.source,
            self.target,
            [a + b for a, b in zip(self.choi_blocks, other.choi_blocks)],
            _validate=False,
        )

    def __sub__(self, other: "PMap") -> "PMap":
        self._check_compatible(other)
        return PMap(
            self.source,
            self.target,
            [a - b for a, b in zip(self.choi_blocks, other.choi_blocks)],
            _validate=False,
        )

    def scale(self, c: complex) -> "PMap":
        return PMap(
            self.source,
            self.target,
            [complex(c) * blk for blk in self.choi_blocks],
            _validate=False,
        )

    def __mul__(self, c):
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def compose(self, inner: "PMap") -> "PMap":
        """self after inner: apply(compose(phi, psi), x) = phi(psi(x))."""
        if inner.target != self.source:
            raise AlgebraMismatchError(
                "inner map's target does not match outer map's source"
            )
        images = [self.apply(inner.apply(e)) for e in matrix_units(inner.source)]
        return PMap.from_action(inner.source, self.target, images)

    def tensor_id(self, k: int) -> "PMap":
        """id_{M_k} (x) self, for single-block source and target only."""
        if self.source.n_blocks != 1 or self.target.n_blocks != 1:
            raise MultiBlockUnsupportedError(
                "tensor_id is implemented for single-block algebras only"
            )
        if k < 1:
            raise DimensionMismatchError("k must be >= 1")
        n = self.source.block_sizes[0]
        d = self.target.embed_dim
        t = self.choi_blocks[0].reshape(n, d, n, d)
        big = np.zeros((k, n, k, d, k, n, k, d), dtype=np.complex128)
        for a in range(k):
            for b in range(k):
                big[a, :, a, :, b, :, b, :] = t
        src = FiniteCStar((k * n,))
        tgt = FiniteCStar((k * d,))
        return PMap(src, tgt, [big.reshape(k * n * k * d, k * n * k * d)], _validate=False)

    # -- properties --------------------------------------------------------

    def norm_as_positive(self) -> float:
        """||phi(1)||; equals the map norm when phi is positive."""
        return self.unit_image().norm()

    def is_selfadjoint(self, tol: float = 1e-10) -> bool:
        for c in self.choi_blocks:
            scale = max(1.0, float(np.max(np.abs(c))))
            if float(np.max(np.abs(c - c.conj().T))) > tol * scale:
                return False
        return True

    def matrix(self) -> np.ndarray:
        """Superoperator matrix acting on stacked row-major block coordinates."""
        units = matrix_units(self.source)
        cols = []
        for e in units:
            img = self.apply(e)
            cols.append(np.concatenate([b.reshape(-1) for b in img.blocks]))
        return np.array(cols).T

    def __repr__(self):
        return f"PMap({self.source} -> {self.target})"


def pmap_norm(phi: PMap) -> float:
    """||phi(1)||, the norm of a positive map on a unital algebra."""
    return phi.norm_as_positive()


def lstsq_preimage(phi: PMap, y: Element) -> Element:
    """Minimal-norm least-squares solution x of phi(x) = y."""
    if y.algebra != phi.target:
        raise AlgebraMismatchError("element does not belong to the target algebra")
    m = phi.matrix()
    rhs = np.concatenate([b.reshape(-1) for b in y.blocks])
    x, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    blocks = []
    off = 0
    for n in phi.source.block_sizes:
        blocks.append(x[off : off + n * n].reshape(n, n))
        off += n * n
    return Element(phi.source, blocks)

"""Order-zero and almost-order-zero analysis for maps between
finite-dimensional C*-algebras.

A positive map phi has order zero when it preserves orthogonality of
positive elements: phi(a)phi(b) = 0 whenever a, b >= 0 and ab = 0. In the
unital finite-dimensional setting this is captured by three measurable
defects, all reported as plain numbers and never thresholded here:

* the one-variable defect ||phi(a)^2 - phi(a^2) phi(1)|| on positive
  contractions a (zero for every a exactly when phi has order zero, given
  2-positivity);
* the sampled orthogonal-pair defect ||phi(a)phi(b)|| over pairs with
  ab = 0 built from complementary spectral supports;
* the orthogonality-domain defect, the worst deviation in
  phi(a)phi(b) = phi(1)phi(ab) and phi(b)phi(a) = phi(ba)phi(1) over a
  matrix-unit basis of b's.

Order-zero maps factor as phi = h pi with h = phi(1) and pi a
*-homomorphism commuting with h; oz_decompose recovers (h, pi) and reports
how badly the factorization fails, and oz_construct builds maps from such
data. cp_repair measures the multiplicativity defect on a matrix-unit
column and adds the trace bump that restores complete positivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, FiniteCStar, is_positive, matrix_units, unit
from .errors import (
    MultiBlockUnsupportedError,
    NotHermitianError,
    NotHomomorphismError,
    NotCommutingError,
    NotPositiveContractionError,
    NotUnitaryError,
    PreconditionFailedError,
)
from .linalg import (
    SUPPORT_CUTOFF,
    hermitian_part,
    op_norm,
    pinv_psd,
    pinv_sqrt,
    polar_unitary,
    psd_min_eig,
    support_projection,
)
from .maps import PMap


# -- defect functionals ------------------------------------------------------


def one_var_defect(phi: PMap, a: Element) -> float:
    """||phi(a)^2 - phi(a^2) phi(1)|| for a positive contraction a."""
    if not is_positive(a, 1e-9) or a.norm() > 1 + 1e-9:
        raise NotPositiveContractionError("a must be a positive contraction")
    fa = phi(a)
    return (fa * fa - phi(a * a) * phi.unit_image()).norm()


def _od_defect_images(
    phi: PMap, a: Element, units: list[Element], unit_images: list[Element], f1: Element
) -> float:
    fa = phi(a)
    worst = 0.0
    for e, fe in zip(units, unit_images):
        worst = max(worst, (fa * fe - f1 * phi(a * e)).norm())
        worst = max(worst, (fe * fa - phi(e * a) * f1).norm())
    return worst


def od_defect(phi: PMap, a: Element) -> float:
    """Worst deviation from the orthogonality-domain identities over a basis.

    max over matrix units b of ||phi(a)phi(b) - phi(1)phi(ab)|| and
    ||phi(b)phi(a) - phi(ba)phi(1)||; zero iff both identities hold for
    every b by linearity.
    """
    units = matrix_units(phi.source)
    return _od_defect_images(phi, a, units, [phi(e) for e in units], phi.unit_image())


def od_star_symmetry_defect(phi: PMap, a: Element) -> float:
    """|od_defect(a) - od_defect(a*)|."""
    return abs(od_defect(phi, a) - od_defect(phi, a.adj()))


def kadison_gap(phi: PMap, a: Element) -> float:
    """Smallest eigenvalue of phi(a* a) - phi(a)* phi(a), over all target blocks.

    Nonnegative (within noise) for 2-positive contractions; a genuinely
    negative value falsifies 2-positivity.
    """
    fa = phi(a)
    gap = phi(a.adj() * a) - fa.adj() * fa
    return min(psd_min_eig(hermitian_part(b)) for b in gap.blocks)


def schwartz_gap(phi: PMap, a: Element, b: Element, cutoff: float = SUPPORT_CUTOFF) -> float:
    """Smallest eigenvalue of phi(a*a) - X*X with X = phi(b*b)^{-1/2} phi(b*a).

    The pseudo-inverse square root is taken on the support of phi(b*b).
    Nonnegative (within noise) for 2-positive contractions.
    """
    h = phi(b.adj() * b)
    g = phi(b.adj() * a)
    faa = phi(a.adj() * a)
    worst = np.inf
    for hb, gb, fb in zip(h.blocks, g.blocks, faa.blocks):
        x = pinv_sqrt(hermitian_part(hb), cutoff) @ gb
        worst = min(worst, psd_min_eig(hermitian_part(fb - x.conj().T @ x)))
    return float(worst)


# -- sampled defect report ---------------------------------------------------


@dataclass(frozen=True)
class DefectReport:
    """Measured suprema of the order-zero defects over a seeded sample."""

    one_var_sup: float
    orth_pair_sup: float
    od_sup: float
    samples: int
    seed: int


def _orthogonal_pair(rng: np.random.Generator, algebra: FiniteCStar):
    """Positive contractions (a, b, p) with ab = 0, built in a common eigenbasis.

    p is the support projection of a. Products of the disjoint diagonal
    supports vanish exactly; the conjugating unitary contributes only
    rounding noise.
    """
    blocks_a, blocks_b, blocks_p = [], [], []
    masks = []
    for n in algebra.block_sizes:
        masks.append(rng.integers(0, 2, size=n).astype(bool))
    flat = np.concatenate(masks)
    if not flat.any():
        masks[0][0] = True
    if flat.all():
        masks[-1][-1] = False
    for n, mask in zip(algebra.block_sizes, masks):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        v = np.linalg.qr(g)[0]
        coeff_a = np.where(mask, rng.uniform(0.2, 1.0, size=n), 0.0)
        coeff_b = np.where(mask, 0.0, rng.uniform(0.2, 1.0, size=n))
        blocks_a.append((v * coeff_a) @ v.conj().T)
        blocks_b.append((v * coeff_b) @ v.conj().T)
        blocks_p.append((v * mask.astype(float)) @ v.conj().T)
    return (
        Element(algebra, blocks_a),
        Element(algebra, blocks_b),
        Element(algebra, blocks_p),
    )


def _wishart_contraction(rng: np.random.Generator, algebra: FiniteCStar) -> Element:
    blocks = []
    for n in algebra.block_sizes:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        w = g.conj().T @ g
        blocks.append(w / op_norm(w))
    return Element(algebra, blocks)


def order_zero_defect(phi: PMap, samples: int, seed: int) -> DefectReport:
    """Measure one-variable, orthogonal-pair and OD defects on seeded samples.

    Each sample probes a Wishart-normalized positive contraction together
    with a random spectral projection, and one orthogonal positive pair
    with exactly disjoint supports.
    """
    if samples < 1:
        raise PreconditionFailedError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    src = phi.source
    units = matrix_units(src)
    unit_images = [phi(e) for e in units]
    f1 = phi.unit_image()
    one_var = orth = od = 0.0
    for _ in range(samples):
        w = _wishart_contraction(rng, src)
        a, b, p = _orthogonal_pair(rng, src)
        for probe in (w, p):
            fp = phi(probe)
            one_var = max(one_var, (fp * fp - phi(probe * probe) * f1).norm())
            od = max(od, _od_defect_images(phi, probe, units, unit_images, f1))
        orth = max(orth, (phi(a) * phi(b)).norm())
    return DefectReport(
        one_var_sup=one_var, orth_pair_sup=orth, od_sup=od, samples=samples, seed=seed
    )


# -- structure decomposition ---------------------------------------------------


@dataclass(frozen=True)
class OzDecomposition:
    """Candidate factorization phi = h pi with measured failure defects."""

    h: Element
    pi_images: tuple[Element, ...]
    mult_defect: float
    commute_defect: float
    reconstruct_defect: float


def oz_decompose(phi: PMap, cutoff: float = SUPPORT_CUTOFF) -> OzDecomposition:
    """Recover h = phi(1) and pi(e) = h^{-1} phi(e) on the support of h.

    Reports how far pi is from a *-homomorphism commuting with h and how
    well h pi reconstructs phi; nothing is thresholded here.
    """
    h = phi.unit_image()
    h_norm = h.norm()
    pinv_blocks = []
    proj_blocks = []
    for hb in h.blocks:
        hs = hermitian_part(hb)
        if h_norm == 0:
            pinv_blocks.append(np.zeros_like(hs))
            proj_blocks.append(np.zeros_like(hs))
            continue
        # cutoff is relative to the global ||h||, so whole blocks may die
        rel = cutoff * h_norm / max(op_norm(hs), 1e-300)
        pinv_blocks.append(pinv_psd(hs, rel))
        proj_blocks.append(support_projection(hs, rel))
    units = matrix_units(phi.source)
    unit_images = [phi(e) for e in units]
    pi_images = []
    for img in unit_images:
        blocks = [
            pv @ ib @ pr for pv, ib, pr in zip(pinv_blocks, img.blocks, proj_blocks)
        ]
        pi_images.append(Element(phi.target, blocks))

    mult = commute = reconstruct = 0.0
    off = 0
    for n in phi.source.block_sizes:
        pis = pi_images[off : off + n * n]
        imgs = unit_images[off : off + n * n]
        for i in range(n):
            for j in range(n):
                pij = pis[i * n + j]
                commute = max(commute, (h * pij - pij * h).norm())
                reconstruct = max(reconstruct, (h * pij - imgs[i * n + j]).norm())
                for kk in range(n):
                    for ll in range(n):
                        prod = pij * pis[kk * n + ll]
                        if j == kk:
                            prod = prod - pis[i * n + ll]
                        mult = max(mult, prod.norm())
        off += n * n
    return OzDecomposition(
        h=h,
        pi_images=tuple(pi_images),
        mult_defect=mult,
        commute_defect=commute,
        reconstruct_defect=reconstruct,
    )


def oz_construct(source: FiniteCStar, pi_images: list[Element], h: Element) -> PMap:
    """Build the order-zero map phi(e) = h pi(e) from homomorphism data.

    pi_images are the images of matrix_units(source) under a
    *-homomorphism pi into the target; h must be a positive contraction
    commuting with every pi image.
    """
    if len(pi_images) != source.dim:
        raise NotHomomorphismError(
            f"expected {source.dim} images, got {len(pi_images)}"
        )
    if not is_positive(h, 1e-9) or h.norm() > 1 + 1e-9:
        raise NotPositiveContractionError("h must be a positive contraction")
    target = h.algebra
    sizes = source.block_sizes
    off = 0
    for bi, n in enumerate(sizes):
        pis = pi_images[off : off + n * n]
        for i in range(n):
            for j in range(n):
                pij = pis[i * n + j]
                if (pij.adj() - pis[j * n + i]).norm() > 1e-10:
                    raise NotHomomorphismError(
                        f"pi(e_{i}{j})* != pi(e_{j}{i}) in block {bi}"
                    )
                if (h * pij - pij * h).norm() > 1e-10:
                    raise NotCommutingError(
                        f"[h, pi(e_{i}{j})] exceeds tolerance in block {bi}"
                    )
                for kk in range(n):
                    for ll in range(n):
                        prod = pij * pis[kk * n + ll]
                        if j == kk:
                            prod = prod - pis[i * n + ll]
                        if prod.norm() > 1e-10:
                            raise NotHomomorphismError(
                                f"multiplicativity fails on units ({i},{j}),({kk},{ll})"
                                f" in block {bi}"
                            )
        off += n * n
    # units of distinct blocks multiply to zero; their images must too
    if len(sizes) > 1:
        bounds = np.cumsum([0] + [n * n for n in sizes])
        for b1 in range(len(sizes)):
            for b2 in range(len(sizes)):
                if b1 == b2:
                    continue
                for pa in pi_images[bounds[b1] : bounds[b1 + 1]]:
                    for pb in pi_images[bounds[b2] : bounds[b2 + 1]]:
                        if (pa * pb).norm() > 1e-10:
                            raise NotHomomorphismError(
                                "cross-block images do not annihilate"
                            )
    images = [h * p for p in pi_images]
    return PMap.from_action(source, target, images)


# -- repair and lifting --------------------------------------------------------


def cp_repair(phi: PMap) -> tuple[PMap, float]:
    """Measure the column multiplicativity defect and add the repairing trace term.

    For a self-adjoint map on M_n, eps = max_ij ||phi(e_i1)phi(e_1j) - phi(e_ij)||
    and the returned map is a -> phi(a) + n eps Tr(a) 1 (unnormalized trace),
    which is completely positive whenever the defect bound is honest.
    """
    if phi.source.n_blocks != 1:
        raise MultiBlockUnsupportedError("cp_repair needs a single-block source")
    if not phi.is_selfadjoint(1e-9):
        raise NotHermitianError("cp_repair needs a self-adjoint map")
    n = phi.source.block_sizes[0]
    units = matrix_units(phi.source)
    img = [phi(e) for e in units]

    def at(i, j):
        return img[i * n + j]

    eps = 0.0
    for i in range(n):
        for j in range(n):
            eps = max(eps, (at(i, 0) * at(0, j) - at(i, j)).norm())
    one = unit(phi.target)
    bump = [(n * eps if i == j else 0.0) * one for i in range(n) for j in range(n)]
    repaired = phi + PMap.from_action(phi.source, phi.target, bump)
    return repaired, eps


def polar_lift(phi: PMap, x: Element, y: Element) -> tuple[Element, bool]:
    """Lift an approximate unitary preimage to a unitary one.

    Given unitary x with ||phi(y) - x|| = eps_in < 1 for a contraction y,
    returns U = blockwise polar unitary of y and whether the lifted error
    beats the 3 sqrt(eps_in) bound.
    """
    if x.algebra != phi.target:
        raise NotUnitaryError("x must live in the target algebra")
    dev = max(
        op_norm(b.conj().T @ b - np.eye(b.shape[0])) for b in x.blocks
    )
    if dev > 1e-9:
        raise NotUnitaryError(f"x is not unitary (||x*x - 1|| = {dev:.3e})")
    eps_in = (phi(y) - x).norm()
    u = Element(y.algebra, [polar_unitary(b) for b in y.blocks])
    err = (phi(u) - x).norm()
    # an exact preimage measures eps_in ~ 0; floor the bound at float resolution
    bound_ok = err < max(3.0 * np.sqrt(eps_in), 1e-12)
    return u, bound_ok


# -- block-column bounds ---------------------------------------------------------


def _column_blocks(m: np.ndarray, d: int):
    big = m.shape[0]
    if big % d != 0:
        raise PreconditionFailedError(
            f"matrix size {big} is not a multiple of the block size {d}"
        )
    L = big // d
    return [m[i * d : (i + 1) * d, 0:d] for i in range(L)]


def lemma31_positive_check(a: np.ndarray, d: int, eps: float) -> bool:
    """First-column bound for positive contractions.

    For a positive contraction a in L x L blocks of size d with
    ||a_{1,1}|| < eps, checks ||sum_i a_{i,1}* a_{i,1}|| < eps. True for
    every valid input; False signals an implementation bug.
    """
    a = np.asarray(a, dtype=np.complex128)
    if psd_min_eig(hermitian_part(a)) < -1e-9 * max(1.0, op_norm(a)) or op_norm(
        a - a.conj().T
    ) > 1e-9 * max(1.0, op_norm(a)):
        raise NotPositiveContractionError("input is not a positive matrix")
    if op_norm(a) > 1 + 1e-9:
        raise NotPositiveContractionError("input is not a contraction")
    cols = _column_blocks(a, d)
    if op_norm(cols[0]) >= eps:
        raise PreconditionFailedError("||a_{1,1}|| < eps does not hold")
    total = sum(c.conj().T @ c for c in cols)
    return op_norm(total) < eps


def lemma31_unitary_check(u: np.ndarray, d: int, eps: float) -> bool:
    """First-column tail bound for unitaries.

    For a unitary u with ||u_{1,1}* u_{1,1} - 1|| < eps, checks
    ||sum_{i>=2} u_{i,1}* u_{i,1}|| < eps. True for every valid input.
    """
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    if op_norm(u.conj().T @ u - np.eye(n)) > 1e-9:
        raise NotUnitaryError("input is not unitary")
    cols = _column_blocks(u, d)
    if op_norm(cols[0].conj().T @ cols[0] - np.eye(d)) >= eps:
        raise PreconditionFailedError("||u_{1,1}* u_{1,1} - 1|| < eps does not hold")
    tail = sum(c.conj().T @ c for c in cols[1:]) if len(cols) > 1 else np.zeros((d, d))
    return op_norm(tail) < eps

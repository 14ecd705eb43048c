"""A family of k-positive, almost disjointness-preserving maps.

On M_m (x) M_n, mixing the identity with a corner-fed trace-mixing map,

    phi(x) = (1 - eps) x + eps 1_m (x) psi_lambda(corner(x)),

where corner(x) is the n x n block cut out by e_00 (x) 1_n, produces a
unital map that is k-positive for lambda <= 1 + 1/(nk - 1) and whose
multiplicativity defect ||phi(x)^2 - phi(x^2)|| stays below 6 eps on all
contractions. Compressing with the normalized partial trace over the
first factor and the corner embedding gives back a trace-mixing map with
an effective parameter

    lambda~ = m eps lambda / ((1 - eps) + m eps),

which crosses the (k+1)-threshold for large m, so the big map cannot be
(k+1)-positive even though its defect is small.

Maps are available both as PMap objects (small m) and as direct formula
appliers on dense (mn) x (mn) arrays, which is what verification uses so
that large m never materializes a Choi matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import Element, FiniteCStar, matrix_units
from .errors import BadRangeError
from .linalg import as_complex, op_norm
from .maps import PMap
from .positivity import KposVerdict, k_positivity_falsify

CLOSED_FORM_TOL = 1e-10


def _check_params(n: int, m: int, eps: float) -> None:
    if n < 2:
        raise BadRangeError(f"need n >= 2, got {n}")
    if m < 1:
        raise BadRangeError(f"need m >= 1, got {m}")
    if not (0.0 < eps < 1.0):
        raise BadRangeError(f"need eps in (0, 1), got {eps}")


# -- formula-level actions on dense (mn) x (mn) arrays ------------------------


def trace_mixing_apply(a: np.ndarray, lam: float) -> np.ndarray:
    """psi_lambda(a) = lambda tr_n(a) 1 + (1 - lambda) a on one block."""
    a = as_complex(a)
    n = a.shape[0]
    return lam * (np.trace(a) / n) * np.eye(n) + (1.0 - lam) * a


def corner_mixture_apply(x: np.ndarray, n: int, m: int, lam: float, eps: float) -> np.ndarray:
    """Apply the corner-mixture map to one (mn) x (mn) matrix."""
    _check_params(n, m, eps)
    x = as_complex(x)
    corner = x[:n, :n]  # rows and columns with first tensor index 0
    return (1.0 - eps) * x + eps * np.kron(np.eye(m), trace_mixing_apply(corner, lam))


def partial_trace_first_apply(x: np.ndarray, m: int, n: int) -> np.ndarray:
    """Normalized partial trace over the first factor of M_m (x) M_n."""
    x = as_complex(x)
    return np.einsum("aiaj->ij", x.reshape(m, n, m, n)) / m


def corner_embed_apply(a: np.ndarray, m: int) -> np.ndarray:
    """a -> e_00 (x) a into M_m (x) M_n."""
    a = as_complex(a)
    n = a.shape[0]
    out = np.zeros((m * n, m * n), dtype=np.complex128)
    out[:n, :n] = a
    return out


# -- PMap builders (small m) ---------------------------------------------------


def corner_mixture_map(n: int, m: int, lam: float, eps: float) -> PMap:
    """The corner-mixture map as a PMap on the single block M_{mn}."""
    _check_params(n, m, eps)
    alg = FiniteCStar((m * n,))
    images = []
    for e in matrix_units(alg):
        images.append(
            Element(alg, [corner_mixture_apply(e.blocks[0], n, m, lam, eps)])
        )
    return PMap.from_action(alg, alg, images)


def partial_trace_first(m: int, n: int) -> PMap:
    """Normalized partial trace M_m (x) M_n -> M_n as a PMap."""
    if m < 1 or n < 1:
        raise BadRangeError(f"need m, n >= 1, got m={m}, n={n}")
    src = FiniteCStar((m * n,))
    tgt = FiniteCStar((n,))
    images = [
        Element(tgt, [partial_trace_first_apply(e.blocks[0], m, n)])
        for e in matrix_units(src)
    ]
    return PMap.from_action(src, tgt, images)


def corner_embedding(m: int, n: int) -> PMap:
    """The corner embedding M_n -> M_m (x) M_n as a PMap."""
    if m < 1 or n < 1:
        raise BadRangeError(f"need m, n >= 1, got m={m}, n={n}")
    src = FiniteCStar((n,))
    tgt = FiniteCStar((m * n,))
    images = [
        Element(tgt, [corner_embed_apply(e.blocks[0], m)]) for e in matrix_units(src)
    ]
    return PMap.from_action(src, tgt, images)


# -- effective mixing parameter -------------------------------------------------


def _mixing_parameter_fraction(m: int, eps: Fraction, lam: Fraction) -> Fraction:
    return (m * eps * lam) / ((1 - eps) + m * eps)


def composed_mixing_parameter(m: int, eps: float, lam: float) -> float:
    """lambda~ = m eps lambda / ((1 - eps) + m eps).

    Strictly increasing in m with limit lambda as m -> infinity.
    """
    if m < 1:
        raise BadRangeError(f"need m >= 1, got {m}")
    if not (0.0 < eps < 1.0):
        raise BadRangeError(f"need eps in (0, 1), got {eps}")
    if lam <= 0:
        raise BadRangeError(f"need lambda > 0, got {lam}")
    return float(
        _mixing_parameter_fraction(m, Fraction(eps), Fraction(lam))
    )


# -- verification ----------------------------------------------------------------


@dataclass(frozen=True)
class FamilyReport:
    """Everything verify_corner_family measured for one parameter point."""

    n: int
    m: int
    k: int
    lam: float
    eps: float
    seed: int
    samples: int
    defect_max: float
    defect_bound: float
    defect_ok: bool
    closed_form_dev: float
    closed_form_ok: bool
    mixing_parameter: float
    next_threshold: float
    exceeds_next_threshold: bool
    falsifier: Optional[KposVerdict]

    @property
    def all_ok(self) -> bool:
        confirmed = (
            self.falsifier is None or self.falsifier.status == "VIOLATED"
        )
        return self.defect_ok and self.closed_form_ok and confirmed


def _sample_contraction(rng: np.random.Generator, size: int) -> np.ndarray:
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return g / op_norm(g)


def verify_corner_family(
    n: int,
    m: int,
    k: int,
    lam: float,
    eps: float,
    seed: int = 0,
    samples: int = 100,
    restarts: int = 32,
) -> FamilyReport:
    """Check the three claims about one member of the corner-mixture family.

    (a) the multiplicativity defect stays below 6 eps on sampled
        contractions of M_{mn};
    (b) compressing through the corner reproduces the trace-mixing map
        with parameter lambda~, within 1e-10 on matrix units;
    (c) lambda~ exceeds the (k+1)-threshold exactly when it should, and
        when it does, the falsifier confirms the violation on the
        compressed map.

    Requires the window 1/(n(k+1)-1) < lambda - 1 <= 1/(nk-1).
    """
    _check_params(n, m, eps)
    if not (1 <= k < n):
        raise BadRangeError(f"need 1 <= k < n, got k={k}, n={n}")
    lam_f = Fraction(lam)
    lo = Fraction(1, n * (k + 1) - 1)
    hi = Fraction(1, n * k - 1)
    if not (lo < lam_f - 1 <= hi):
        raise BadRangeError(
            f"lambda - 1 = {lam - 1} outside the window ({float(lo)}, {float(hi)}]"
        )

    size = m * n
    rng = np.random.default_rng(seed)
    defect_max = 0.0
    for _ in range(samples):
        x = _sample_contraction(rng, size)
        fx = corner_mixture_apply(x, n, m, lam, eps)
        fxx = corner_mixture_apply(x @ x, n, m, lam, eps)
        defect_max = max(defect_max, op_norm(fx @ fx - fxx))
    defect_bound = 6.0 * eps

    lam_tilde_f = _mixing_parameter_fraction(m, Fraction(eps), lam_f)
    lam_tilde = float(lam_tilde_f)
    prefactor = float(Fraction(eps) * lam_f / lam_tilde_f)

    # compress the actual pipeline through the corner and compare to the
    # closed-form trace-mixing map
    alg_n = FiniteCStar((n,))
    closed_form_dev = 0.0
    composed_images = []
    for e in matrix_units(alg_n):
        blk = e.blocks[0]
        composed = partial_trace_first_apply(
            corner_mixture_apply(corner_embed_apply(blk, m), n, m, lam, eps), m, n
        )
        composed_images.append(Element(alg_n, [composed]))
        expected = prefactor * trace_mixing_apply(blk, lam_tilde)
        closed_form_dev = max(closed_form_dev, op_norm(composed - expected))

    next_threshold_f = 1 + Fraction(1, n * (k + 1) - 1)
    exceeds = lam_tilde_f > next_threshold_f

    falsifier = None
    if exceeds:
        compressed = PMap.from_action(alg_n, alg_n, composed_images)
        falsifier = k_positivity_falsify(
            compressed, k + 1, restarts=restarts, seed=seed
        )

    return FamilyReport(
        n=n,
        m=m,
        k=k,
        lam=lam,
        eps=eps,
        seed=seed,
        samples=samples,
        defect_max=defect_max,
        defect_bound=defect_bound,
        defect_ok=defect_max < defect_bound,
        closed_form_dev=closed_form_dev,
        closed_form_ok=closed_form_dev < CLOSED_FORM_TOL,
        mixing_parameter=lam_tilde,
        next_threshold=float(next_threshold_f),
        exceeds_next_threshold=exceeds,
        falsifier=falsifier,
    )

"""Finite-dimensional approximation certificates and their verifier.

A DrCertificate packages the data of one approximation step witnessing a
decomposition-rank bound d for an algebra A: finite-dimensional summands
F_0..F_d, a downward 2-positive contraction psi: A -> (+)F_i, upward
2-positive order-zero contractions phi_i: F_i -> A whose sum is
contractive, a finite test set of contractions, and the accuracy epsilon
that ||(sum phi_i)(psi(x)) - x|| must beat on every test element.

verify_certificate measures every condition and returns a structured
report; failures are data, not exceptions. 2-positivity is reported as
CERTIFIED (exact Choi PSD check), UNFALSIFIED (the seeded falsifier found
nothing; pass with caveat) or VIOLATED (with a re-verified witness).

Serialization is canonical JSON: sorted keys, two-space indent, complex
entries as [re, im] pairs row-major, floats in shortest round-trip
decimal. save/load round-trips are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import Element, FiniteCStar, matrix_units, unit
from .errors import (
    BadWeightsError,
    ParseError,
    SchemaVersionMismatchError,
    StructurallyInvalidError,
)
from .maps import PMap, pmap_norm
from .orderzero import DefectReport, order_zero_defect, oz_decompose
from .positivity import (
    CERTIFIED_POSITIVE,
    UNFALSIFIED,
    VIOLATED,
    KposVerdict,
    is_cp,
    k_positivity_falsify,
)

SCHEMA_VERSION = 1


# -- data model ------------------------------------------------------------------


@dataclass(frozen=True)
class DrCertificate:
    algebra: FiniteCStar
    d: int
    summands: tuple[FiniteCStar, ...]
    psi: PMap
    phis: tuple[PMap, ...]
    test_set: tuple[Element, ...]
    epsilon: float


def direct_sum(summands) -> FiniteCStar:
    """The direct sum of FiniteCStar algebras: concatenated block sizes."""
    blocks: list[int] = []
    for s in summands:
        blocks.extend(s.block_sizes)
    return FiniteCStar(tuple(blocks))


def split_direct_sum(x: Element, summands) -> list[Element]:
    """Split an element of (+)F_i into its per-summand components."""
    parts = []
    off = 0
    for s in summands:
        parts.append(Element(s, x.blocks[off : off + s.n_blocks]))
        off += s.n_blocks
    return parts


def _check_structure(cert: DrCertificate) -> None:
    if cert.d + 1 != len(cert.summands) or cert.d + 1 != len(cert.phis):
        raise StructurallyInvalidError(
            f"need d+1 = {cert.d + 1} summands and maps, got "
            f"{len(cert.summands)} and {len(cert.phis)}"
        )
    if cert.epsilon <= 0:
        raise StructurallyInvalidError("epsilon must be positive")
    total = direct_sum(cert.summands)
    if cert.psi.source != cert.algebra or cert.psi.target != total:
        raise StructurallyInvalidError("psi does not map A into the direct sum")
    for i, (phi, s) in enumerate(zip(cert.phis, cert.summands)):
        if phi.source != s or phi.target != cert.algebra:
            raise StructurallyInvalidError(f"phis[{i}] does not map F_{i} into A")
    for i, x in enumerate(cert.test_set):
        if x.algebra != cert.algebra:
            raise StructurallyInvalidError(f"test_set[{i}] is not an element of A")
        if x.norm() > 1 + 1e-9:
            raise StructurallyInvalidError(f"test_set[{i}] is not a contraction")


# -- verification -----------------------------------------------------------------


@dataclass(frozen=True)
class TwoPositiveCheck:
    status: str  # CERTIFIED_POSITIVE, UNFALSIFIED or VIOLATED
    verdict: Optional[KposVerdict]

    @property
    def passed(self) -> bool:
        return self.status != VIOLATED

    @property
    def caveat(self) -> bool:
        return self.status == UNFALSIFIED


@dataclass(frozen=True)
class LegReport:
    """Checks for one upward map phi_i."""

    contraction_norm: float
    contraction_ok: bool
    two_positive: TwoPositiveCheck
    mult_defect: float
    commute_defect: float
    reconstruct_defect: float
    sampled: DefectReport
    order_zero_ok: bool

    @property
    def passed(self) -> bool:
        return self.contraction_ok and self.two_positive.passed and self.order_zero_ok


@dataclass(frozen=True)
class VerifyReport:
    psi_norm: float
    psi_contraction_ok: bool
    psi_two_positive: TwoPositiveCheck
    legs: tuple[LegReport, ...]
    sum_norm: float
    sum_contractive_ok: bool
    approx_errors: tuple[float, ...]
    approx_failures: tuple[int, ...]
    epsilon: float
    overall: bool
    caveat: bool


def _two_positive_check(
    phi: PMap, tol: float, seed: int, restarts: int
) -> TwoPositiveCheck:
    if is_cp(phi, tol):
        return TwoPositiveCheck(CERTIFIED_POSITIVE, None)
    verdict = k_positivity_falsify(phi, 2, restarts=restarts, seed=seed, tol=tol)
    return TwoPositiveCheck(verdict.status, verdict)


def verify_certificate(
    cert: DrCertificate,
    tol: float = 1e-8,
    seed: int = 0,
    restarts: int = 32,
    samples: int = 100,
) -> VerifyReport:
    """Measure every certificate condition; returns a report, never raises on failure.

    Raises StructurallyInvalidError only when the data does not even fit
    together dimensionally.
    """
    _check_structure(cert)

    psi_norm = pmap_norm(cert.psi)
    psi_ok = psi_norm <= 1 + tol
    psi_two = _two_positive_check(cert.psi, tol, seed, restarts)

    legs = []
    for i, phi in enumerate(cert.phis):
        nrm = pmap_norm(phi)
        dec = oz_decompose(phi)
        rep = order_zero_defect(phi, samples=samples, seed=seed + i)
        oz_ok = (
            dec.mult_defect <= tol
            and dec.commute_defect <= tol
            and dec.reconstruct_defect <= tol
            and rep.one_var_sup <= tol
            and rep.orth_pair_sup <= tol
            and rep.od_sup <= tol
        )
        legs.append(
            LegReport(
                contraction_norm=nrm,
                contraction_ok=nrm <= 1 + tol,
                two_positive=_two_positive_check(phi, tol, seed + i, restarts),
                mult_defect=dec.mult_defect,
                commute_defect=dec.commute_defect,
                reconstruct_defect=dec.reconstruct_defect,
                sampled=rep,
                order_zero_ok=oz_ok,
            )
        )

    total = sum(
        (phi(unit(s)) for phi, s in zip(cert.phis, cert.summands)),
        start=0.0 * unit(cert.algebra),
    )
    sum_norm = total.norm()
    sum_ok = sum_norm <= 1 + tol

    errors = []
    failures = []
    for idx, x in enumerate(cert.test_set):
        parts = split_direct_sum(cert.psi(x), cert.summands)
        out = 0.0 * unit(cert.algebra)
        for phi, part in zip(cert.phis, parts):
            out = out + phi(part)
        err = (out - x).norm()
        errors.append(err)
        if not err < cert.epsilon:
            failures.append(idx)

    overall = (
        psi_ok
        and psi_two.passed
        and all(leg.passed for leg in legs)
        and sum_ok
        and not failures
    )
    caveat = psi_two.caveat or any(leg.two_positive.caveat for leg in legs)
    return VerifyReport(
        psi_norm=psi_norm,
        psi_contraction_ok=psi_ok,
        psi_two_positive=psi_two,
        legs=tuple(legs),
        sum_norm=sum_norm,
        sum_contractive_ok=sum_ok,
        approx_errors=tuple(errors),
        approx_failures=tuple(failures),
        epsilon=cert.epsilon,
        overall=overall,
        caveat=caveat,
    )


# -- generators --------------------------------------------------------------------


def _default_test_set(algebra: FiniteCStar, seed: int) -> tuple[Element, ...]:
    from .algebra import random_contraction, random_positive_contraction

    return (
        unit(algebra),
        random_positive_contraction(algebra, seed),
        random_positive_contraction(algebra, seed + 1),
        random_contraction(algebra, seed + 2),
        random_contraction(algebra, seed + 3),
    )


def identity_certificate(
    algebra: FiniteCStar, test_set=None, epsilon: float = 1e-6
) -> DrCertificate:
    """d = 0, F_0 = A, psi = phi_0 = id: every algebra certifies rank 0."""
    ident = PMap.identity(algebra)
    if test_set is None:
        test_set = _default_test_set(algebra, 0)
    return DrCertificate(
        algebra=algebra,
        d=0,
        summands=(algebra,),
        psi=ident,
        phis=(ident,),
        test_set=tuple(test_set),
        epsilon=epsilon,
    )


def orderzero_certificate(
    algebra: FiniteCStar, weights, seed: int = 0, epsilon: float = 1e-6
) -> DrCertificate:
    """Nontrivial passing certificate from a partition of unity.

    psi is the diagonal embedding x -> (+)_i x and phi_i = w_i * id, so
    (sum phi_i)(psi(x)) = (sum w_i) x = x exactly and each leg is a CP
    order-zero contraction.
    """
    weights = [float(w) for w in weights]
    if not weights or any(w <= 0 for w in weights):
        raise BadWeightsError(f"weights must be positive, got {weights}")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise BadWeightsError(f"weights must sum to 1, got sum {sum(weights)}")
    summands = tuple(algebra for _ in weights)
    total = direct_sum(summands)
    units = matrix_units(algebra)
    psi_images = []
    for e in units:
        psi_images.append(Element(total, list(e.blocks) * len(weights)))
    psi = PMap.from_action(algebra, total, psi_images)
    phis = tuple(w * PMap.identity(algebra) for w in weights)
    return DrCertificate(
        algebra=algebra,
        d=len(weights) - 1,
        summands=summands,
        psi=psi,
        phis=phis,
        test_set=_default_test_set(algebra, seed),
        epsilon=epsilon,
    )


# -- serialization ------------------------------------------------------------------


def _encode_matrix(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def _decode_matrix(data, size: int, where: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != size * size:
        raise ParseError(f"{where}: expected {size * size} [re, im] pairs")
    out = np.empty(size * size, dtype=np.complex128)
    for idx, pair in enumerate(data):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError(f"{where}[{idx}]: expected a [re, im] pair")
        re, im = pair
        out[idx] = complex(float(re), float(im))
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise ParseError(f"{where}: non-finite entry")
    return out.reshape(size, size)


def _encode_algebra(a: FiniteCStar) -> dict:
    return {"blocks": list(a.block_sizes)}


def _decode_algebra(data, where: str) -> FiniteCStar:
    if not isinstance(data, dict) or "blocks" not in data:
        raise ParseError(f"{where}: expected an object with a 'blocks' list")
    blocks = data["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise ParseError(f"{where}.blocks: expected a non-empty list")
    try:
        return FiniteCStar(tuple(int(b) for b in blocks))
    except Exception as exc:
        raise ParseError(f"{where}.blocks: {exc}") from exc


def _encode_pmap(phi: PMap) -> dict:
    return {"choi_blocks": [_encode_matrix(c) for c in phi.choi_blocks]}


def _decode_pmap(data, source: FiniteCStar, target: FiniteCStar, where: str) -> PMap:
    if not isinstance(data, dict) or "choi_blocks" not in data:
        raise ParseError(f"{where}: expected an object with 'choi_blocks'")
    raw = data["choi_blocks"]
    if not isinstance(raw, list) or len(raw) != source.n_blocks:
        raise ParseError(f"{where}.choi_blocks: expected {source.n_blocks} blocks")
    d = target.embed_dim
    blocks = [
        _decode_matrix(rb, n * d, f"{where}.choi_blocks[{bi}]")
        for bi, (rb, n) in enumerate(zip(raw, source.block_sizes))
    ]
    try:
        return PMap.from_choi(source, target, blocks)
    except Exception as exc:
        raise ParseError(f"{where}: {exc}") from exc


def _encode_element(x: Element) -> dict:
    return {"blocks": [_encode_matrix(b) for b in x.blocks]}


def _decode_element(data, algebra: FiniteCStar, where: str) -> Element:
    if not isinstance(data, dict) or "blocks" not in data:
        raise ParseError(f"{where}: expected an object with 'blocks'")
    raw = data["blocks"]
    if not isinstance(raw, list) or len(raw) != algebra.n_blocks:
        raise ParseError(f"{where}.blocks: expected {algebra.n_blocks} blocks")
    blocks = [
        _decode_matrix(rb, n, f"{where}.blocks[{bi}]")
        for bi, (rb, n) in enumerate(zip(raw, algebra.block_sizes))
    ]
    return Element(algebra, blocks)


def _canonical_dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _check_schema(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version}"
        )


def certificate_to_document(cert: DrCertificate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "algebra": _encode_algebra(cert.algebra),
        "d": cert.d,
        "summands": [_encode_algebra(s) for s in cert.summands],
        "psi": _encode_pmap(cert.psi),
        "phis": [_encode_pmap(p) for p in cert.phis],
        "test_set": [_encode_element(x) for x in cert.test_set],
        "epsilon": float(cert.epsilon),
    }


def certificate_from_document(doc: dict) -> DrCertificate:
    _check_schema(doc)
    for key in ("algebra", "d", "summands", "psi", "phis", "test_set", "epsilon"):
        if key not in doc:
            raise ParseError(f"{key}: missing field")
    algebra = _decode_algebra(doc["algebra"], "algebra")
    d = doc["d"]
    if not isinstance(d, int) or d < 0:
        raise ParseError("d: expected a nonnegative integer")
    if not isinstance(doc["summands"], list):
        raise ParseError("summands: expected a list")
    summands = tuple(
        _decode_algebra(s, f"summands[{i}]") for i, s in enumerate(doc["summands"])
    )
    if len(summands) != d + 1:
        raise ParseError(f"summands: expected {d + 1} entries, got {len(summands)}")
    total = direct_sum(summands)
    psi = _decode_pmap(doc["psi"], algebra, total, "psi")
    if not isinstance(doc["phis"], list) or len(doc["phis"]) != d + 1:
        raise ParseError(f"phis: expected {d + 1} entries")
    phis = tuple(
        _decode_pmap(p, s, algebra, f"phis[{i}]")
        for i, (p, s) in enumerate(zip(doc["phis"], summands))
    )
    if not isinstance(doc["test_set"], list):
        raise ParseError("test_set: expected a list")
    test_set = tuple(
        _decode_element(x, algebra, f"test_set[{i}]")
        for i, x in enumerate(doc["test_set"])
    )
    epsilon = doc["epsilon"]
    if not isinstance(epsilon, (int, float)) or not epsilon > 0:
        raise ParseError("epsilon: expected a positive number")
    return DrCertificate(
        algebra=algebra,
        d=d,
        summands=summands,
        psi=psi,
        phis=phis,
        test_set=test_set,
        epsilon=float(epsilon),
    )


def save_certificate(cert: DrCertificate, path) -> None:
    with open(path, "w") as fh:
        fh.write(_canonical_dump(certificate_to_document(cert)))


def load_certificate(path) -> DrCertificate:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return certificate_from_document(doc)


# -- map files (same choi_blocks shape plus algebra headers) -------------------------


def map_to_document(phi: PMap) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "source": _encode_algebra(phi.source),
        "target": _encode_algebra(phi.target),
        "map": _encode_pmap(phi),
    }


def map_from_document(doc: dict) -> PMap:
    _check_schema(doc)
    for key in ("source", "target", "map"):
        if key not in doc:
            raise ParseError(f"{key}: missing field")
    source = _decode_algebra(doc["source"], "source")
    target = _decode_algebra(doc["target"], "target")
    return _decode_pmap(doc["map"], source, target, "map")


def save_map(phi: PMap, path) -> None:
    with open(path, "w") as fh:
        fh.write(_canonical_dump(map_to_document(phi)))


def load_map(path) -> PMap:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return map_from_document(doc)

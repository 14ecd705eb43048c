import dataclasses
import json

import numpy as np
import pytest

from posmap import algebra
from posmap.algebra import Element, FiniteCStar, basis_element, unit
from posmap.certificates import (
    DrCertificate,
    certificate_from_document,
    certificate_to_document,
    direct_sum,
    identity_certificate,
    load_certificate,
    load_map,
    map_from_document,
    orderzero_certificate,
    save_certificate,
    save_map,
    split_direct_sum,
    verify_certificate,
)
from posmap.errors import (
    BadWeightsError,
    ParseError,
    SchemaVersionMismatchError,
    StructurallyInvalidError,
)
from posmap.maps import PMap
from posmap.positivity import tomiyama_map

M2 = FiniteCStar((2,))
M3 = FiniteCStar((3,))
M23 = FiniteCStar((2, 3))


class TestDirectSum:
    def test_concatenates_blocks(self):
        assert direct_sum((M2, M23)).block_sizes == (2, 2, 3)

    def test_split_round_trip(self):
        total = direct_sum((M2, M23))
        x = algebra.random_contraction(total, 1)
        parts = split_direct_sum(x, (M2, M23))
        assert parts[0].algebra == M2
        assert parts[1].algebra == M23
        rebuilt = Element(total, list(parts[0].blocks) + list(parts[1].blocks))
        assert (rebuilt - x).norm() == 0.0


class TestIdentityCertificate:
    def test_single_block_passes(self):
        rep = verify_certificate(identity_certificate(M3), tol=1e-10)
        assert rep.overall
        assert not rep.caveat
        assert max(rep.approx_errors) <= 1e-12
        assert rep.psi_two_positive.status == "CERTIFIED_POSITIVE"
        leg = rep.legs[0]
        assert leg.mult_defect <= 1e-12
        assert leg.commute_defect <= 1e-12
        assert leg.reconstruct_defect <= 1e-12

    def test_direct_sum_passes(self):
        rep = verify_certificate(identity_certificate(M23), tol=1e-10)
        assert rep.overall

    def test_empty_test_set_passes_vacuously(self):
        rep = verify_certificate(identity_certificate(M2, test_set=()), tol=1e-10)
        assert rep.overall
        assert rep.approx_errors == ()


class TestOrderzeroCertificate:
    def test_single_weight_reduces_to_identity(self):
        cert = orderzero_certificate(M2, [1.0])
        assert cert.d == 0
        rep = verify_certificate(cert, tol=1e-8)
        assert rep.overall

    def test_half_half_on_m2(self):
        cert = orderzero_certificate(M2, [0.5, 0.5])
        assert cert.d == 1
        rep = verify_certificate(cert, tol=1e-8)
        assert rep.overall
        assert rep.sum_norm == pytest.approx(1.0, abs=1e-12)

    def test_uneven_weights(self):
        rep = verify_certificate(orderzero_certificate(M3, [0.3, 0.7]), tol=1e-8)
        assert rep.overall

    def test_bad_weights(self):
        with pytest.raises(BadWeightsError):
            orderzero_certificate(M2, [0.5, 0.4])
        with pytest.raises(BadWeightsError):
            orderzero_certificate(M2, [1.5, -0.5])


class TestVerifierFailures:
    def test_non_order_zero_leg(self):
        # replace phi_0 by the trace-mixing map at lambda = 1 (CP but not order
        # zero); epsilon loose so only the order-zero sub-check fails
        cert = identity_certificate(M2, epsilon=2.5)
        bad = dataclasses.replace(cert, phis=(tomiyama_map(2, 1.0),))
        rep = verify_certificate(bad, tol=1e-8)
        assert not rep.overall
        leg = rep.legs[0]
        assert not leg.order_zero_ok
        assert leg.mult_defect > 0.1
        assert leg.contraction_ok
        assert leg.two_positive.passed
        assert rep.sum_contractive_ok
        assert not rep.approx_failures

    def test_sum_not_contractive(self):
        # weights scaled to sum 1.1; epsilon loose so only the sum check fails
        cert = orderzero_certificate(M2, [0.5, 0.5], epsilon=0.2)
        phis = (1.2 * cert.phis[0], cert.phis[1])  # 0.6 id + 0.5 id
        bad = dataclasses.replace(cert, phis=phis)
        rep = verify_certificate(bad, tol=1e-8)
        assert not rep.overall
        assert rep.sum_norm == pytest.approx(1.1, abs=1e-12)
        assert not rep.sum_contractive_ok
        assert all(leg.passed for leg in rep.legs)
        assert not rep.approx_failures

    def test_approximation_failure_isolated(self):
        # psi shrunk by 1%: every other check passes, approximation misses by 0.01
        cert = identity_certificate(M3, epsilon=1e-6)
        bad = dataclasses.replace(cert, psi=0.99 * cert.psi)
        rep = verify_certificate(bad, tol=1e-8)
        assert not rep.overall
        assert rep.approx_failures
        assert rep.psi_contraction_ok
        assert rep.psi_two_positive.passed
        assert all(leg.passed for leg in rep.legs)
        assert rep.sum_contractive_ok
        assert max(rep.approx_errors) == pytest.approx(0.01, abs=1e-9)

    def test_non_two_positive_leg_carries_witness(self):
        # phi_0 = psi_{1.4} on M_3: positive but above the 2-positivity threshold
        from posmap.positivity import witness_verify

        cert = identity_certificate(M3, epsilon=2.5)
        bad = dataclasses.replace(cert, phis=(tomiyama_map(3, 1.4),))
        rep = verify_certificate(bad, tol=1e-8)
        assert not rep.overall
        check = rep.legs[0].two_positive
        assert check.status == "VIOLATED"
        assert check.verdict.witness is not None
        assert witness_verify(bad.phis[0], check.verdict.witness)

    def test_structural_mismatch_raises(self):
        cert = identity_certificate(M2)
        with pytest.raises(StructurallyInvalidError):
            verify_certificate(dataclasses.replace(cert, d=1))

    def test_monotone_tolerance(self):
        cert = orderzero_certificate(M2, [0.5, 0.5])
        assert verify_certificate(cert, tol=1e-8).overall
        assert verify_certificate(cert, tol=1e-6).overall
        assert verify_certificate(cert, tol=1e-4).overall


class TestSerialization:
    def test_round_trip_identity(self, tmp_path):
        cert = identity_certificate(M2)
        path = tmp_path / "cert.json"
        save_certificate(cert, path)
        loaded = load_certificate(path)
        assert loaded.algebra == cert.algebra
        assert loaded.d == cert.d
        assert loaded.epsilon == cert.epsilon
        for a, b in zip(loaded.psi.choi_blocks, cert.psi.choi_blocks):
            assert np.array_equal(a, b)
        for x, y in zip(loaded.test_set, cert.test_set):
            assert all(np.array_equal(p, q) for p, q in zip(x.blocks, y.blocks))

    def test_byte_identical_round_trip(self, tmp_path):
        cert = orderzero_certificate(M23, [0.25, 0.75], seed=3)
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        save_certificate(cert, p1)
        save_certificate(load_certificate(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_mismatched_choi_dimension_names_field(self, tmp_path):
        cert = identity_certificate(M2)
        doc = certificate_to_document(cert)
        doc["psi"]["choi_blocks"][0] = doc["psi"]["choi_blocks"][0][:-1]
        with pytest.raises(ParseError, match="psi.choi_blocks"):
            certificate_from_document(doc)

    def test_schema_version_mismatch(self):
        doc = certificate_to_document(identity_certificate(M2))
        doc["schema_version"] = 99
        with pytest.raises(SchemaVersionMismatchError):
            certificate_from_document(doc)

    def test_missing_field_named(self):
        doc = certificate_to_document(identity_certificate(M2))
        del doc["epsilon"]
        with pytest.raises(ParseError, match="epsilon"):
            certificate_from_document(doc)

    def test_non_finite_rejected(self):
        doc = certificate_to_document(identity_certificate(M2))
        doc["test_set"][0]["blocks"][0][0] = [float("nan"), 0.0]
        with pytest.raises(ParseError, match="test_set"):
            certificate_from_document(doc)


class TestMapFiles:
    def test_round_trip(self, tmp_path):
        phi = tomiyama_map(3, 1.4)
        path = tmp_path / "map.json"
        save_map(phi, path)
        loaded = load_map(path)
        assert loaded.source == phi.source
        assert loaded.target == phi.target
        assert np.array_equal(loaded.choi_blocks[0], phi.choi_blocks[0])

    def test_byte_stable(self, tmp_path):
        phi = tomiyama_map(2, 0.8)
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        save_map(phi, p1)
        save_map(load_map(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_field(self):
        with pytest.raises(ParseError, match="target"):
            map_from_document({"schema_version": 1, "source": {"blocks": [2]}, "map": {}})

import numpy as np
import pytest

from posmap import algebra
from posmap.algebra import (
    Element,
    FiniteCStar,
    matrix_units,
    spanning_positive_contractions,
    unit,
)
from posmap.errors import (
    NotHomomorphismError,
    NotCommutingError,
    NotPositiveContractionError,
    NotUnitaryError,
    PreconditionFailedError,
)
from posmap.maps import PMap, lstsq_preimage
from posmap.orderzero import (
    cp_repair,
    kadison_gap,
    lemma31_positive_check,
    lemma31_unitary_check,
    od_defect,
    od_star_symmetry_defect,
    one_var_defect,
    order_zero_defect,
    oz_construct,
    oz_decompose,
    polar_lift,
    schwartz_gap,
)
from posmap.positivity import is_cp, tomiyama_map

from conftest import ginibre, random_hermitian, random_unitary
from test_maps import transpose_map
from test_positivity import kraus_map

M2 = FiniteCStar((2,))
M3 = FiniteCStar((3,))


def hom_map(n, seed, scale=1.0):
    """scale * (u* . u), a scaled unital *-homomorphism on M_n."""
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, n)
    alg = FiniteCStar((n,))
    images = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            images.append(Element(alg, [scale * (u.conj().T @ e @ u)]))
    return PMap.from_action(alg, alg, images)


def copies_embedding(d, copies):
    """pi(a) = a (+) ... (+) a into M_{d*copies}."""
    source = FiniteCStar((d,))
    target = FiniteCStar((d * copies,))
    pi_images = []
    for e in matrix_units(source):
        big = np.zeros((d * copies, d * copies), dtype=np.complex128)
        for c in range(copies):
            big[c * d : (c + 1) * d, c * d : (c + 1) * d] = e.blocks[0]
        pi_images.append(Element(target, [big]))
    return source, target, pi_images


def copies_h(d, copies, scalars):
    big = np.zeros((d * copies, d * copies))
    for c, t in enumerate(scalars):
        big[c * d : (c + 1) * d, c * d : (c + 1) * d] = t * np.eye(d)
    return Element(FiniteCStar((d * copies,)), [big])


def seeded_oz_map(trial):
    """One of the 50 acceptance-style order-zero maps with mixed support."""
    rng = np.random.default_rng(5000 + trial)
    d, copies = (2, 3) if trial % 2 == 0 else (3, 3)
    scalars = rng.uniform(0.2, 1.0, size=copies)
    dead = rng.integers(0, copies)
    if trial % 3 != 0:  # two thirds have a dead copy (mixed support)
        scalars[dead] = 0.0
    source, target, pis = copies_embedding(d, copies)
    h = copies_h(d, copies, scalars)
    return oz_construct(source, pis, h), source, target, h


class TestOneVarDefect:
    def test_homomorphism_zero(self):
        phi = hom_map(3, 1)
        for a in spanning_positive_contractions(M3):
            assert one_var_defect(phi, a) < 1e-12

    def test_transpose_zero(self):
        phi = transpose_map(3)
        a = algebra.random_positive_contraction(M3, 2)
        assert one_var_defect(phi, a) < 1e-12

    def test_trace_map_on_e11(self):
        # oracle: ||(I/2)^2 - (I/2) I|| = 1/4
        phi = tomiyama_map(2, 1.0)
        e11 = algebra.basis_element(M2, 0, 0, 0)
        assert one_var_defect(phi, e11) == pytest.approx(0.25, abs=1e-12)

    def test_rejects_non_positive(self):
        phi = transpose_map(2)
        with pytest.raises(NotPositiveContractionError):
            one_var_defect(phi, algebra.basis_element(M2, 0, 0, 1))


class TestOrderZeroDefectReport:
    def test_homomorphism_all_zero(self):
        rep = order_zero_defect(hom_map(3, 3), samples=20, seed=0)
        assert rep.one_var_sup <= 1e-12
        assert rep.orth_pair_sup <= 1e-12
        assert rep.od_sup <= 1e-12

    def test_transpose(self):
        rep = order_zero_defect(transpose_map(3), samples=20, seed=0)
        assert rep.one_var_sup <= 1e-12
        assert rep.orth_pair_sup <= 1e-12

    def test_trace_map_found(self):
        rep = order_zero_defect(tomiyama_map(2, 1.0), samples=100, seed=0)
        assert rep.one_var_sup >= 0.2

    def test_deterministic(self):
        a = order_zero_defect(tomiyama_map(3, 1.2), samples=10, seed=4)
        b = order_zero_defect(tomiyama_map(3, 1.2), samples=10, seed=4)
        assert a == b


class TestOdDefect:
    def test_multiplicative_domain(self):
        phi = hom_map(3, 5)
        x = algebra.random_contraction(M3, 6)
        assert od_defect(phi, x) < 1e-12

    def test_trace_map_on_e11(self):
        # oracle: brute force over the four matrix units gives 1/4
        phi = tomiyama_map(2, 1.0)
        e11 = algebra.basis_element(M2, 0, 0, 0)
        assert od_defect(phi, e11) == pytest.approx(0.25, abs=1e-12)
        assert od_defect(phi, e11) > 0.1

    def test_unit_in_od(self):
        phi = tomiyama_map(3, 1.3)
        assert od_defect(phi, unit(M3)) < 1e-12

    def test_star_symmetry(self):
        phi = transpose_map(2)
        e12 = algebra.basis_element(M2, 0, 0, 1)
        assert od_star_symmetry_defect(phi, e12) < 1e-12

    def test_star_symmetry_selfadjoint(self):
        phi = tomiyama_map(3, 1.2)
        a = algebra.random_hermitian(M3, 7)
        assert od_star_symmetry_defect(phi, a) == 0.0

    def test_star_symmetry_random_two_positive(self):
        phi = tomiyama_map(3, 1.2)
        for seed in range(10):
            a = algebra.random_contraction(M3, seed)
            assert od_star_symmetry_defect(phi, a) <= 1e-9


class TestKadisonGap:
    def test_identity_equality(self):
        phi = PMap.identity(M2)
        e12 = algebra.basis_element(M2, 0, 0, 1)
        assert kadison_gap(phi, e12) == pytest.approx(0.0, abs=1e-12)

    def test_two_positive_nonnegative(self):
        phi = tomiyama_map(3, 1.2)
        for seed in range(20):
            a = algebra.random_contraction(M3, seed)
            assert kadison_gap(phi, a) >= -1e-9

    def test_transpose_falsified(self):
        # oracle: phi(a*a) - phi(a)*phi(a) = e22 - e11, min eig -1
        phi = transpose_map(2)
        e12 = algebra.basis_element(M2, 0, 0, 1)
        assert kadison_gap(phi, e12) == pytest.approx(-1.0, abs=1e-12)
        assert kadison_gap(phi, e12) < -0.5


class TestSchwartzGap:
    def test_b_unit_reduces_to_kadison(self):
        phi = tomiyama_map(3, 1.2)
        a = algebra.random_contraction(M3, 9)
        assert schwartz_gap(phi, a, unit(M3)) == pytest.approx(
            kadison_gap(phi, a), abs=1e-9
        )

    def test_two_positive_bulk(self):
        phi = tomiyama_map(3, 1.2)
        for seed in range(30):
            a = algebra.random_contraction(M3, 2 * seed)
            b = algebra.random_contraction(M3, 2 * seed + 1)
            assert schwartz_gap(phi, a, b) >= -1e-8

    def test_a_equals_b(self):
        phi = tomiyama_map(3, 1.2)
        for seed in range(10):
            a = algebra.random_contraction(M3, seed)
            g = schwartz_gap(phi, a, a)
            assert g >= -1e-8
            assert g <= schwartz_gap(phi, a, unit(M3)) + 1e-8


class TestOzDecompose:
    def test_scaled_homomorphism(self):
        for c in (1.0, 0.5, 0.25):
            dec = oz_decompose(hom_map(3, 11, scale=c))
            assert dec.mult_defect <= 1e-10
            assert dec.commute_defect <= 1e-10
            assert dec.reconstruct_defect <= 1e-10
            assert (dec.h - c * unit(M3)).norm() <= 1e-10

    def test_round_trip_full_support(self):
        source, target, pis = copies_embedding(2, 3)
        h0 = copies_h(2, 3, [1.0, 0.7, 0.4])
        phi = oz_construct(source, pis, h0)
        dec = oz_decompose(phi)
        assert dec.mult_defect <= 1e-8
        assert dec.commute_defect <= 1e-8
        assert dec.reconstruct_defect <= 1e-8
        assert (dec.h - h0).norm() <= 1e-8

    def test_trace_map_fails_multiplicativity(self):
        # oracle: pi(e_ij) = delta_ij I/2, so pi(e_12)pi(e_21) - pi(e_11) = -I/2
        dec = oz_decompose(tomiyama_map(2, 1.0))
        assert dec.mult_defect == pytest.approx(0.5, abs=1e-12)
        assert dec.mult_defect > 0.1


class TestOzConstruct:
    def test_half_identity(self):
        phi = oz_construct(M2, matrix_units(M2), 0.5 * unit(M2))
        x = algebra.random_contraction(M2, 13)
        assert (phi(x) - 0.5 * x).norm() < 1e-12
        assert is_cp(phi)

    def test_block_embedding_with_mixed_h(self):
        source, target, pis = copies_embedding(2, 2)
        for t in (0.0, 0.5, 1.0):
            h = copies_h(2, 2, [1.0, t])
            phi = oz_construct(source, pis, h)
            assert is_cp(phi)
            a = algebra.random_positive_contraction(source, 14)
            assert one_var_defect(phi, a) < 1e-12

    def test_h_zero_gives_zero_map(self):
        phi = oz_construct(M2, matrix_units(M2), 0.0 * unit(M2))
        assert phi.unit_image().norm() == 0.0

    def test_constructed_maps_are_order_zero(self):
        phi, *_ = seeded_oz_map(0)
        rep = order_zero_defect(phi, samples=20, seed=1)
        assert rep.one_var_sup <= 1e-8
        assert rep.orth_pair_sup <= 1e-8
        assert rep.od_sup <= 1e-8

    def test_rejects_non_homomorphism(self):
        bad = [1.0 * e for e in matrix_units(M2)]
        bad[1] = 2.0 * bad[1]  # breaks pi(e_12)* = pi(e_21)
        with pytest.raises(NotHomomorphismError):
            oz_construct(M2, bad, 0.5 * unit(M2))

    def test_rejects_non_commuting_h(self):
        h = Element(M2, [np.array([[0.6, 0.2], [0.2, 0.3]])])
        with pytest.raises(NotCommutingError):
            oz_construct(M2, matrix_units(M2), h)

    def test_rejects_bad_h(self):
        with pytest.raises(NotPositiveContractionError):
            oz_construct(M2, matrix_units(M2), 2.0 * unit(M2))


class TestCpRepair:
    def test_homomorphism_untouched(self):
        phi = hom_map(3, 15)
        repaired, eps = cp_repair(phi)
        assert eps <= 1e-12
        x = algebra.random_contraction(M3, 16)
        assert (repaired(x) - phi(x)).norm() < 1e-10

    def test_transpose_oracle(self):
        # oracle: eps = 1, repaired Choi = SWAP + 2 I with min eig 1
        phi = transpose_map(2)
        repaired, eps = cp_repair(phi)
        assert eps == pytest.approx(1.0, abs=1e-12)
        vals = np.linalg.eigvalsh(repaired.choi_blocks[0])
        assert vals[0] == pytest.approx(1.0, abs=1e-9)
        assert is_cp(repaired)

    def test_trace_mixing_map(self):
        # oracle: hand computation gives eps = 0.4 for lambda = 1.2 on M_3
        repaired, eps = cp_repair(tomiyama_map(3, 1.2))
        assert eps == pytest.approx(0.4, abs=1e-12)
        assert is_cp(repaired)


class TestPolarLift:
    def _near_unitary_target(self, phi, seed, target_eps):
        """Unitary x with a calibrated contraction preimage error near target_eps."""
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 3)
        h = h / np.linalg.norm(h, 2)
        h = h - np.trace(h) / 3 * np.eye(3)
        theta = rng.uniform(0, 2 * np.pi)
        lo, hi = 0.0, 1.5
        for _ in range(60):
            s = (lo + hi) / 2
            vals, vecs = np.linalg.eigh(h)
            x = Element(M3, [np.exp(1j * theta) * ((vecs * np.exp(1j * s * vals)) @ vecs.conj().T)])
            y = lstsq_preimage(phi, x)
            y = (1.0 / max(1.0, y.norm())) * y
            eps_in = (phi(y) - x).norm()
            if eps_in > target_eps:
                hi = s
            else:
                lo = s
        return x, y, eps_in

    def test_unitary_preimage_trivial(self):
        phi = tomiyama_map(3, 1.2)
        rng = np.random.default_rng(17)
        y = Element(M3, [random_unitary(rng, 3)])
        x = phi(y)
        # phi(y) need not be unitary; use identity target with y unitary instead
        u, ok = polar_lift(PMap.identity(M3), y, y)
        assert (u - y).norm() < 1e-9
        assert ok

    def test_scaled_unitary(self):
        phi = PMap.identity(M3)
        rng = np.random.default_rng(18)
        x = Element(M3, [random_unitary(rng, 3)])
        u, ok = polar_lift(phi, x, 0.9 * x)
        assert (u - x).norm() < 1e-9
        assert ok

    @pytest.mark.parametrize("target_eps", [0.01, 0.04])
    def test_bound_holds(self, target_eps):
        phi = tomiyama_map(3, 1.2)
        for seed in range(5):
            x, y, eps_in = self._near_unitary_target(phi, 100 + seed, target_eps)
            assert eps_in < 1
            u, ok = polar_lift(phi, x, y)
            assert ok, (seed, eps_in)

    def test_rejects_non_unitary_x(self):
        phi = PMap.identity(M3)
        with pytest.raises(NotUnitaryError):
            polar_lift(phi, 0.5 * unit(M3), 0.5 * unit(M3))


def scaled_wishart_contraction(rng, L, d, eps):
    """Positive contraction with ||a_11|| <= eps/2 by construction."""
    n = L * d
    g = ginibre(rng, n)
    w = g.conj().T @ g
    w = w / np.linalg.norm(w, 2)
    t = np.eye(n)
    t[:d, :d] *= np.sqrt(eps / 2)
    a = t @ w @ t
    return a / max(1.0, np.linalg.norm(a, 2))


def near_block_unitary(rng, L, d, eps):
    """Unitary with ||u_11* u_11 - 1|| < eps, via a calibrated exponential."""
    n = L * d
    k = random_hermitian(rng, n)
    k = k / np.linalg.norm(k, 2)
    vals, vecs = np.linalg.eigh(k)

    def at(s):
        return (vecs * np.exp(1j * s * vals)) @ vecs.conj().T

    lo, hi = 0.0, 1.0
    for _ in range(40):
        s = (lo + hi) / 2
        u = at(s)
        dev = np.linalg.norm(u[:d, :d].conj().T @ u[:d, :d] - np.eye(d), 2)
        if dev < 0.8 * eps:
            lo = s
        else:
            hi = s
    return at(lo)


class TestLemma31:
    def test_zero_matrix(self):
        assert lemma31_positive_check(np.zeros((6, 6)), 2, 0.1)

    def test_projection_avoiding_corner(self):
        p = np.zeros((6, 6))
        p[4, 4] = 1.0
        assert lemma31_positive_check(p, 2, 0.1)

    def test_identity_unitary(self):
        assert lemma31_unitary_check(np.eye(6), 2, 0.05)

    def test_block_diagonal_unitary(self):
        rng = np.random.default_rng(31)
        u = np.zeros((6, 6), dtype=complex)
        for c in range(3):
            u[2 * c : 2 * c + 2, 2 * c : 2 * c + 2] = random_unitary(rng, 2)
        assert lemma31_unitary_check(u, 2, 0.05)

    @pytest.mark.parametrize("eps", [0.1, 0.01])
    def test_positive_bulk(self, eps):
        for trial in range(50):
            rng = np.random.default_rng(7000 + trial)
            a = scaled_wishart_contraction(rng, 3, 2, eps)
            assert lemma31_positive_check(a, 2, eps)

    def test_unitary_bulk(self):
        eps = 0.05
        for trial in range(50):
            rng = np.random.default_rng(8000 + trial)
            u = near_block_unitary(rng, 3, 2, eps)
            assert lemma31_unitary_check(u, 2, eps)

    def test_precondition_enforced(self):
        with pytest.raises(PreconditionFailedError):
            lemma31_positive_check(np.eye(6) * 0.9, 2, 0.1)
        with pytest.raises(NotUnitaryError):
            lemma31_unitary_check(np.eye(6) * 0.5, 2, 0.1)


class TestExactOrderZeroCharacterization:
    def test_constructed_maps_satisfy_conclusion(self):
        # one-variable defect zero on a spanning family + 2-positivity
        # implies all sampled defects vanish
        for trial in range(6):
            phi, source, *_ = seeded_oz_map(trial)
            for a in spanning_positive_contractions(source):
                assert one_var_defect(phi, a) <= 1e-12
                assert od_defect(phi, a) <= 1e-12
            assert is_cp(phi)
            rep = order_zero_defect(phi, samples=25, seed=trial)
            assert rep.one_var_sup <= 1e-8
            assert rep.orth_pair_sup <= 1e-8
            assert rep.od_sup <= 1e-8

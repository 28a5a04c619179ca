import numpy as np
import pytest

from src.hecke.algebra.iwahori_hecke import (
    DerivedIwahoriElement, IwahoriElement, center_report, chi_t, e_K, induced_rep, morita_check,
    spherical_compress, theta_projector, theta_values,
)
from src.hecke.algebra.toral_satake import SphericalElement, torus_coh_ring
from src.hecke.core.coeff_groups import make_coeff
from src.hecke.core.errors import InputError, OrbitError
from src.hecke.core.lattice_algebra import LatticeElement
from src.hecke.core.root_datum import build_root_datum


@pytest.fixture
def pgl2():
    return build_root_datum("PGL2")


class TestGroupAlgebra:
    """Test S[X_* x| W] at q = 1"""

    def test_quadratic_relation(self, pgl2):
        """T_s^2 = 1"""
        s = IwahoriElement.weyl(pgl2, 7, 1)
        assert s * s == IwahoriElement.one(pgl2, 7)

    def test_conjugation(self, pgl2):
        """s t_mu s = t_{-mu}"""
        s = IwahoriElement.weyl(pgl2, 7, 1)
        assert s * IwahoriElement.translation(pgl2, 7, (1,)) * s == IwahoriElement.translation(pgl2, 7, (-1,))

    def test_e_k_idempotent(self, pgl2):
        """e_K^2 = e_K with |W| = 2 inverted"""
        idempotent = e_K(pgl2, 7)
        assert idempotent * idempotent == idempotent
        assert idempotent.coeffs[((0,), 0)] == 4

    def test_center(self, pgl2):
        """delta_1 + delta_-1 is central"""
        z = LatticeElement(1, 7, {(1,): 1, (-1,): 1})
        report = center_report(pgl2, z, radius=2)
        assert report.passed
        assert report.checked == 10

    def test_non_invariant_not_central(self, pgl2):
        """Only W-invariant lattice elements embed in the center"""
        with pytest.raises(InputError):
            center_report(pgl2, LatticeElement.monomial(1, 7, (1,)))

    def test_payload(self, pgl2):
        """Elements are read from their JSON form"""
        x = IwahoriElement.basis(pgl2, 7, (2,), 1, 3) + IwahoriElement.one(pgl2, 7)
        assert IwahoriElement.from_json(pgl2, 7, x.to_json()) == x
        with pytest.raises(InputError):
            IwahoriElement.from_json(pgl2, 7, [{"weyl": [0]}])


class TestInducedRepresentation:
    """Test V_chi for PGL2 over F_7 with chi(1) = 2"""

    def test_translation_matrix(self, pgl2):
        """delta_1 acts by diag(2, 4)"""
        rep = induced_rep(pgl2, 7, [2])
        assert np.array_equal(rep.translation_matrix((1,)), np.array([[2, 0], [0, 4]]))

    def test_relations(self, pgl2):
        """The matrices satisfy the group relations"""
        report = induced_rep(pgl2, 7, [2]).relations_report()
        assert all(report.values())

    def test_e_k_rank_one(self, pgl2):
        """e_K acts by a rank-one projector"""
        from src.hecke.core.modular_linalg import rank_mod_p
        assert rank_mod_p(induced_rep(pgl2, 7, [2]).e_K_matrix(), 7) == 1

    def test_non_unit_character(self, pgl2):
        """Characters must take unit values"""
        with pytest.raises(InputError):
            induced_rep(pgl2, 7, [0])


class TestMorita:
    """Test the Morita equivalence check"""

    def test_regular_character(self, pgl2):
        """chi(1) = 2 is strongly regular mod 7"""
        report = morita_check(pgl2, 7, [2])
        assert report.applicable
        assert report.passed
        assert report.ranks == {"II": 4, "KI": 2, "IK": 2, "KK": 1}

    def test_trivial_character(self, pgl2):
        """The discriminant vanishes at chi = 1"""
        report = morita_check(pgl2, 7, [1])
        assert not report.applicable
        assert not report.passed
        assert any("discriminant" in v for v in report.violations)


class TestTheta:
    """Test the Theta projector"""

    def test_theta_pgl2(self, pgl2):
        """Theta = 3 delta_1 + 2 for chi(1) = 2 mod 7"""
        chi = chi_t(pgl2, [2], 7)
        theta = theta_projector(pgl2, chi)
        assert theta.coeffs == {(1,): 3, (0,): 2}
        assert theta_values(pgl2, chi, theta) == [1, 0]

    def test_refinement_keeps_values(self, pgl2):
        """Refinement leaves Theta on the orbit unchanged"""
        chi = chi_t(pgl2, [2], 7)
        theta = theta_projector(pgl2, chi, refinement_steps=2)
        assert theta_values(pgl2, chi, theta) == [1, 0]

    @pytest.mark.parametrize("value", [1, 6])
    def test_fixed_character(self, pgl2, value):
        """chi fixed by s has no Theta"""
        with pytest.raises(OrbitError):
            theta_projector(pgl2, chi_t(pgl2, [value], 7))


class TestDerivedIwahori:
    """Test the derived Iwahori model restricted to the torus"""

    @pytest.fixture
    def ring(self, pgl2):
        return torus_coh_ring(pgl2, 29, make_coeff(7, 1))

    def test_twisted_product(self, pgl2, ring):
        """s <h> s = <s.h>"""
        s = DerivedIwahoriElement.from_iwahori(IwahoriElement.weyl(pgl2, 7, 1), ring)
        h = DerivedIwahoriElement.cohomology(pgl2, ring.x(0))
        assert (s * h * s).value((0,)) == -ring.x(0)

    def test_compression(self, pgl2, ring):
        """|W| e_K Theta <h> e_K evaluates to h at chi"""
        chi = chi_t(pgl2, [2], 7)
        theta = theta_projector(pgl2, chi)
        result = spherical_compress(pgl2, theta, ring.x(0), chi)
        assert isinstance(result, SphericalElement)
        assert result.evaluate([2]) == ring.x(0)
        assert result.evaluate([4]) == -ring.x(0)

    def test_modulus_mismatch(self, pgl2, ring):
        """Theta and the cohomology ring must share coefficients"""
        theta = LatticeElement.constant(1, 3, 1)
        with pytest.raises(InputError):
            spherical_compress(pgl2, theta, ring.one())

import pytest

from src.hecke.core.coeff_groups import (
    AbelianLGroup, GroupHom, ell_part, ell_valuation, make_coeff, validate_regime,
)
from src.hecke.core.errors import InputError, NonUnitError
from src.hecke.core.root_datum import build_root_datum


class TestCoeffRing:
    """Test arithmetic in Z/l^r"""

    def test_modulus_and_inverse(self):
        """Units invert, the modulus is l^r"""
        S = make_coeff(3, 2)
        assert S.modulus == 9
        assert S.inverse(2) == 5
        assert S.mul(4, 7) == 1

    def test_non_unit_inverse(self):
        """Inverting a multiple of l raises"""
        S = make_coeff(3, 2)
        with pytest.raises(NonUnitError):
            S.inverse(3)

    def test_non_prime_rejected(self):
        """The coefficient prime must be prime"""
        with pytest.raises(InputError):
            make_coeff(4, 1)
        with pytest.raises(InputError):
            make_coeff(3, 0)

    def test_valuation(self):
        """l-adic valuations of integers and residues"""
        assert ell_valuation(18, 3) == 2
        assert make_coeff(3, 2).valuation(0) == 2
        with pytest.raises(InputError):
            ell_valuation(0, 3)

    def test_reduce_to(self):
        """Reduction only goes down in precision"""
        S = make_coeff(3, 3)
        assert S.reduce_to(1).modulus == 3
        with pytest.raises(InputError):
            S.reduce_to(4)


class TestAbelianGroups:
    """Test finite abelian l-groups and their homomorphisms"""

    def test_from_orders(self):
        """Orders are split into a prime and exponents"""
        T = AbelianLGroup.from_orders([3, 9])
        assert T.ell == 3
        assert T.exponents == (1, 2)
        assert T.order == 27

    def test_from_orders_mixed_primes(self):
        """Mixed primes and non prime powers are rejected"""
        with pytest.raises(InputError):
            AbelianLGroup.from_orders([3, 5])
        with pytest.raises(InputError):
            AbelianLGroup.from_orders([6])

    def test_hom_order_condition(self):
        """The image of a generator must be killed by its order"""
        small, big = AbelianLGroup(3, (1,)), AbelianLGroup(3, (2,))
        with pytest.raises(InputError):
            GroupHom(small, big, ((1,),))
        inclusion = GroupHom(small, big, ((3,),))
        assert inclusion.apply((1,)) == (3,)
        assert inclusion.is_injective()

    def test_compose(self):
        """Composition multiplies matrices"""
        T = AbelianLGroup(3, (2,))
        doubling = GroupHom(T, T, ((2,),))
        assert doubling.compose(doubling).matrix == ((4,),)

    def test_ell_part(self):
        """The l-Sylow of F_q^x"""
        assert ell_part(7, 3) == AbelianLGroup(3, (1,))
        assert ell_part(19, 3) == AbelianLGroup(3, (2,))
        assert ell_part(5, 3).is_trivial()
        with pytest.raises(InputError):
            ell_part(9, 3)


class TestRegime:
    """Test the standing-regime validator"""

    def test_valid_regime(self):
        """PGL2, q = 7, S = Z/3 is inside the regime"""
        report = validate_regime(build_root_datum("PGL2"), make_coeff(3, 1), 7)
        assert report.passed
        assert report.violations == []

    def test_precision_too_high(self):
        """l^r must divide q - 1"""
        report = validate_regime(build_root_datum("PGL2"), make_coeff(3, 2), 7)
        assert not report.passed
        assert any("does not divide" in v for v in report.violations)

    def test_ell_divides_weyl_order(self):
        """l must be prime to |W|"""
        report = validate_regime(build_root_datum("SL3"), make_coeff(3, 1), 7)
        assert not report.passed
        assert any("|W|" in v for v in report.violations)

    def test_ell_is_characteristic(self):
        """l must differ from the residue characteristic"""
        report = validate_regime(build_root_datum("PGL2"), make_coeff(3, 1), 9)
        assert not report.passed
        assert report.to_dict()["details"]["q"] == 9

import pytest

from src.hecke.algebra.toral_satake import (
    SphericalElement, ToralElement, invariant_dims, presentation_dims, satake_basis, symmetrize,
    torus_coh_ring, toral_convolve,
)
from src.hecke.core.coeff_groups import AbelianLGroup, make_coeff
from src.hecke.core.errors import InputError
from src.hecke.core.finite_cohomology import cup
from src.hecke.core.root_datum import build_root_datum


@pytest.fixture
def pgl2():
    rd = build_root_datum("PGL2")
    ring = torus_coh_ring(rd, 7, make_coeff(3, 1))
    return rd, ring


class TestTorusRing:
    """Test the torus cohomology ring attached to (G, q, S)"""

    def test_pgl2_at_seven(self, pgl2):
        """T is Z/3 for PGL2 over F_7"""
        _, ring = pgl2
        assert ring.group == AbelianLGroup(3, (1,))

    def test_trivial_torus(self):
        """l not dividing q - 1 gives a trivial torus"""
        ring = torus_coh_ring(build_root_datum("PGL2"), 5, make_coeff(3, 1))
        assert ring.group.is_trivial()
        assert ring.rank(1) == 0


class TestConvolution:
    """Test the toral convolution product"""

    def test_deltas_add(self, pgl2):
        """delta_1 * delta_-1 = delta_0"""
        rd, ring = pgl2
        a = ToralElement.delta(rd, ring, (1,))
        b = ToralElement.delta(rd, ring, (-1,))
        assert a * b == ToralElement.one(rd, ring)

    def test_cup_in_values(self, pgl2):
        """Values multiply by cup product"""
        rd, ring = pgl2
        a = ToralElement.delta(rd, ring, (1,), ring.x(0))
        b = ToralElement.delta(rd, ring, (2,), ring.y(0))
        assert (a * b).value((3,)) == cup(ring.x(0), ring.y(0))

    def test_truncation(self, pgl2):
        """Support and degree bounds drop terms"""
        rd, ring = pgl2
        a = ToralElement.delta(rd, ring, (1,), ring.y(0))
        assert toral_convolve(a, a, support_bound=1).is_zero()
        assert toral_convolve(a, a, degree_bound=3).is_zero()

    def test_mismatched_rings(self, pgl2):
        """Elements over different rings do not multiply"""
        rd, ring = pgl2
        other = torus_coh_ring(rd, 7, make_coeff(3, 1), max_degree=8)
        with pytest.raises(InputError):
            ToralElement.one(rd, ring) * ToralElement.one(rd, other)


class TestSphericalElements:
    """Test Weyl-invariant elements"""

    def test_satake_basis(self, pgl2):
        """The basis element at 1 with value x is x at 1 and -x at -1"""
        rd, ring = pgl2
        h = satake_basis(rd, ring, (1,), ring.x(0))
        assert h.value((1,)) == ring.x(0)
        assert h.value((-1,)) == -ring.x(0)
        assert h.is_invariant()

    def test_satake_basis_stabilizer(self, pgl2):
        """At 0 the value must be W-invariant"""
        rd, ring = pgl2
        with pytest.raises(InputError):
            satake_basis(rd, ring, (0,), ring.x(0))
        with pytest.raises(InputError):
            satake_basis(rd, ring, (-1,), ring.one())

    def test_non_invariant_rejected(self, pgl2):
        """A delta away from 0 is not spherical"""
        rd, ring = pgl2
        with pytest.raises(InputError):
            SphericalElement(rd, ring, {(1,): ring.one()})

    def test_symmetrize(self, pgl2):
        """Averaging over W with 1/2 = 2 mod 3"""
        rd, ring = pgl2
        h = symmetrize(ToralElement.delta(rd, ring, (1,), ring.x(0)))
        assert h.value((1,)) == ring.x(0).scale(2)
        assert h.value((-1,)) == ring.x(0)

    def test_graded_commutativity(self, pgl2):
        """Spherical products commute up to the Koszul sign"""
        rd, ring = pgl2
        a = satake_basis(rd, ring, (1,), ring.x(0))
        b = satake_basis(rd, ring, (2,), ring.x(0))
        c = satake_basis(rd, ring, (1,), ring.y(0))
        assert a * b == -(b * a)
        assert a * c == c * a
        assert isinstance(a * b, SphericalElement)


class TestPresentation:
    """Test invariant ranks per shell"""

    @pytest.mark.parametrize("support", [1, 2, 3])
    def test_pgl2_dims(self, support):
        """Ranks are N + 1, N, N in degrees 0, 1, 2"""
        rd = build_root_datum("PGL2")
        df = invariant_dims(rd, AbelianLGroup(3, (1,)), make_coeff(3, 1), support, 2)
        assert presentation_dims(df) == {0: support + 1, 1: support, 2: support}

    def test_frame_columns(self):
        """One row per shell and degree"""
        rd = build_root_datum("PGL2")
        df = invariant_dims(rd, AbelianLGroup(3, (1,)), make_coeff(3, 1), 2, 1)
        assert list(df.columns) == ["shell", "orbit_size", "degree", "rank"]
        assert len(df) == 6


class TestCoefficientsAndEvaluation:
    """Test coefficient change, evaluation and payloads"""

    def test_coeff_change(self):
        """Reduction from Z/9 to Z/3 over F_19"""
        rd = build_root_datum("PGL2")
        ring = torus_coh_ring(rd, 19, make_coeff(3, 2))
        a = ToralElement.delta(rd, ring, (1,), ring.x(0).scale(4))
        reduced = a.coeff_change(1)
        assert reduced.ring.modulus == 3
        assert reduced.value((1,)) == reduced.ring.x(0)

    def test_evaluate(self, pgl2):
        """delta_1 + delta_-1 at chi(1) = 2 is 2 + 2 = 1 mod 3"""
        rd, ring = pgl2
        a = ToralElement.delta(rd, ring, (1,)) + ToralElement.delta(rd, ring, (-1,))
        assert a.evaluate([2]) == ring.one()

    def test_payload(self, pgl2):
        """Elements are read from JSON payloads"""
        rd, ring = pgl2
        a = satake_basis(rd, ring, (1,), ring.x(0))
        assert ToralElement.from_json(rd, ring, a.to_json()) == a
        with pytest.raises(InputError):
            ToralElement.from_json(rd, ring, {"values": []})

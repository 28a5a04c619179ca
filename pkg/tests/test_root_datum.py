import json

import pytest

from src.hecke.core.errors import InputError, NonUnitError
from src.hecke.core.lattice_algebra import LatticeElement, character_value
from src.hecke.core.root_datum import (
    AffineWeylElement, DualElement, alpha_star, build_root_datum, discriminant, e_psi_g, load_root_datum, torus_datum,
)


class TestCatalog:
    """Test the built-in root data"""

    @pytest.mark.parametrize("name,order", [("SL2", 2), ("PGL2", 2), ("SL3", 6), ("Sp4", 8)])
    def test_weyl_orders(self, name, order):
        """Weyl groups have the expected orders"""
        assert build_root_datum(name).weyl_order == order

    def test_unknown_group(self):
        """Unknown names raise an input error"""
        with pytest.raises(InputError):
            build_root_datum("G2")

    def test_torus_datum(self):
        """A torus has a trivial Weyl group"""
        rd = torus_datum(2)
        assert rd.weyl_order == 1
        assert rd.rank == 2

    def test_bad_descriptor(self):
        """A root paired with its coroot must give 2"""
        with pytest.raises(InputError):
            build_root_datum({"name": "bad", "roots": [[1], [-1]], "coroots": [[1], [-1]], "simple": [0]})

    def test_load_descriptor(self, tmp_path):
        """Descriptors load from JSON files"""
        path = tmp_path / "pgl2.json"
        path.write_text(json.dumps({"name": "PGL2x", "roots": [[1], [-1]], "coroots": [[2], [-2]], "simple": [0]}))
        rd = load_root_datum(str(path))
        assert rd.weyl_order == 2
        assert rd.name == "PGL2x"

    def test_load_invalid_json(self, tmp_path):
        """Broken JSON reports its location"""
        path = tmp_path / "broken.json"
        path.write_text("{\"roots\": [")
        with pytest.raises(InputError, match="line"):
            load_root_datum(str(path))


class TestWeylGroup:
    """Test Weyl group operations"""

    def test_pgl2_reflection(self):
        """The nontrivial element of W(PGL2) negates X_*"""
        rd = build_root_datum("PGL2")
        assert rd.weyl_elements[1].apply((1,)) == (-1,)

    def test_inverses(self):
        """w w^{-1} = 1 for every element of W(Sp4)"""
        rd = build_root_datum("Sp4")
        for w in rd.weyl_elements:
            assert rd.multiply(w.index, rd.inverse(w.index)) == 0

    def test_simple_reflections_are_involutions(self):
        """Simple reflections have order 2"""
        rd = build_root_datum("SL3")
        for s in rd.simple_reflections():
            assert rd.element_order(s.index) == 2

    def test_words(self):
        """Elements are recovered from their reduced words"""
        rd = build_root_datum("SL3")
        for w in rd.weyl_elements:
            assert rd.element_from_word(w.word) == w

    def test_orbit_of_coroot(self):
        """W permutes the coroots of SL3"""
        rd = build_root_datum("SL3")
        assert rd.orbit((1, 0)) == sorted(rd.coroots)

    def test_dominant_coweights(self):
        """Dominant coweights of PGL2 are the non-negative integers"""
        rd = build_root_datum("PGL2")
        assert rd.dominant_coweights(2) == [(0,), (1,), (2,)]
        assert rd.dominant_representative((-2,))[0] == (2,)

    def test_affine_multiply(self):
        """(t_mu s)(t_mu) = s for PGL2"""
        rd = build_root_datum("PGL2")
        product = rd.affine_multiply(AffineWeylElement((1,), 1), AffineWeylElement((1,), 0))
        assert product == AffineWeylElement((0,), 1)


class TestDiscriminant:
    """Test the discriminant and alpha^*"""

    def test_alpha_star(self):
        """For PGL2 alpha^* is the coroot"""
        rd = build_root_datum("PGL2")
        assert alpha_star(rd, 0) == (2,)
        assert alpha_star(rd, [-1]) == (-2,)

    def test_pgl2_discriminant(self):
        """(1 - d2)(1 - d-2) = 2 - d2 - d-2"""
        f = discriminant(build_root_datum("PGL2"), 7)
        assert f.coeffs == {(0,): 2, (2,): 6, (-2,): 6}

    def test_discriminant_invariant(self):
        """The discriminant is W-invariant"""
        rd = build_root_datum("Sp4")
        assert discriminant(rd, 5).is_invariant(rd.weyl_matrices())


class TestDualElements:
    """Test e_psi_g on the rank-one dual group"""

    def test_e_psi_g_diagonal(self):
        """g = diag(2, 5) mod 9 gives diag(6, 3)"""
        g = DualElement(((2, 0), (0, 5)), 9)
        assert e_psi_g(1, g) == [[6, 0], [0, 3]]

    def test_e_psi_g_matches_cayley_hamilton(self):
        """For k = 1 the image is 2g - trace(g)"""
        g = DualElement(((1, 1), (1, 2)), 7)
        expected = [[(2 * 1 - 3) % 7, 2], [2, (2 * 2 - 3) % 7]]
        assert e_psi_g(1, g) == expected

    def test_scalar_rejected(self):
        """Scalar elements are not regular semisimple"""
        g = DualElement(((1, 0), (0, 1)), 9)
        assert not g.is_regular_semisimple()
        with pytest.raises(InputError):
            e_psi_g(1, g)

    def test_singular_rejected(self):
        """Dual elements must be invertible"""
        with pytest.raises(InputError):
            DualElement(((3, 0), (0, 3)), 9)


class TestLattice:
    """Test the group algebra of X_*"""

    def test_multiplication(self):
        """delta_a * delta_b = delta_{a+b}"""
        a = LatticeElement.monomial(1, 7, (1,))
        b = LatticeElement.monomial(1, 7, (-1,), 3)
        assert (a * b).coeffs == {(0,): 3}

    def test_evaluate(self):
        """Evaluation at a character"""
        f = LatticeElement(1, 7, {(1,): 1, (-1,): 1})
        assert f.evaluate([2]) == (2 + 4) % 7

    def test_character_value_non_unit(self):
        """Negative exponents need unit values"""
        assert character_value([2], [-1], 7) == 4
        with pytest.raises(NonUnitError):
            character_value([3], [-1], 9)


class TestPackageExports:
    """Test the top-level re-exports"""

    def test_entry_points_exported(self):
        """Import errors inside the package are not swallowed"""
        import src.hecke as hecke

        assert hecke.__version__ == "1.0.0"
        assert hecke.build_root_datum("PGL2").name == "PGL2"
        assert issubclass(hecke.RegimeError, hecke.HeckeError)
        assert callable(hecke.run_suites)

import json

import pytest

from src.hecke.core.coeff_groups import AbelianLGroup, make_coeff
from src.hecke.core.errors import CompatibilityError, InputError
from src.hecke.verification.torus_manifold import (
    Endomorphism, ManifoldClass, Place, TorusManifold, action_endomorphism, congruence_class, derived_act,
    exterior_generation_report, intertwining_report, limit_assemble, load_manifold,
)

S3 = make_coeff(3, 1)


@pytest.fixture
def plane():
    """delta = 2 with T_v = (Z/3)^2 and the identity reduction"""
    return TorusManifold(2, [Place("v", AbelianLGroup(3, (1, 1)), ((1, 0), (0, 1)))])


@pytest.fixture
def deep():
    """delta = 2 with T_w = (Z/27)^2, for precisions up to 3"""
    return TorusManifold(2, [Place("w", AbelianLGroup(3, (3, 3)), ((1, 0), (0, 1)))])


class TestManifoldClasses:
    """Test the exterior algebra on Hom(Delta, S)"""

    def test_sign_on_construction(self):
        """e_1 e_0 = -e_0 e_1"""
        assert ManifoldClass(2, S3, {(1, 0): 1}) == ManifoldClass(2, S3, {(0, 1): 2})

    def test_wedge(self):
        """Degree-one classes anticommute and square to zero"""
        a = ManifoldClass.degree_one(2, S3, [1, 0])
        b = ManifoldClass.degree_one(2, S3, [0, 1])
        assert (a * a).is_zero()
        assert a * b == -(b * a)
        assert (a * b).degrees() == [2]

    def test_reduce_to(self):
        """Coefficients reduce from Z/9 to Z/3"""
        a = ManifoldClass.degree_one(2, make_coeff(3, 2), [4, 3])
        assert a.reduce_to(1) == ManifoldClass.degree_one(2, S3, [1, 0])


class TestCongruenceClasses:
    """Test classes pulled back from a place"""

    def test_first_generator(self, plane):
        """alpha = (1, 0) gives the class e_0"""
        xi = congruence_class(plane, "v", [1, 0], S3)
        assert xi == ManifoldClass.degree_one(2, S3, [1, 0])
        assert not xi.is_zero()

    def test_unknown_place(self, plane):
        """Places are looked up by label"""
        with pytest.raises(InputError):
            congruence_class(plane, "u", [1, 0], S3)

    def test_alpha_must_respect_orders(self):
        """alpha on Z/3 must land in the 3-torsion of S"""
        m = TorusManifold(1, [Place("v", AbelianLGroup(3, (1,)), ((1,),))])
        with pytest.raises(InputError):
            congruence_class(m, "v", [1], make_coeff(3, 2))
        assert congruence_class(m, "v", [3], make_coeff(3, 2)).terms == {(0,): 3}

    def test_matrix_shape(self):
        """The reduction matrix is rank(T_v) x delta"""
        with pytest.raises(InputError):
            TorusManifold(2, [Place("v", AbelianLGroup(3, (1,)), ((1,),))])

    def test_derived_action(self, plane):
        """act(a)(1) = xi_a, act(a)^2 = 0 and act(a) act(b) = -act(b) act(a)"""
        one = ManifoldClass.one(2, S3)
        xi = congruence_class(plane, "v", [1, 0], S3)
        assert derived_act(plane, "v", [1, 0], one) == xi
        assert derived_act(plane, "v", [1, 0], xi).is_zero()
        ab = derived_act(plane, "v", [1, 0], derived_act(plane, "v", [0, 1], one))
        ba = derived_act(plane, "v", [0, 1], derived_act(plane, "v", [1, 0], one))
        assert ab == -ba


class TestGeneration:
    """Test exterior generation of H*(Y; S)"""

    def test_spanning_choices(self, plane):
        """Ranks 1, 2, 1 and free generation"""
        report = exterior_generation_report(plane, S3, [("v", [1, 0]), ("v", [0, 1])])
        assert report.passed
        assert report.spanning
        assert report.ranks == [1, 2, 1]

    def test_rank_one(self):
        """delta = 1 gives ranks 1, 1"""
        m = TorusManifold(1, [Place("v", AbelianLGroup(3, (1,)), ((1,),))])
        report = exterior_generation_report(m, S3, [("v", [1])])
        assert report.passed
        assert report.ranks == [1, 1]

    def test_deficient_span(self, plane):
        """Classes through a common kernel leave a witness"""
        report = exterior_generation_report(plane, S3, [("v", [1, 0]), ("v", [2, 0])])
        assert not report.passed
        assert not report.spanning
        assert report.witnesses[0]["degree"] == 1
        assert report.witnesses[0]["image_length"] == 1


class TestLimitAssembly:
    """Test assembling endomorphisms across precisions"""

    def _sequence(self, m, alpha, top):
        return {
            n: action_endomorphism(m, "w", [a % 3 ** n for a in alpha], make_coeff(3, n))
            for n in range(1, top + 1)
        }

    def test_assembles_action(self, deep):
        """The limit of act(alpha mod 3^n) is act(alpha) at 3^3"""
        sequence = self._sequence(deep, [1, 2], 3)
        top = limit_assemble(deep, sequence)
        assert top == action_endomorphism(deep, "w", [1, 2], make_coeff(3, 3))
        assert top.reduce_to(1) == sequence[1]

    def test_broken_square(self, deep):
        """An incompatible level reports the first failing square"""
        sequence = self._sequence(deep, [1, 2], 3)
        sequence[2] = Endomorphism.identity(2, make_coeff(3, 2))
        with pytest.raises(CompatibilityError) as info:
            limit_assemble(deep, sequence)
        assert info.value.witness["levels"] == [1, 2]

    def test_wrong_level(self, deep):
        """Level n must carry Z/3^n coefficients"""
        with pytest.raises(InputError):
            limit_assemble(deep, {2: Endomorphism.identity(2, S3)})
        with pytest.raises(InputError):
            limit_assemble(deep, {})

    def test_intertwining(self, deep):
        """Reduction intertwines the actions at every level"""
        assert intertwining_report(deep, "w", [1, 2], 3, 3)["passed"]

    def test_endomorphism_shape(self):
        """Endomorphisms act on a space of rank 2^delta"""
        with pytest.raises(InputError):
            Endomorphism(2, S3, [[1, 0], [0, 1]])

    def test_apply(self, plane):
        """The action matrix sends 1 to the congruence class"""
        t = action_endomorphism(plane, "v", [1, 0], S3)
        assert t.apply(ManifoldClass.one(2, S3)) == congruence_class(plane, "v", [1, 0], S3)


class TestDescriptors:
    """Test loading manifolds from JSON"""

    def test_load(self, tmp_path):
        """Matrices are reduced mod the orders of T_v"""
        path = tmp_path / "torus.json"
        path.write_text(json.dumps({"delta": 2, "places": [{"label": "v", "orders": [3], "matrix": [[4, 0]]}]}))
        m = load_manifold(str(path))
        assert m.delta == 2
        assert m.place("v").matrix == ((1, 0),)
        assert m.cohomology_ranks() == [1, 2, 1]

    def test_invalid_json(self, tmp_path):
        """Broken files raise an input error"""
        path = tmp_path / "broken.json"
        path.write_text("{\"delta\": ")
        with pytest.raises(InputError):
            load_manifold(str(path))

    def test_missing_fields(self, tmp_path):
        """Descriptors need a rank"""
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"places": []}))
        with pytest.raises(InputError):
            load_manifold(str(path))

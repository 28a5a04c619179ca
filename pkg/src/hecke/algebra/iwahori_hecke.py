"""
Iwahori-Hecke algebra at q = 1 in S

With q = 1 the quadratic relation degenerates to T_s^2 = 1 and the algebra is
the group algebra of the extended affine Weyl group X_* x| W. This module
holds that algebra, its idempotent e_K and center, the unramified principal
series V_chi with explicit matrices, the Theta projector, and the derived
Iwahori model restricted to the torus together with its compression to the
spherical algebra.

Normalization: measure(I) = 1, so e_K = (1/|W|) sum_w w and every |W|
that enters a comparison is written out explicitly.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.hecke.algebra.toral_satake import SphericalElement, ToralElement
from src.hecke.core.errors import CompatibilityError, InputError, NonUnitError, OrbitError, RegimeError
from src.hecke.core.finite_cohomology import CohClass, CohRing, cup, weyl_act
from src.hecke.core.lattice_algebra import Coweight, LatticeElement, character_value
from src.hecke.core.modular_linalg import mat_mul, rank_mod_p, zeros
from src.hecke.core.root_datum import RootDatum, discriminant

logger = logging.getLogger(__name__)

# (translation, index of the finite Weyl part) = t_lambda w
AffineKey = Tuple[Coweight, int]


def _inverse_mod(a: int, modulus: int) -> int:
    try:
        return pow(a, -1, modulus)
    except ValueError:
        raise NonUnitError(f"{a} is not a unit mod {modulus}")


def _weyl_inverse_unit(rd: RootDatum, modulus: int) -> int:
    try:
        return _inverse_mod(rd.weyl_order, modulus)
    except NonUnitError:
        raise RegimeError(f"|W| = {rd.weyl_order} is not invertible mod {modulus}")


def _affine_product(rd: RootDatum, a: AffineKey, b: AffineKey) -> AffineKey:
    """(l1, w1)(l2, w2) = (l1 + w1 l2, w1 w2)"""
    moved = rd.weyl_elements[a[1]].apply(b[0])
    return tuple(x + y for x, y in zip(a[0], moved)), rd.multiply(a[1], b[1])


# --- the algebra S[X_* x| W] ---------------------------------------------------------

class IwahoriElement:
    """Finite-support S-valued function on the extended affine Weyl group"""

    def __init__(self, rd: RootDatum, modulus: int, coeffs: Dict[AffineKey, int] = None):
        self.rd = rd
        self.modulus = modulus
        self.coeffs: Dict[AffineKey, int] = {}
        for (lam, w), c in (coeffs or {}).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != rd.rank or not 0 <= w < rd.weyl_order:
                raise InputError(f"({list(lam)}, {w}) is not an element of the affine Weyl group of {rd.name}")
            c = int(c) % modulus
            if c:
                self.coeffs[(lam, w)] = c

    @classmethod
    def basis(cls, rd: RootDatum, modulus: int, lam: Sequence[int] = None, w: int = 0, c: int = 1):
        lam = tuple(lam) if lam is not None else (0,) * rd.rank
        return cls(rd, modulus, {(lam, w): c})

    @classmethod
    def one(cls, rd: RootDatum, modulus: int):
        return cls.basis(rd, modulus)

    @classmethod
    def translation(cls, rd: RootDatum, modulus: int, lam: Sequence[int]):
        return cls.basis(rd, modulus, lam)

    @classmethod
    def weyl(cls, rd: RootDatum, modulus: int, w: int):
        return cls.basis(rd, modulus, None, w)

    @classmethod
    def from_lattice(cls, rd: RootDatum, f: LatticeElement):
        return cls(rd, f.modulus, {(lam, 0): c for lam, c in f.coeffs.items()})

    def _check(self, other: "IwahoriElement"):
        if not isinstance(other, IwahoriElement) or other.rd.name != self.rd.name or other.modulus != self.modulus:
            raise InputError("Iwahori elements over different root data or coefficients")

    def __add__(self, other: "IwahoriElement") -> "IwahoriElement":
        self._check(other)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + c
        return IwahoriElement(self.rd, self.modulus, out)

    def __neg__(self) -> "IwahoriElement":
        return self.scale(-1)

    def __sub__(self, other: "IwahoriElement") -> "IwahoriElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return iwahori_multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, IwahoriElement):
            return NotImplemented
        return self.rd.name == other.rd.name and self.modulus == other.modulus and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"{c}*t{list(lam)}w{list(self.rd.weyl_elements[w].word)}" for (lam, w), c in self.items()
        )

    def scale(self, c: int) -> "IwahoriElement":
        return IwahoriElement(self.rd, self.modulus, {k: v * c for k, v in self.coeffs.items()})

    def items(self) -> List[Tuple[AffineKey, int]]:
        return sorted(self.coeffs.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"translation": list(lam), "weyl": list(self.rd.weyl_elements[w].word), "coeff": c}
            for (lam, w), c in self.items()
        ]

    @classmethod
    def from_json(cls, rd: RootDatum, modulus: int, payload: List[Dict[str, Any]]):
        coeffs: Dict[AffineKey, int] = {}
        try:
            for term in payload:
                key = (tuple(int(x) for x in term["translation"]), rd.element_from_word(term.get("weyl", [])).index)
                coeffs[key] = coeffs.get(key, 0) + int(term["coeff"])
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed Iwahori element payload: {e}")
        return cls(rd, modulus, coeffs)


def iwahori_multiply(a: IwahoriElement, b: IwahoriElement) -> IwahoriElement:
    """Group-algebra convolution on X_* x| W"""
    a._check(b)
    out: Dict[AffineKey, int] = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            key = _affine_product(a.rd, ka, kb)
            out[key] = (out.get(key, 0) + ca * cb) % a.modulus
    return IwahoriElement(a.rd, a.modulus, out)


def e_K(rd: RootDatum, modulus: int) -> IwahoriElement:
    """(1/|W|) sum_w w"""
    inverse = _weyl_inverse_unit(rd, modulus)
    zero = (0,) * rd.rank
    return IwahoriElement(rd, modulus, {(zero, w.index): inverse for w in rd.weyl_elements})


def central_embed(rd: RootDatum, z: LatticeElement) -> IwahoriElement:
    """Z = S[X_*]^W -> center of S[X_* x| W]"""
    if z.rank != rd.rank:
        raise InputError(f"lattice element of rank {z.rank} for {rd.name} of rank {rd.rank}")
    if not z.is_invariant(rd.weyl_matrices()):
        raise InputError(f"{z} is not Weyl-invariant")
    return IwahoriElement.from_lattice(rd, z)


def spanning_set(rd: RootDatum, modulus: int, radius: int) -> List[IwahoriElement]:
    """Basis elements t_lambda w with sup-norm(lambda) <= radius"""
    return [
        IwahoriElement.basis(rd, modulus, lam, w.index) for lam in _box(rd.rank, radius) for w in rd.weyl_elements
    ]


def _box(rank: int, radius: int) -> List[Coweight]:
    points: List[Coweight] = [()]
    for _ in range(rank):
        points = [p + (x,) for p in points for x in range(-radius, radius + 1)]
    return points


@dataclass
class CenterReport:
    passed: bool
    violations: List[str] = field(default_factory=list)
    checked: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "violations": self.violations, "checked": self.checked}


def center_report(rd: RootDatum, z: LatticeElement, radius: int = 3) -> CenterReport:
    """central_embed(z) commutes with the spanning set, and e_K z e_K = e_K z"""
    central = central_embed(rd, z)
    violations = []
    elements = spanning_set(rd, z.modulus, radius)
    for x in elements:
        if central * x != x * central:
            (lam, w), _ = x.items()[0]
            violations.append(f"does not commute with t{list(lam)}w{list(rd.weyl_elements[w].word)}")
    idempotent = e_K(rd, z.modulus)
    if idempotent * central * idempotent != idempotent * central:
        violations.append("e_K z e_K != e_K z")
    return CenterReport(passed=not violations, violations=violations, checked=len(elements))


# --- characters of X_* and the discriminant ------------------------------------------

@dataclass(frozen=True)
class TorusCharacter:
    """chi: X_* -> k^x given by its values on the standard basis"""
    values: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        values = tuple(int(v) % self.modulus for v in self.values)
        object.__setattr__(self, "values", values)

    def __call__(self, lam: Sequence[int]) -> int:
        return character_value(self.values, lam, self.modulus)

    @property
    def rank(self) -> int:
        return len(self.values)

    def is_unitary(self) -> bool:
        """All values invertible, so chi extends from X_*^+ to X_*"""
        return all(gcd(v, self.modulus) == 1 for v in self.values)

    def act(self, rd: RootDatum, w) -> "TorusCharacter":
        """(w chi)(lambda) = chi(w^{-1} lambda)"""
        index = getattr(w, "index", w)
        inverse = rd.weyl_elements[rd.inverse(index)].matrix
        columns = [tuple(inverse[i][j] for i in range(rd.rank)) for j in range(rd.rank)]
        return TorusCharacter(tuple(self(c) for c in columns), self.modulus)

    def orbit(self, rd: RootDatum) -> List["TorusCharacter"]:
        return [self.act(rd, w) for w in rd.weyl_elements]

    def is_free_orbit(self, rd: RootDatum) -> bool:
        return len(set(self.orbit(rd))) == rd.weyl_order

    def fixed_by_reflection(self, rd: RootDatum) -> bool:
        for i in range(len(rd.roots)):
            s = rd.element_from_matrix(rd.reflection_matrix(i))
            if self.act(rd, s) == self:
                return True
        return False

    def to_dict(self) -> Dict[str, Any]:
        return {"values": list(self.values), "modulus": self.modulus}


def chi_t(rd: RootDatum, t_values: Sequence[int], modulus: int) -> TorusCharacter:
    """The character of k[X_*^+] given by evaluation at a dual-torus point t"""
    if len(t_values) != rd.rank:
        raise InputError(f"{rd.name} needs {rd.rank} character values, got {len(t_values)}")
    return TorusCharacter(tuple(t_values), modulus)


def discriminant_eval(f: LatticeElement, chi: TorusCharacter) -> int:
    return f.evaluate(chi.values, chi.modulus)


# --- the induced representation V_chi ------------------------------------------------

@dataclass
class InducedRep:
    """
    V_chi = Ind(chi) restricted to Iwahori invariants, with basis v_w for w in W
    (BFS order). lambda . v_w = (w chi)(lambda) v_w and u . v_w = v_{uw}.
    """
    rd: RootDatum
    character: TorusCharacter

    @property
    def p(self) -> int:
        return self.character.modulus

    @property
    def dimension(self) -> int:
        return self.rd.weyl_order

    def translation_matrix(self, lam: Sequence[int]) -> np.ndarray:
        matrix = zeros(self.dimension, self.dimension)
        for w in self.rd.weyl_elements:
            matrix[w.index, w.index] = self.character.act(self.rd, w)(lam)
        return matrix

    def weyl_matrix(self, u: int) -> np.ndarray:
        matrix = zeros(self.dimension, self.dimension)
        for w in self.rd.weyl_elements:
            matrix[self.rd.multiply(u, w.index), w.index] = 1
        return matrix

    def matrix_of(self, x: IwahoriElement) -> np.ndarray:
        total = zeros(self.dimension, self.dimension)
        for (lam, w), c in x.coeffs.items():
            total = (total + c * mat_mul(self.translation_matrix(lam), self.weyl_matrix(w), self.p)) % self.p
        return total

    def e_K_matrix(self) -> np.ndarray:
        return self.matrix_of(e_K(self.rd, self.p))

    def relations_report(self, radius: int = 1) -> Dict[str, bool]:
        """Defining relations of X_* x| W hold for the matrices"""
        identity = self.matrix_of(IwahoriElement.one(self.rd, self.p))
        involutions = all(
            np.array_equal(mat_mul(self.weyl_matrix(s.index), self.weyl_matrix(s.index), self.p), identity)
            for s in self.rd.simple_reflections()
        )
        box = _box(self.rd.rank, radius)
        commuting = all(
            np.array_equal(
                mat_mul(self.translation_matrix(a), self.translation_matrix(b), self.p),
                mat_mul(self.translation_matrix(b), self.translation_matrix(a), self.p),
            )
            for a in box for b in box
        )
        conjugation = True
        for u in self.rd.weyl_elements:
            for lam in box:
                left = mat_mul(self.weyl_matrix(u.index), self.translation_matrix(lam), self.p)
                right = mat_mul(self.translation_matrix(u.apply(lam)), self.weyl_matrix(u.index), self.p)
                conjugation = conjugation and np.array_equal(left, right)
        return {"involutions": involutions, "translations_commute": commuting, "conjugation": conjugation}


def induced_rep(rd: RootDatum, p: int, chi: Sequence[int]) -> InducedRep:
    character = chi if isinstance(chi, TorusCharacter) else chi_t(rd, chi, p)
    if not character.is_unitary():
        raise InputError(f"character values {list(character.values)} are not all units mod {p}")
    return InducedRep(rd, character)


@dataclass
class MoritaReport:
    """Ranks of the images of S[X_* x| W] in the four Hom spaces between V^I and V^K"""
    applicable: bool
    passed: bool
    ranks: Dict[str, int]
    expected: Dict[str, int]
    violations: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "applicable": self.applicable,
            "passed": self.passed,
            "ranks": self.ranks,
            "expected": self.expected,
            "violations": self.violations,
        }


def _span_rank(matrices: List[np.ndarray], p: int) -> int:
    rows = [[int(v) for v in m.flatten()] for m in matrices]
    return rank_mod_p(rows, p) if rows else 0


def morita_check(rd: RootDatum, p: int, chi: Sequence[int], radius: int = 2) -> MoritaReport:
    rep = induced_rep(rd, p, chi)
    character = rep.character
    violations = []
    disc_value = discriminant_eval(discriminant(rd, p), character)
    if disc_value == 0:
        violations.append("discriminant vanishes at chi (not strongly regular)")
    if not character.is_free_orbit(rd):
        violations.append("chi is fixed by a nontrivial Weyl element (not regular)")
    applicable = not violations

    n = rd.weyl_order
    matrices = [rep.matrix_of(x) for x in spanning_set(rd, p, radius)]
    idempotent = rep.e_K_matrix()
    ranks = {
        "II": _span_rank(matrices, p),
        "KI": _span_rank([mat_mul(idempotent, m, p) for m in matrices], p),
        "IK": _span_rank([mat_mul(m, idempotent, p) for m in matrices], p),
        "KK": _span_rank([mat_mul(mat_mul(idempotent, m, p), idempotent, p) for m in matrices], p),
    }
    expected = {"II": n * n, "KI": n, "IK": n, "KK": 1}
    if applicable:
        for key, value in expected.items():
            if ranks[key] != value:
                violations.append(f"{key} image has rank {ranks[key]}, expected {value}")
    else:
        logger.info(f"Morita check for {rd.name} at chi={list(character.values)} is not applicable")
    return MoritaReport(
        applicable=applicable,
        passed=applicable and not violations,
        ranks=ranks,
        expected=expected,
        violations=violations,
    )


# --- the Theta projector --------------------------------------------------------------

def theta_projector(rd: RootDatum, chi: TorusCharacter, refinement_steps: int = 0) -> LatticeElement:
    """
    Theta in k[X_*] with Theta(chi) = 1 and Theta(w chi) = 0 for w != 1.

    Built as a product of separators (lambda_w - (w chi)(lambda_w)) /
    (chi(lambda_w) - (w chi)(lambda_w)), lambda_w a basis vector on which chi and
    w chi differ. refinement_steps applies Theta <- 3 Theta^2 - 2 Theta^3, which
    keeps the orbit values and sharpens the idempotent over Z/l^r.
    """
    if chi.rank != rd.rank:
        raise InputError(f"character of rank {chi.rank} for {rd.name} of rank {rd.rank}")
    modulus = chi.modulus
    theta = LatticeElement.constant(rd.rank, modulus, 1)
    for w in rd.weyl_elements[1:]:
        moved = chi.act(rd, w)
        separator = None
        for i in range(rd.rank):
            basis_vector = tuple(int(j == i) for j in range(rd.rank))
            gap = (chi(basis_vector) - moved(basis_vector)) % modulus
            try:
                inverse = _inverse_mod(gap, modulus)
            except NonUnitError:
                continue
            separator = (
                LatticeElement.monomial(rd.rank, modulus, basis_vector)
                - LatticeElement.constant(rd.rank, modulus, moved(basis_vector))
            ).scale(inverse)
            break
        if separator is None:
            raise OrbitError(
                f"orbit of chi = {list(chi.values)} is not free: Weyl word {list(w.word)} "
                f"cannot be separated mod {modulus}"
            )
        theta = theta * separator
    for _ in range(refinement_steps):
        square = theta * theta
        theta = square.scale(3) - (square * theta).scale(2)
    logger.debug(f"Theta for {rd.name} at chi={list(chi.values)}: {len(theta.coeffs)} terms")
    return theta


def theta_values(rd: RootDatum, chi: TorusCharacter, theta: LatticeElement) -> List[int]:
    """Theta(w chi) for w in BFS order"""
    return [discriminant_eval(theta, chi.act(rd, w)) for w in rd.weyl_elements]


# --- derived Iwahori model on the torus -----------------------------------------------

class DerivedIwahoriElement:
    """Finite-support map X_* x| W -> H*(T; S), one-variable form"""

    def __init__(self, rd: RootDatum, ring: CohRing, values: Dict[AffineKey, CohClass] = None):
        self.rd = rd
        self.ring = ring
        self.values: Dict[AffineKey, CohClass] = {}
        for (lam, w), cls in (values or {}).items():
            if cls.ring != ring:
                raise InputError("derived Iwahori values over different cohomology rings")
            if not cls.is_zero():
                self.values[(tuple(lam), w)] = cls

    @classmethod
    def cohomology(cls, rd: RootDatum, h: CohClass):
        """<h>: h supported at the identity"""
        return cls(rd, h.ring, {((0,) * rd.rank, 0): h})

    @classmethod
    def from_iwahori(cls, x: IwahoriElement, ring: CohRing):
        if x.modulus != ring.modulus:
            raise InputError(f"Iwahori coefficients mod {x.modulus} against cohomology mod {ring.modulus}")
        return cls(x.rd, ring, {key: ring.scalar(c) for key, c in x.coeffs.items()})

    def _check(self, other: "DerivedIwahoriElement"):
        if other.rd.name != self.rd.name or other.ring != self.ring:
            raise InputError("derived Iwahori elements over different data")

    def __add__(self, other: "DerivedIwahoriElement") -> "DerivedIwahoriElement":
        self._check(other)
        out = dict(self.values)
        for key, cls in other.values.items():
            out[key] = out[key] + cls if key in out else cls
        return DerivedIwahoriElement(self.rd, self.ring, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return derived_iwahori_multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DerivedIwahoriElement):
            return NotImplemented
        return self.rd.name == other.rd.name and self.ring == other.ring and self.values == other.values

    def __repr__(self) -> str:
        if not self.values:
            return "0"
        return " + ".join(f"t{list(lam)}w{w}*({cls})" for (lam, w), cls in sorted(self.values.items()))

    def scale(self, c: int) -> "DerivedIwahoriElement":
        return DerivedIwahoriElement(self.rd, self.ring, {k: v.scale(c) for k, v in self.values.items()})

    def value(self, lam: Sequence[int], w: int = 0) -> CohClass:
        return self.values.get((tuple(lam), w), self.ring.zero())


def derived_iwahori_multiply(a: DerivedIwahoriElement, b: DerivedIwahoriElement) -> DerivedIwahoriElement:
    """(a.b)(s1 s2) += a(s1) cup w(s1).b(s2)"""
    a._check(b)
    out: Dict[AffineKey, CohClass] = {}
    for ka, ca in a.values.items():
        twist = a.rd.weyl_elements[ka[1]]
        for kb, cb in b.values.items():
            key = _affine_product(a.rd, ka, kb)
            product = cup(ca, weyl_act(twist, cb))
            out[key] = out[key] + product if key in out else product
    return DerivedIwahoriElement(a.rd, a.ring, out)


def spherical_readoff(y: DerivedIwahoriElement) -> ToralElement:
    """Sph(Y)(nu) = sum_u Y(nu, u)"""
    values: Dict[Coweight, CohClass] = {}
    for (lam, _), cls in y.values.items():
        values[lam] = values[lam] + cls if lam in values else cls
    return ToralElement(y.rd, y.ring, values)


def spherical_compress(rd: RootDatum, theta: LatticeElement, h: CohClass,
                       chi: Optional[TorusCharacter] = None) -> SphericalElement:
    """
    |W| e_K Theta <h> e_K, read off as a spherical element.

    The result equals sum_w w.(Theta (x) h). When chi is given it is also
    checked to be theta(h): ev_chi = h and ev_{w chi} = w.h.
    """
    ring = h.ring
    if theta.modulus != ring.modulus:
        raise InputError(f"Theta mod {theta.modulus} against cohomology mod {ring.modulus}")
    idempotent = DerivedIwahoriElement.from_iwahori(e_K(rd, ring.modulus), ring)
    theta_part = DerivedIwahoriElement.from_iwahori(IwahoriElement.from_lattice(rd, theta), ring)
    product = idempotent * theta_part * DerivedIwahoriElement.cohomology(rd, h) * idempotent
    compressed = spherical_readoff(product.scale(rd.weyl_order))

    expected = ToralElement.zero(rd, ring)
    base = ToralElement.from_lattice(theta, rd, ring, h)
    for w in rd.weyl_elements:
        expected = expected + base.act(w)
    if compressed != expected:
        raise CompatibilityError(
            "compression does not match the Weyl sum of Theta (x) h",
            witness={"compressed": compressed.to_json(), "weyl_sum": expected.to_json()},
        )
    result = SphericalElement.from_toral(compressed)

    if chi is not None:
        if chi.modulus != ring.modulus:
            raise InputError(f"character mod {chi.modulus} against cohomology mod {ring.modulus}")
        for w in rd.weyl_elements:
            value = result.evaluate(chi.act(rd, w).values)
            if value != weyl_act(w, h):
                raise CompatibilityError(
                    f"ev at w chi differs from w.h for Weyl word {list(w.word)}",
                    witness={"weyl_word": list(w.word), "value": value.to_json(), "expected": weyl_act(w, h).to_json()},
                )
    logger.info(f"Compressed Theta (x) h for {rd.name}: support {len(result.support())}")
    return result

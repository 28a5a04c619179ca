"""
Arithmetic manifolds of anisotropic tori

Y is a classifying space for a lattice Delta = Z^delta, so H*(Y; S) is the
exterior algebra on Hom(Delta, S). Each place v comes with a reduction map
Delta -> T_v; congruence classes are pulled back along it, and the derived
Hecke action for a torus is cup product with those classes. Endomorphisms
given at each precision p^n are assembled into one at the top precision
after their compatibility squares are checked.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from src.hecke.core.coeff_groups import AbelianLGroup, CoeffRing, make_coeff
from src.hecke.core.errors import CompatibilityError, InputError
from src.hecke.core.finite_cohomology import merge_exterior
from src.hecke.core.modular_linalg import as_matrix, image_length

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]


def exterior_basis(delta: int, degree: int = None) -> List[Subset]:
    """Subsets of range(delta), by degree then lexicographic"""
    degrees = range(delta + 1) if degree is None else [degree]
    return [J for k in degrees for J in itertools.combinations(range(delta), k)]


class ManifoldClass:
    """Element of wedge* Hom(Delta, Z/p^n)"""

    def __init__(self, delta: int, coeff: CoeffRing, terms: Dict[Sequence[int], int] = None):
        self.delta = delta
        self.coeff = coeff
        self.terms: Dict[Subset, int] = {}
        for J, c in (terms or {}).items():
            J = tuple(J)
            if any(not 0 <= j < delta for j in J):
                raise InputError(f"index set {list(J)} outside rank {delta}")
            if len(set(J)) != len(J):
                continue
            sign = (-1) ** sum(1 for a in range(len(J)) for b in range(a + 1, len(J)) if J[a] > J[b])
            key = tuple(sorted(J))
            self.terms[key] = (self.terms.get(key, 0) + sign * int(c)) % coeff.modulus
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def one(cls, delta: int, coeff: CoeffRing) -> "ManifoldClass":
        return cls(delta, coeff, {(): 1})

    @classmethod
    def degree_one(cls, delta: int, coeff: CoeffRing, values: Sequence[int]) -> "ManifoldClass":
        if len(values) != delta:
            raise InputError(f"a degree-one class on Z^{delta} needs {delta} values, got {len(values)}")
        return cls(delta, coeff, {(i,): c for i, c in enumerate(values)})

    @classmethod
    def from_vector(cls, delta: int, coeff: CoeffRing, vector: Sequence[int]) -> "ManifoldClass":
        return cls(delta, coeff, dict(zip(exterior_basis(delta), vector)))

    def _check(self, other: "ManifoldClass"):
        if self.delta != other.delta or self.coeff != other.coeff:
            raise InputError("manifold classes of different rank or coefficients")

    def __add__(self, other: "ManifoldClass") -> "ManifoldClass":
        self._check(other)
        out = dict(self.terms)
        for J, c in other.terms.items():
            out[J] = out.get(J, 0) + c
        return ManifoldClass(self.delta, self.coeff, out)

    def __neg__(self) -> "ManifoldClass":
        return self.scale(-1)

    def __sub__(self, other: "ManifoldClass") -> "ManifoldClass":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return self.wedge(other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, ManifoldClass):
            return NotImplemented
        return self.delta == other.delta and self.coeff == other.coeff and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*e{list(J)}" for J, c in sorted(self.terms.items()))

    def scale(self, c: int) -> "ManifoldClass":
        return ManifoldClass(self.delta, self.coeff, {J: v * c for J, v in self.terms.items()})

    def wedge(self, other: "ManifoldClass") -> "ManifoldClass":
        self._check(other)
        out: Dict[Subset, int] = {}
        for A, a in self.terms.items():
            for B, b in other.terms.items():
                merged = merge_exterior(A, B)
                if merged is None:
                    continue
                sign, J = merged
                out[J] = out.get(J, 0) + sign * a * b
        return ManifoldClass(self.delta, self.coeff, out)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({len(J) for J in self.terms})

    def component(self, degree: int) -> "ManifoldClass":
        return ManifoldClass(self.delta, self.coeff, {J: c for J, c in self.terms.items() if len(J) == degree})

    def vector(self, degree: int = None) -> List[int]:
        return [self.terms.get(J, 0) for J in exterior_basis(self.delta, degree)]

    def reduce_to(self, m: int) -> "ManifoldClass":
        """Coefficient change Z/p^n -> Z/p^m"""
        return ManifoldClass(self.delta, self.coeff.reduce_to(m), self.terms)

    def to_json(self) -> List[Dict[str, Any]]:
        return [{"indices": list(J), "coeff": c} for J, c in sorted(self.terms.items())]


@dataclass(frozen=True)
class Place:
    """A place v with its reduction map Delta -> T_v (matrix of shape rank(T_v) x delta)"""
    label: str
    group: AbelianLGroup
    matrix: Tuple[Tuple[int, ...], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "orders": list(self.group.orders), "matrix": [list(r) for r in self.matrix]}


@dataclass
class TorusManifold:
    delta: int
    places: List[Place] = field(default_factory=list)

    def __post_init__(self):
        if self.delta < 0:
            raise InputError(f"rank delta must be >= 0, got {self.delta}")
        labels = set()
        checked = []
        for place in self.places:
            if place.label in labels:
                raise InputError(f"duplicate place label {place.label}")
            labels.add(place.label)
            rows = tuple(tuple(int(c) for c in row) for row in place.matrix)
            if len(rows) != place.group.rank or any(len(row) != self.delta for row in rows):
                raise InputError(
                    f"place {place.label}: reduction matrix must be {place.group.rank}x{self.delta}"
                )
            reduced = tuple(tuple(c % o for c in row) for row, o in zip(rows, place.group.orders))
            checked.append(Place(place.label, place.group, reduced))
        self.places = checked

    def place(self, label: str) -> Place:
        for place in self.places:
            if place.label == label:
                return place
        raise InputError(f"unknown place {label}; known: {[p.label for p in self.places]}")

    def cohomology_ranks(self) -> List[int]:
        return [comb(self.delta, k) for k in range(self.delta + 1)]

    def to_dict(self) -> Dict[str, Any]:
        return {"delta": self.delta, "places": [p.to_dict() for p in self.places]}


def manifold_from_dict(data: Dict[str, Any]) -> TorusManifold:
    try:
        delta = int(data["delta"])
        places = []
        for entry in data.get("places", []):
            group = AbelianLGroup.from_orders(entry["orders"]) if entry["orders"] else AbelianLGroup(2, ())
            places.append(Place(str(entry["label"]), group, tuple(tuple(r) for r in entry["matrix"])))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed manifold descriptor: {e}")
    return TorusManifold(delta, places)


def load_manifold(path: str) -> TorusManifold:
    """Read {delta, places: [{label, orders, matrix}]}"""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    return manifold_from_dict(data)


# --- congruence classes and the derived action ---------------------------------------

def congruence_class(m: TorusManifold, v: str, alpha: Sequence[int], S: CoeffRing) -> ManifoldClass:
    """alpha o r_v, alpha in Hom(T_v, S) given on the generators of T_v"""
    place = m.place(v)
    if len(alpha) != place.group.rank:
        raise InputError(f"alpha needs {place.group.rank} values for place {v}, got {len(alpha)}")
    for j, (a, order) in enumerate(zip(alpha, place.group.orders)):
        if (order * int(a)) % S.modulus:
            raise InputError(
                f"alpha sends generator {j} of order {order} to {a}, not killed by {order} in Z/{S.modulus}"
            )
    values = [
        sum(int(alpha[j]) * place.matrix[j][i] for j in range(place.group.rank)) % S.modulus
        for i in range(m.delta)
    ]
    return ManifoldClass.degree_one(m.delta, S, values)


def derived_act(m: TorusManifold, v: str, alpha: Sequence[int], omega: ManifoldClass) -> ManifoldClass:
    return congruence_class(m, v, alpha, omega.coeff).wedge(omega)


@dataclass
class GenerationReport:
    passed: bool
    ranks: List[int]
    spanning: bool
    violations: List[str] = field(default_factory=list)
    witnesses: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "ranks": self.ranks,
            "spanning": self.spanning,
            "violations": self.violations,
            "witnesses": self.witnesses,
        }


def exterior_generation_report(m: TorusManifold, S: CoeffRing,
                               choices: Sequence[Tuple[str, Sequence[int]]]) -> GenerationReport:
    """
    The classes xi_i = congruence_class(v_i, alpha_i) span Hom(Delta, S), and
    their wedge products applied to 1 fill H^k(Y; S) in every degree.
    """
    classes = [congruence_class(m, v, alpha, S) for v, alpha in choices]
    violations, witnesses = [], []
    k_exp = S.r
    ranks = []
    span_matrix = [[c.terms.get((i,), 0) for c in classes] for i in range(m.delta)]
    spanning = m.delta == 0 or (bool(classes) and image_length(span_matrix, S.ell, k_exp) == m.delta * k_exp)
    if not spanning:
        length = image_length(span_matrix, S.ell, k_exp) if classes else 0
        violations.append("degree-one classes do not span Hom(Delta, S)")
        witnesses.append({"degree": 1, "image_length": length, "expected": m.delta * k_exp,
                          "classes": [c.to_json() for c in classes]})
    for degree in range(m.delta + 1):
        basis = exterior_basis(m.delta, degree)
        ranks.append(len(basis))
        columns = []
        for subset in itertools.combinations(range(len(classes)), degree):
            product = ManifoldClass.one(m.delta, S)
            for i in subset:
                product = classes[i].wedge(product)
            columns.append(product.vector(degree))
        length = image_length([list(r) for r in zip(*columns)], S.ell, k_exp) if columns else 0
        if length != len(basis) * k_exp:
            violations.append(f"wedge products miss part of H^{degree}")
            witnesses.append({"degree": degree, "image_length": length, "expected": len(basis) * k_exp})
    report = GenerationReport(
        passed=not violations,
        ranks=ranks,
        spanning=spanning,
        violations=violations,
        witnesses=witnesses,
    )
    logger.info(f"Exterior generation for delta={m.delta} over Z/{S.modulus}: passed={report.passed}")
    return report


# --- endomorphisms at finite precision -----------------------------------------------

@dataclass
class Endomorphism:
    """A Z/p^n-linear endomorphism of wedge* Hom(Delta, Z/p^n) in the exterior basis"""
    delta: int
    coeff: CoeffRing
    matrix: np.ndarray

    def __post_init__(self):
        size = 2 ** self.delta
        self.matrix = as_matrix(self.matrix) % self.coeff.modulus
        if self.matrix.shape != (size, size):
            raise InputError(f"endomorphism matrix must be {size}x{size}, got {self.matrix.shape}")

    @classmethod
    def from_operator(cls, delta: int, coeff: CoeffRing,
                      operator: Callable[[ManifoldClass], ManifoldClass]) -> "Endomorphism":
        basis = exterior_basis(delta)
        columns = [operator(ManifoldClass(delta, coeff, {J: 1})).vector() for J in basis]
        return cls(delta, coeff, as_matrix([list(r) for r in zip(*columns)]))

    @classmethod
    def identity(cls, delta: int, coeff: CoeffRing) -> "Endomorphism":
        return cls.from_operator(delta, coeff, lambda omega: omega)

    def apply(self, omega: ManifoldClass) -> ManifoldClass:
        vector = as_matrix([[c] for c in omega.vector()], 1)
        image = (self.matrix.dot(vector) % self.coeff.modulus)[:, 0]
        return ManifoldClass.from_vector(self.delta, self.coeff, [int(c) for c in image])

    def reduce_to(self, m: int) -> "Endomorphism":
        return Endomorphism(self.delta, self.coeff.reduce_to(m), self.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return (self.delta, self.coeff) == (other.delta, other.coeff) and np.array_equal(self.matrix, other.matrix)

    def to_json(self) -> List[List[int]]:
        return [[int(c) for c in row] for row in self.matrix]


def action_endomorphism(m: TorusManifold, v: str, alpha: Sequence[int], S: CoeffRing) -> Endomorphism:
    return Endomorphism.from_operator(m.delta, S, lambda omega: derived_act(m, v, alpha, omega))


def limit_assemble(m: TorusManifold, sequence: Dict[int, Endomorphism]) -> Endomorphism:
    """The endomorphism at the top precision restricting to every t_n"""
    if not sequence:
        raise InputError("limit assembly needs at least one level")
    levels = sorted(sequence)
    primes = {t.coeff.ell for t in sequence.values()}
    if len(primes) != 1:
        raise InputError(f"levels over different primes {sorted(primes)}")
    for n in levels:
        t = sequence[n]
        if t.coeff.r != n or t.delta != m.delta:
            raise InputError(f"level {n} carries an endomorphism of Z/p^{t.coeff.r} on rank {t.delta}")
    top = sequence[levels[-1]]
    for lower, upper in zip(levels, levels[1:]):
        reduced = sequence[upper].reduce_to(lower)
        if reduced != sequence[lower]:
            diff = np.argwhere(reduced.matrix != sequence[lower].matrix)[0]
            i, j = int(diff[0]), int(diff[1])
            raise CompatibilityError(
                f"level {upper} does not reduce to level {lower}",
                witness={
                    "levels": [lower, upper],
                    "entry": [i, j],
                    "reduced": int(reduced.matrix[i, j]),
                    "expected": int(sequence[lower].matrix[i, j]),
                },
            )
    for n in levels:
        if top.reduce_to(n) != sequence[n]:
            raise CompatibilityError(f"top level does not restrict to level {n}", witness={"level": n})
    logger.debug(f"Assembled endomorphism from levels {levels}")
    return top


def intertwining_report(m: TorusManifold, v: str, alpha: Sequence[int], p: int, top: int) -> Dict[str, Any]:
    """Reduction Z/p^top -> Z/p^n intertwines the derived actions for every n <= top"""
    failures = []
    high = make_coeff(p, top)
    for omega_basis in exterior_basis(m.delta):
        omega = ManifoldClass(m.delta, high, {omega_basis: 1})
        acted = derived_act(m, v, alpha, omega)
        for n in range(1, top + 1):
            low = high.reduce_to(n)
            low_alpha = [a % low.modulus for a in alpha]
            if acted.reduce_to(n) != derived_act(m, v, low_alpha, omega.reduce_to(n)):
                failures.append({"omega": list(omega_basis), "level": n})
    return {"passed": not failures, "failures": failures}

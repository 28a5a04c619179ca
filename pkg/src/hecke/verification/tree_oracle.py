"""
Brute-force oracle on the Bruhat-Tits tree of PGL2(Q_q)

Vertices are closed discs b + q^a Z_q. An apartment vertex is q^p Z_q; any
other vertex is reached from its nearest apartment vertex p by a branch
whose first step is a direction j0 in F_q^x and whose later steps are
digits in F_q, so it is stored as (p, digits) with b = q^p (j0 + j1 q + ...)
and a = p + len(digits).

The l-part Gamma of the Teichmueller torus acts by b -> omega(u) b. The
apartment is fixed pointwise and every off-apartment vertex has trivial
stabilizer, because omega(u) = 1 mod q^len forces u = 1.

oracle_convolve evaluates the double-coset convolution at apartment pairs
by summing over Gamma-orbits of middle vertices, restricting to the
stabilizer, cupping and corestricting, and compares it with the toral
product.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import sympy

from src.hecke.algebra.toral_satake import SphericalElement, ToralElement, toral_convolve, torus_coh_ring
from src.hecke.core.coeff_groups import AbelianLGroup, CoeffRing, GroupHom, ell_valuation, make_coeff
from src.hecke.core.errors import InputError, OrbitError, RegimeError
from src.hecke.core.finite_cohomology import CohClass, CohRing, corestrict, cup, weyl_act
from src.hecke.core.root_datum import RootDatum, build_root_datum

logger = logging.getLogger(__name__)

MAX_Q = 100
MAX_DEPTH = 3
DEFAULT_MAX_VERTICES = 50000


@dataclass(frozen=True, order=True)
class TreeVertex:
    position: int
    digits: Tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def on_apartment(self) -> bool:
        return not self.digits

    def branch_value(self, q: int) -> int:
        return sum(d * q ** i for i, d in enumerate(self.digits))

    def disc(self, q: int) -> Tuple[int, Fraction]:
        """(a, b) for the disc b + q^a Z_q"""
        center = Fraction(self.branch_value(q)) * Fraction(q) ** self.position
        return self.position + self.length, center

    def to_dict(self) -> Dict[str, Any]:
        return {"position": self.position, "digits": list(self.digits)}


def _valuation(x: Fraction, q: int) -> Optional[int]:
    if x == 0:
        return None
    return ell_valuation(x.numerator, q) - ell_valuation(x.denominator, q)


def tree_distance(q: int, v: TreeVertex, w: TreeVertex) -> int:
    a1, b1 = v.disc(q)
    a2, b2 = w.disc(q)
    candidates = [a1, a2]
    gap = _valuation(b1 - b2, q)
    if gap is not None:
        candidates.append(gap)
    c = min(candidates)
    return (a1 - c) + (a2 - c)


class BruhatTitsTree:
    """The ball of radius depth around the apartment vertex 0, with the Gamma action"""

    def __init__(self, q: int, depth: int, ell: Optional[int] = None, max_vertices: int = DEFAULT_MAX_VERTICES):
        if not sympy.isprime(q) or q > MAX_Q:
            raise InputError(f"q must be a prime <= {MAX_Q}, got {q}")
        if not 0 <= depth <= MAX_DEPTH:
            raise InputError(f"depth must be in 0..{MAX_DEPTH}, got {depth}")
        expected = 1 + (q + 1) * sum(q ** i for i in range(depth))
        if expected > max_vertices:
            raise InputError(f"tree of depth {depth} for q = {q} has {expected} vertices, above {max_vertices}")
        self.q = q
        self.depth = depth
        self.ell = ell
        self.vertices: List[TreeVertex] = self._enumerate()
        self._index = {v: i for i, v in enumerate(self.vertices)}

        root = sympy.primitive_root(q)
        if ell is None:
            self.gamma_order = q - 1
        else:
            if (q - 1) % ell != 0:
                raise RegimeError(f"ell = {ell} does not divide q - 1 = {q - 1}")
            self.gamma_order = ell ** ell_valuation(q - 1, ell)
        self.gamma_residue = pow(root, (q - 1) // self.gamma_order, q)
        modulus = q ** max(depth, 1)
        # Teichmueller lift of the residue generator
        self.gamma_generator = pow(self.gamma_residue, q ** (max(depth, 1) - 1), modulus)
        logger.info(f"Tree for q={q}, depth={depth}: {len(self.vertices)} vertices, |Gamma|={self.gamma_order}")

    def _enumerate(self) -> List[TreeVertex]:
        q, depth = self.q, self.depth
        out = []
        for p in range(-depth, depth + 1):
            out.append(TreeVertex(p))
            branches: List[Tuple[int, ...]] = [(j,) for j in range(1, q)]
            length = 1
            while branches and abs(p) + length <= depth:
                out.extend(TreeVertex(p, b) for b in branches)
                branches = [b + (j,) for b in branches for j in range(q)]
                length += 1
        return sorted(out)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: TreeVertex) -> bool:
        return v in self._index

    @property
    def origin(self) -> TreeVertex:
        return TreeVertex(0)

    def apartment(self) -> List[TreeVertex]:
        return [v for v in self.vertices if v.on_apartment]

    def distance(self, v: TreeVertex, w: TreeVertex) -> int:
        return tree_distance(self.q, v, w)

    def neighbors(self, v: TreeVertex) -> List[TreeVertex]:
        if v.on_apartment:
            candidates = [TreeVertex(v.position - 1), TreeVertex(v.position + 1)]
            candidates += [TreeVertex(v.position, (j,)) for j in range(1, self.q)]
        else:
            candidates = [TreeVertex(v.position, v.digits[:-1])]
            candidates += [TreeVertex(v.position, v.digits + (j,)) for j in range(self.q)]
        return [w for w in candidates if w in self]

    def adjacency(self) -> Dict[TreeVertex, List[TreeVertex]]:
        return {v: self.neighbors(v) for v in self.vertices}

    # --- Gamma action ---------------------------------------------------------------

    def act(self, k: int, v: TreeVertex) -> TreeVertex:
        """g^k . v for g the Teichmueller generator of Gamma"""
        if v.on_apartment:
            return v
        modulus = self.q ** v.length
        u = pow(self.gamma_generator, k % self.gamma_order, modulus)
        value = (u * v.branch_value(self.q)) % modulus
        digits = []
        for _ in range(v.length):
            digits.append(value % self.q)
            value //= self.q
        return TreeVertex(v.position, tuple(digits))

    def orbit(self, v: TreeVertex) -> List[TreeVertex]:
        return sorted({self.act(k, v) for k in range(self.gamma_order)})

    def orbits(self) -> List[List[TreeVertex]]:
        seen = set()
        out = []
        for v in self.vertices:
            if v in seen:
                continue
            orbit = self.orbit(v)
            seen.update(orbit)
            out.append(orbit)
        return out

    def fixed_vertices(self) -> List[TreeVertex]:
        return [v for v in self.vertices if self.act(1, v) == v]


def build_tree(q: int, depth: int, ell: Optional[int] = None,
               max_vertices: int = DEFAULT_MAX_VERTICES) -> BruhatTitsTree:
    return BruhatTitsTree(q, depth, ell, max_vertices)


@dataclass(frozen=True)
class Stabilizer:
    """The subgroup of Gamma = Z/|Gamma| generated by `generator`"""
    gamma_order: int
    order: int

    @property
    def generator(self) -> int:
        return self.gamma_order // self.order

    @property
    def index(self) -> int:
        return self.gamma_order // self.order

    def to_dict(self) -> Dict[str, int]:
        return {"gamma_order": self.gamma_order, "order": self.order, "index": self.index}


def gamma_stabilizer(tree: BruhatTitsTree, v: TreeVertex) -> Stabilizer:
    if v not in tree:
        raise InputError(f"{v} is outside the enumerated tree")
    fixing = [k for k in range(tree.gamma_order) if tree.act(k, v) == v]
    return Stabilizer(tree.gamma_order, len(fixing))


def stabilizer_group(stabilizer: Stabilizer, ell: int) -> Tuple[AbelianLGroup, GroupHom]:
    """The stabilizer as an abelian l-group with its inclusion into Gamma"""
    gamma = AbelianLGroup(ell, (ell_valuation(stabilizer.gamma_order, ell),))
    if stabilizer.order == 1:
        sub = AbelianLGroup(ell, ())
        return sub, GroupHom(sub, gamma, ((),))
    sub = AbelianLGroup(ell, (ell_valuation(stabilizer.order, ell),))
    return sub, GroupHom(sub, gamma, ((stabilizer.index,),))


def orbit_stabilizer_report(tree: BruhatTitsTree) -> Dict[str, Any]:
    """orbit size * stabilizer order = |Gamma| at every vertex"""
    failures = []
    lattice: Dict[int, int] = {}
    for v in tree.vertices:
        stab = gamma_stabilizer(tree, v)
        lattice[stab.order] = lattice.get(stab.order, 0) + 1
        if len(tree.orbit(v)) * stab.order != tree.gamma_order:
            failures.append(v.to_dict())
    fixed = tree.fixed_vertices()
    return {
        "passed": not failures and fixed == tree.apartment(),
        "failures": failures,
        "stabilizer_orders": {str(k): v for k, v in sorted(lattice.items())},
        "fixed_equals_apartment": fixed == tree.apartment(),
    }


# --- splitness ----------------------------------------------------------------------

@dataclass
class SplitnessReport:
    passed: bool
    vertices_checked: int
    classes_checked: int
    stabilizer_orders: Dict[str, int]
    violations: List[str] = field(default_factory=list)
    witnesses: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "vertices_checked": self.vertices_checked,
            "classes_checked": self.classes_checked,
            "stabilizer_orders": self.stabilizer_orders,
            "violations": self.violations,
            "witnesses": self.witnesses,
        }


def splitness_check(q: int, ell: int, r: int, depth: int, max_degree: int = 3) -> SplitnessReport:
    """Corestriction from the stabilizer of an off-apartment vertex to Gamma vanishes"""
    S = make_coeff(ell, r)
    if (q - 1) % S.modulus != 0:
        raise RegimeError(f"ell^r = {S.modulus} does not divide q - 1 = {q - 1}")
    tree = build_tree(q, depth, ell)
    violations, witnesses = [], []
    orders: Dict[str, int] = {}
    classes = 0
    checked = 0
    for v in tree.vertices:
        stab = gamma_stabilizer(tree, v)
        orders[str(stab.order)] = orders.get(str(stab.order), 0) + 1
        sub, inclusion = stabilizer_group(stab, ell)
        ring = CohRing(sub, S, max_degree)
        for degree in range(max_degree + 1):
            for monomial in ring.basis(degree):
                a = ring.from_vector(degree, [int(m == monomial) for m in ring.basis(degree)])
                image = corestrict(inclusion, a)
                classes += 1
                if v.on_apartment:
                    if image != a:
                        violations.append(f"corestriction at apartment vertex {v.position} is not the identity")
                elif not image.is_zero():
                    violations.append(f"corestriction from {v.to_dict()} is nonzero in degree {degree}")
                    witnesses.append({"vertex": v.to_dict(), "class": a.to_json(), "image": image.to_json()})
        checked += 1
    logger.info(f"Splitness for q={q}, ell={ell}, r={r}, depth={depth}: {len(violations)} violations")
    return SplitnessReport(
        passed=not violations,
        vertices_checked=checked,
        classes_checked=classes,
        stabilizer_orders=orders,
        violations=violations,
        witnesses=witnesses,
    )


# --- oracle elements and convolution -------------------------------------------------

class OracleElement:
    """
    A G-invariant function on vertex pairs, given by alpha_n = h(0, n) in H*(Gamma)
    for n >= 0. At an apartment pair (a, b) the value is alpha_{b-a} when b >= a and
    s.alpha_{a-b} otherwise; at any other pair only the restriction to the trivial
    stabilizer survives, the degree-0 part of alpha_{d(x, y)}.
    """

    def __init__(self, rd: RootDatum, ring: CohRing, values: Dict[int, CohClass]):
        if rd.rank != 1 or rd.weyl_order != 2:
            raise InputError(f"the tree oracle needs a rank-one datum with |W| = 2, got {rd.name}")
        self.rd = rd
        self.ring = ring
        self.values = {int(n): c for n, c in values.items() if not c.is_zero()}
        if any(n < 0 for n in self.values):
            raise InputError("oracle values are indexed by distances n >= 0")
        self._flip = rd.weyl_elements[1]

    @classmethod
    def from_spherical(cls, element: ToralElement) -> "OracleElement":
        return cls(element.rd, element.ring, {lam[0]: c for lam, c in element.values.items() if lam[0] >= 0})

    @property
    def radius(self) -> int:
        return max(self.values, default=0)

    def apartment_value(self, a: int, b: int) -> CohClass:
        if b >= a:
            return self.values.get(b - a, self.ring.zero())
        return weyl_act(self._flip, self.values.get(a - b, self.ring.zero()))

    def degree_zero(self, n: int) -> int:
        value = self.values.get(n)
        if value is None:
            return 0
        return value.component(0).terms.get(((), (0,) * self.ring.d), 0)


@dataclass
class OracleReport:
    passed: bool
    pairs: List[Dict[str, Any]]
    off_apartment_vanishes: bool
    orbit_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "pairs": self.pairs,
            "off_apartment_vanishes": self.off_apartment_vanishes,
            "orbit_count": self.orbit_count,
        }


def _orbit_contribution(tree: BruhatTitsTree, h1: OracleElement, h2: OracleElement,
                        y: TreeVertex, z: TreeVertex) -> CohClass:
    """Cor Res (h1(0, y) cup h2(y, z)) for one orbit representative y"""
    ring = h1.ring
    x = tree.origin
    if y.on_apartment:
        left = h1.apartment_value(x.position, y.position)
        right = h2.apartment_value(y.position, z.position)
        return cup(left, right)
    stab = gamma_stabilizer(tree, y)
    sub, inclusion = stabilizer_group(stab, ring.coeff.ell)
    sub_ring = CohRing(sub, ring.coeff, ring.max_degree)
    if stab.order != 1:
        raise OrbitError(f"off-apartment vertex {y.to_dict()} has a stabilizer of order {stab.order}")
    d1, d2 = tree.distance(x, y), tree.distance(y, z)
    left = sub_ring.scalar(h1.degree_zero(d1))
    right = sub_ring.scalar(h2.degree_zero(d2))
    return corestrict(inclusion, cup(left, right))


def oracle_convolve(tree: BruhatTitsTree, h1: OracleElement, h2: OracleElement, window: int) -> Dict[int, Dict[str, CohClass]]:
    """(h1 * h2)(0, n) for |n| <= window, split into apartment and off-apartment orbit sums"""
    if h1.ring != h2.ring:
        raise InputError("oracle elements over different cohomology rings")
    if h1.radius > tree.depth:
        raise InputError(f"support radius {h1.radius} exceeds the tree depth {tree.depth}")
    if window > tree.depth:
        raise InputError(f"window {window} exceeds the tree depth {tree.depth}")
    ring = h1.ring
    orbits = tree.orbits()
    out: Dict[int, Dict[str, CohClass]] = {}
    for n in range(-window, window + 1):
        z = TreeVertex(n)
        apartment_sum, off_sum = ring.zero(), ring.zero()
        for orbit in orbits:
            y = orbit[0]
            if tree.distance(tree.origin, y) > h1.radius or tree.distance(y, z) > h2.radius:
                continue
            contribution = _orbit_contribution(tree, h1, h2, y, z)
            if y.on_apartment:
                apartment_sum = apartment_sum + contribution
            else:
                off_sum = off_sum + contribution
        out[n] = {"apartment": apartment_sum, "off_apartment": off_sum, "total": apartment_sum + off_sum}
    return out


def compare_with_model(tree: BruhatTitsTree, a: SphericalElement, b: SphericalElement, window: int) -> OracleReport:
    """oracle_convolve against toral_convolve on the apartment window"""
    h1, h2 = OracleElement.from_spherical(a), OracleElement.from_spherical(b)
    oracle = oracle_convolve(tree, h1, h2, window)
    model = toral_convolve(a, b)
    pairs = []
    for n, parts in sorted(oracle.items()):
        expected = model.value((n,))
        pairs.append({
            "pair": [0, n],
            "oracle": parts["total"].to_json(),
            "model": expected.to_json(),
            "match": parts["total"] == expected,
        })
    vanishes = all(parts["off_apartment"].is_zero() for parts in oracle.values())
    return OracleReport(
        passed=all(p["match"] for p in pairs) and vanishes,
        pairs=pairs,
        off_apartment_vanishes=vanishes,
        orbit_count=len(tree.orbits()),
    )


def classical_relation(tree: BruhatTitsTree, S: CoeffRing) -> Dict[str, Any]:
    """T1 * T1 = T2 + (q + 1) T0 by counting middle vertices"""
    x = tree.origin
    counts = {}
    for n in range(3):
        z = TreeVertex(n)
        counts[n] = sum(1 for y in tree.vertices if tree.distance(x, y) == 1 and tree.distance(y, z) == 1)
    reduced = {n: c % S.modulus for n, c in counts.items()}
    return {
        "counts": counts,
        "reduced": reduced,
        "passed": counts == {0: tree.q + 1, 1: 0, 2: 1} and reduced[0] == 2 % S.modulus,
    }


def oracle_setup(q: int, ell: int, r: int, depth: int, max_degree: int = 4) -> Tuple[RootDatum, CohRing, BruhatTitsTree]:
    rd = build_root_datum("PGL2")
    S = make_coeff(ell, r)
    if (q - 1) % S.modulus != 0:
        raise RegimeError(f"ell^r = {S.modulus} does not divide q - 1 = {q - 1}")
    ring = torus_coh_ring(rd, q, S, max_degree)
    return rd, ring, build_tree(q, depth, ell)

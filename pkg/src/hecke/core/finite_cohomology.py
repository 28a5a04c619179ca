"""
Cohomology rings H*(T; Z/l^r) of finite abelian l-groups

For T = Z/l^{n_1} x ... x Z/l^{n_d}, l odd and r <= min(n_i), the ring is
free over Z/l^r:

    H*(T; Z/l^r) = Lambda(x_1, ..., x_d) (x) Z/l^r[y_1, ..., y_d]

with x_i in degree 1 the character e_i -> 1 and y_i in degree 2 the
reduction of the integral class attached to the character e_i -> 1/l^{n_i}
of Q/Z. A class is a sparse map from monomials (x-indices, y-exponents) to
coefficients.

Restriction has a closed form on generators; corestriction has a closed form
for inclusions that send each cyclic factor into a distinct cyclic factor
and falls back to the chain-level transfer otherwise. Both are checked
against the chain-level oracle in periodic_resolution.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from src.hecke.core.coeff_groups import AbelianLGroup, CoeffRing, GroupHom, ell_valuation
from src.hecke.core.errors import InputError, RegimeError

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[int, ...], Tuple[int, ...]]

DEFAULT_MAX_DEGREE = 6


def monomial_degree(monomial: Monomial) -> int:
    xs, ys = monomial
    return len(xs) + 2 * sum(ys)


def merge_exterior(a: Tuple[int, ...], b: Tuple[int, ...]) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """Sign and sorted index tuple of x_a ^ x_b, or None when they share an index"""
    if set(a) & set(b):
        return None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1) ** inversions, tuple(sorted(a + b))


@dataclass(frozen=True)
class CohRing:
    """H*(T; S) for T an abelian l-group in the regime l odd, r <= n_i"""
    group: AbelianLGroup
    coeff: CoeffRing
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        if self.coeff.ell == 2:
            raise RegimeError("l = 2 is outside the implemented regime")
        if not self.group.is_trivial() and self.group.ell != self.coeff.ell:
            raise RegimeError(
                f"group prime {self.group.ell} differs from coefficient prime {self.coeff.ell}"
            )
        for n in self.group.exponents:
            if self.coeff.r > n:
                raise RegimeError(
                    f"coefficients Z/{self.coeff.ell}^{self.coeff.r} exceed the cyclic factor "
                    f"Z/{self.coeff.ell}^{n}; need r <= n_i"
                )

    @property
    def d(self) -> int:
        return self.group.rank

    @property
    def modulus(self) -> int:
        return self.coeff.modulus

    def basis(self, degree: int) -> List[Monomial]:
        """Monomials of the given degree: sorted by x-indices, then y-exponents"""
        if degree < 0:
            return []
        result = []
        for s in range(min(self.d, degree) + 1):
            if (degree - s) % 2:
                continue
            half = (degree - s) // 2
            for xs in itertools.combinations(range(self.d), s):
                for ys in _compositions(half, self.d):
                    result.append((xs, ys))
        return sorted(result)

    def rank(self, degree: int) -> int:
        return len(self.basis(degree))

    def zero(self) -> "CohClass":
        return CohClass(self, {})

    def one(self) -> "CohClass":
        return CohClass(self, {((), (0,) * self.d): 1})

    def scalar(self, c: int) -> "CohClass":
        return CohClass(self, {((), (0,) * self.d): c})

    def x(self, i: int) -> "CohClass":
        self._check_index(i)
        return CohClass(self, {((i,), (0,) * self.d): 1})

    def y(self, i: int) -> "CohClass":
        self._check_index(i)
        ys = tuple(int(j == i) for j in range(self.d))
        return CohClass(self, {((), ys): 1})

    def monomial(self, xs: Sequence[int], ys: Sequence[int], coeff: int = 1) -> "CohClass":
        """coeff * x_{xs[0]} ... x_{xs[-1]} * y^ys; xs in any order"""
        xs = tuple(int(i) for i in xs)
        ys = tuple(int(e) for e in ys) if ys else (0,) * self.d
        if len(ys) != self.d or any(e < 0 for e in ys):
            raise InputError(f"y-exponents {list(ys)} do not fit a group of rank {self.d}")
        for i in xs:
            self._check_index(i)
        if len(set(xs)) != len(xs):
            return self.zero()
        sign = (-1) ** sum(1 for a in range(len(xs)) for b in range(a + 1, len(xs)) if xs[a] > xs[b])
        return CohClass(self, {(tuple(sorted(xs)), ys): sign * coeff})

    def from_vector(self, degree: int, vector: Sequence[int]) -> "CohClass":
        return CohClass(self, dict(zip(self.basis(degree), vector)))

    def reduce_to(self, m: int) -> "CohRing":
        return CohRing(self.group, self.coeff.reduce_to(m), self.max_degree)

    def _check_index(self, i: int):
        if not 0 <= i < self.d:
            raise InputError(f"generator index {i} out of range for a group of rank {self.d}")

    def to_dict(self) -> Dict[str, Any]:
        return {"group": self.group.to_dict(), "coeff": self.coeff.to_dict(), "max_degree": self.max_degree}


def _compositions(total: int, parts: int) -> List[Tuple[int, ...]]:
    if parts == 0:
        return [()] if total == 0 else []
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def coh_ring(T: AbelianLGroup, S: CoeffRing, max_degree: int = DEFAULT_MAX_DEGREE) -> CohRing:
    return CohRing(T, S, max_degree)


class CohClass:
    """Element of H*(T; Z/l^r), possibly inhomogeneous"""

    def __init__(self, ring: CohRing, terms: Dict[Monomial, int]):
        self.ring = ring
        self.terms: Dict[Monomial, int] = {}
        for monomial, c in terms.items():
            c = int(c) % ring.modulus
            if not c:
                continue
            if monomial_degree(monomial) > ring.max_degree:
                raise RegimeError(
                    f"degree {monomial_degree(monomial)} exceeds the cap {ring.max_degree}"
                )
            self.terms[monomial] = c

    def _check(self, other: "CohClass"):
        if not isinstance(other, CohClass) or other.ring != self.ring:
            raise InputError("cohomology classes over different groups or coefficients")

    def __add__(self, other: "CohClass") -> "CohClass":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return CohClass(self.ring, out)

    def __neg__(self) -> "CohClass":
        return CohClass(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def __mul__(self, other) -> "CohClass":
        if isinstance(other, int):
            return self.scale(other)
        return cup(self, other)

    def __rmul__(self, other) -> "CohClass":
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (xs, ys), c in self.items():
            name = "".join(f"x{i + 1}" for i in xs)
            name += "".join(f"y{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(ys) if e)
            parts.append(f"{c}*{name}" if name else f"{c}")
        return " + ".join(parts)

    def scale(self, c: int) -> "CohClass":
        return CohClass(self.ring, {m: a * c for m, a in self.terms.items()})

    def items(self) -> List[Tuple[Monomial, int]]:
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({monomial_degree(m) for m in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous class; None for zero"""
        degrees = self.degrees()
        if len(degrees) > 1:
            raise InputError(f"class of mixed degrees {degrees} has no single degree")
        return degrees[0] if degrees else None

    def component(self, degree: int) -> "CohClass":
        return CohClass(self.ring, {m: c for m, c in self.terms.items() if monomial_degree(m) == degree})

    def truncate(self, max_degree: int) -> "CohClass":
        return CohClass(self.ring, {m: c for m, c in self.terms.items() if monomial_degree(m) <= max_degree})

    def vector(self, degree: int) -> List[int]:
        return [self.terms.get(m, 0) for m in self.ring.basis(degree)]

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"x_indices": list(xs), "y_exponents": list(ys), "coeff": c}
            for (xs, ys), c in self.items()
        ]

    @classmethod
    def from_json(cls, ring: CohRing, payload: List[Dict[str, Any]]) -> "CohClass":
        total = ring.zero()
        try:
            for term in payload:
                ys = term.get("y_exponents") or [0] * ring.d
                total = total + ring.monomial(term.get("x_indices", []), ys, int(term["coeff"]))
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed cohomology class payload: {e}")
        except RegimeError as e:
            raise InputError(f"cohomology class payload above the degree cap: {e}")
        return total


# --- products ------------------------------------------------------------------------

def _monomial_product(a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
    merged = merge_exterior(a[0], b[0])
    if merged is None:
        return None
    sign, xs = merged
    return sign, (xs, tuple(p + q for p, q in zip(a[1], b[1])))


def cup(a: CohClass, b: CohClass, max_degree: Optional[int] = None) -> CohClass:
    """Graded-commutative cup product; terms above max_degree are dropped when it is given"""
    a._check(b)
    out: Dict[Monomial, int] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            if max_degree is not None and monomial_degree(ma) + monomial_degree(mb) > max_degree:
                continue
            product = _monomial_product(ma, mb)
            if product is None:
                continue
            sign, m = product
            out[m] = out.get(m, 0) + sign * ca * cb
    return CohClass(a.ring, out)


def _ring_hom(a: CohClass, target: CohRing, x_images: List[CohClass], y_images: List[CohClass]) -> CohClass:
    """Evaluate the ring homomorphism determined by generator images on a"""
    result = target.zero()
    powers: Dict[Tuple[int, int], CohClass] = {}

    def y_power(i: int, e: int) -> CohClass:
        if (i, e) not in powers:
            powers[(i, e)] = target.one() if e == 0 else cup(y_power(i, e - 1), y_images[i])
        return powers[(i, e)]

    for (xs, ys), c in a.terms.items():
        term = target.scalar(c)
        for i in xs:
            term = cup(term, x_images[i])
        for i, e in enumerate(ys):
            if e:
                term = cup(term, y_power(i, e))
        result = result + term
    return result


# --- restriction --------------------------------------------------------------------

def restriction_generators(f: GroupHom, coeff: CoeffRing, max_degree: int = DEFAULT_MAX_DEGREE):
    """Images of x_j and y_j of H*(target) in H*(source) under f^*"""
    source_ring = CohRing(f.source, coeff, max_degree)
    mod = coeff.modulus
    src_orders = f.source.orders
    tgt_orders = f.target.orders
    x_images, y_images = [], []
    for j, row in enumerate(f.matrix):
        x_images.append(CohClass(source_ring, {
            ((i,), (0,) * f.source.rank): row[i] % mod for i in range(f.source.rank)
        }))
        y_terms = {}
        for i in range(f.source.rank):
            ys = tuple(int(k == i) for k in range(f.source.rank))
            y_terms[((), ys)] = (row[i] * src_orders[i] // tgt_orders[j]) % mod
        y_images.append(CohClass(source_ring, y_terms))
    return source_ring, x_images, y_images


def restrict(f: GroupHom, a: CohClass) -> CohClass:
    """f^*: H*(target) -> H*(source) for f: T' -> T"""
    if f.target != a.ring.group:
        raise InputError("restriction along a homomorphism whose target is not the class's group")
    source_ring, x_images, y_images = restriction_generators(f, a.ring.coeff, a.ring.max_degree)
    return _ring_hom(a, source_ring, x_images, y_images)


# --- corestriction ------------------------------------------------------------------

def factorwise_embedding(f: GroupHom) -> Optional[List[Tuple[int, int, int]]]:
    """
    For an injective f sending source factor i into target factor pi(i) by
    u_i * l^{a_i}, return [(pi(i), u_i, a_i)]; None when f has another shape.
    """
    rows_used = set()
    result = []
    ell = f.target.ell
    for i in range(f.source.rank):
        column = [(j, f.matrix[j][i]) for j in range(f.target.rank) if f.matrix[j][i] % f.target.orders[j]]
        if len(column) != 1:
            return None
        j, entry = column[0]
        if j in rows_used:
            return None
        rows_used.add(j)
        a = ell_valuation(entry, ell)
        u = entry // ell ** a
        if f.source.exponents[i] != f.target.exponents[j] - a:
            return None
        result.append((j, u, a))
    return result


def corestrict(f: GroupHom, a: CohClass) -> CohClass:
    """Transfer H*(T') -> H*(T) along an injective f: T' -> T"""
    if f.source != a.ring.group:
        raise InputError("corestriction along a homomorphism whose source is not the class's group")
    if not f.is_injective():
        raise InputError("corestriction needs an injective homomorphism")
    embedding = factorwise_embedding(f)
    if embedding is None:
        from src.hecke.core.periodic_resolution import chain_corestrict
        logger.debug(f"Corestriction along {f.matrix} uses the chain-level transfer")
        return chain_corestrict(f, a)

    coeff = a.ring.coeff
    target_ring = CohRing(f.target, coeff, a.ring.max_degree)
    missing = [j for j in range(f.target.rank) if j not in {e[0] for e in embedding}]
    index_factor = 1
    for j in missing:
        index_factor *= f.target.orders[j]
    if index_factor % coeff.modulus == 0:
        return target_ring.zero()

    result = target_ring.zero()
    d_target = f.target.rank
    for (xs, ys), c in a.terms.items():
        term = target_ring.scalar(c * index_factor)
        for i, (j, u, a_i) in enumerate(embedding):
            eps = 1 if i in xs else 0
            k = ys[i]
            u_inv = coeff.inverse(u)
            factor_coeff = pow(u_inv, eps + k, coeff.modulus) * (coeff.ell ** (a_i * (1 - eps)))
            y_exp = tuple(k if t == j else 0 for t in range(d_target))
            piece = CohClass(target_ring, {((j,) if eps else (), y_exp): factor_coeff})
            term = cup(term, piece)
        result = result + term
    return result


# --- coefficients and Weyl actions ----------------------------------------------------

def coeff_change(a: CohClass, m: int) -> CohClass:
    """Reduction H*(T; Z/l^n) -> H*(T; Z/l^m), m <= n"""
    if m > a.ring.coeff.r:
        raise InputError(f"cannot change coefficients from Z/l^{a.ring.coeff.r} up to Z/l^{m}")
    target = a.ring.reduce_to(m)
    return CohClass(target, a.terms)


def torus_group(rank: int, ell: int, exponent: int) -> AbelianLGroup:
    """X_* (x) Z/l^exponent, the l-part of a split torus over F_q"""
    if exponent == 0:
        return AbelianLGroup(ell, ())
    return AbelianLGroup(ell, (exponent,) * rank)


@lru_cache(maxsize=None)
def _integer_inverse(matrix: Tuple[Tuple[int, ...], ...]) -> Tuple[Tuple[int, ...], ...]:
    inverse = sympy.Matrix(matrix).inv()
    return tuple(tuple(int(inverse[i, j]) for j in range(inverse.cols)) for i in range(inverse.rows))


def weyl_pullback(matrix: Sequence[Sequence[int]], a: CohClass) -> CohClass:
    """w^* = restriction along w acting on T = X_* (x) Z/l^m; (w1 w2)^* = w2^* o w1^*"""
    group = a.ring.group
    if group.is_trivial():
        return a
    if len(matrix) != group.rank:
        raise InputError(f"Weyl matrix of size {len(matrix)} on a torus of rank {group.rank}")
    return restrict(GroupHom(group, group, tuple(tuple(r) for r in matrix)), a)


def weyl_act(w, a: CohClass) -> CohClass:
    """Left action: restriction along w^{-1}, so (w1 w2).a = w1.(w2.a)"""
    matrix = tuple(tuple(int(c) for c in row) for row in getattr(w, "matrix", w))
    if a.ring.group.is_trivial():
        return a
    return weyl_pullback(_integer_inverse(matrix), a)

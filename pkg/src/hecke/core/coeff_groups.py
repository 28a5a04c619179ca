"""
Coefficient rings and finite abelian l-groups

Exact arithmetic in S = Z/l^r, finite abelian l-groups given factor-wise as
Z/l^{n_1} x ... x Z/l^{n_d}, homomorphisms between them as integer matrices,
and the standing-regime validator used before any algebra command runs.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Sequence, Tuple, TYPE_CHECKING

import sympy

from src.hecke.core.errors import InputError, NonUnitError

if TYPE_CHECKING:
    from src.hecke.core.root_datum import RootDatum

logger = logging.getLogger(__name__)


def ell_valuation(value: int, ell: int) -> int:
    """l-adic valuation of a nonzero integer"""
    if value == 0:
        raise InputError("valuation of 0 is undefined")
    value = abs(value)
    v = 0
    while value % ell == 0:
        value //= ell
        v += 1
    return v


@dataclass(frozen=True)
class CoeffRing:
    """The ring Z/l^r"""
    ell: int
    r: int

    @property
    def modulus(self) -> int:
        return self.ell ** self.r

    def reduce(self, a: int) -> int:
        return a % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def is_unit(self, a: int) -> bool:
        return a % self.ell != 0

    def inverse(self, a: int) -> int:
        """Inverse of a unit; raises NonUnitError for zero divisors"""
        if not self.is_unit(a):
            raise NonUnitError(f"{a} is a non-unit in Z/{self.modulus}")
        return pow(a % self.modulus, -1, self.modulus)

    def valuation(self, a: int) -> int:
        """l-adic valuation of a residue; r for zero"""
        a = a % self.modulus
        if a == 0:
            return self.r
        return ell_valuation(a, self.ell)

    def reduce_to(self, m: int) -> "CoeffRing":
        if m > self.r or m < 1:
            raise InputError(f"cannot reduce Z/{self.ell}^{self.r} to exponent {m}")
        return CoeffRing(self.ell, m)

    def to_dict(self) -> Dict[str, int]:
        return {"ell": self.ell, "r": self.r, "modulus": self.modulus}


def make_coeff(ell: int, r: int) -> CoeffRing:
    """Validated constructor for Z/l^r"""
    if not isinstance(ell, int) or not sympy.isprime(ell):
        raise InputError(f"ell must be prime, got {ell}")
    if not isinstance(r, int) or r < 1:
        raise InputError(f"r must be a positive integer, got {r}")
    return CoeffRing(ell, r)


@dataclass(frozen=True)
class AbelianLGroup:
    """Z/l^{n_1} x ... x Z/l^{n_d}, kept factor-wise (not normalized)"""
    ell: int
    exponents: Tuple[int, ...] = ()

    def __post_init__(self):
        if not sympy.isprime(self.ell):
            raise InputError(f"group prime must be prime, got {self.ell}")
        object.__setattr__(self, "exponents", tuple(int(n) for n in self.exponents))
        if any(n < 1 for n in self.exponents):
            raise InputError(f"cyclic factors must have positive exponent: {self.exponents}")

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "AbelianLGroup":
        """Build from cyclic orders l^{n_i}, all powers of one prime"""
        if not orders:
            raise InputError("cannot infer the prime of an empty order list; use AbelianLGroup(ell)")
        exponents = []
        primes = set()
        for order in orders:
            factors = sympy.factorint(order)
            if len(factors) != 1:
                raise InputError(f"{order} is not a positive prime power")
            (p, n), = factors.items()
            primes.add(p)
            exponents.append(n)
        if len(primes) != 1:
            raise InputError(f"mixed primes in {list(orders)}")
        return cls(primes.pop(), tuple(exponents))

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(self.ell ** n for n in self.exponents)

    @property
    def order(self) -> int:
        total = 1
        for o in self.orders:
            total *= o
        return total

    def is_trivial(self) -> bool:
        return self.rank == 0

    def elements(self) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*[range(o) for o in self.orders])

    def add(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def reduce(self, a: Sequence[int]) -> Tuple[int, ...]:
        return tuple(x % o for x, o in zip(a, self.orders))

    def to_dict(self) -> Dict[str, Any]:
        return {"ell": self.ell, "orders": list(self.orders)}


@dataclass(frozen=True)
class GroupHom:
    """
    Homomorphism source -> target.

    matrix[j][i] is the coefficient of target generator j in the image of
    source generator i; the image of a generator of order l^{n_i} must have
    order dividing l^{n_i}.
    """
    source: AbelianLGroup
    target: AbelianLGroup
    matrix: Tuple[Tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if self.source.ell != self.target.ell and not (self.source.is_trivial() or self.target.is_trivial()):
            raise InputError("homomorphism between groups of different primes")
        rows = tuple(tuple(int(c) for c in row) for row in self.matrix)
        if len(rows) != self.target.rank or any(len(row) != self.source.rank for row in rows):
            raise InputError(
                f"matrix shape must be {self.target.rank}x{self.source.rank}, got "
                f"{len(rows)}x{len(rows[0]) if rows else 0}"
            )
        reduced = tuple(
            tuple(c % self.target.orders[j] for c in row) for j, row in enumerate(rows)
        )
        for j, row in enumerate(reduced):
            for i, c in enumerate(row):
                if (self.source.orders[i] * c) % self.target.orders[j] != 0:
                    raise InputError(
                        f"generator {i} of order {self.source.orders[i]} cannot map with "
                        f"coefficient {c} into a factor of order {self.target.orders[j]}"
                    )
        object.__setattr__(self, "matrix", reduced)

    @classmethod
    def identity(cls, group: AbelianLGroup) -> "GroupHom":
        d = group.rank
        return cls(group, group, tuple(tuple(int(i == j) for i in range(d)) for j in range(d)))

    @classmethod
    def inversion(cls, group: AbelianLGroup) -> "GroupHom":
        d = group.rank
        return cls(group, group, tuple(tuple(-int(i == j) for i in range(d)) for j in range(d)))

    def apply(self, element: Sequence[int]) -> Tuple[int, ...]:
        return tuple(
            sum(c * x for c, x in zip(row, element)) % self.target.orders[j]
            for j, row in enumerate(self.matrix)
        )

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner"""
        if inner.target != self.source:
            raise InputError("composition of non-composable homomorphisms")
        rows = []
        for j in range(self.target.rank):
            rows.append(tuple(
                sum(self.matrix[j][k] * inner.matrix[k][i] for k in range(self.source.rank))
                for i in range(inner.source.rank)
            ))
        return GroupHom(inner.source, self.target, tuple(rows))

    def image_order(self) -> int:
        return len({self.apply(g) for g in self.source.elements()})

    def is_injective(self) -> bool:
        return self.image_order() == self.source.order

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "matrix": [list(row) for row in self.matrix],
        }


def ell_part(q: int, ell: int) -> AbelianLGroup:
    """The l-Sylow subgroup of F_q^x, a cyclic group of order l^{v_l(q-1)}"""
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise InputError(f"q = {q} is not a prime power")
    if not sympy.isprime(ell):
        raise InputError(f"ell must be prime, got {ell}")
    (p, _), = factors.items()
    if p == ell:
        raise InputError(f"ell = {ell} divides q = {q}")
    v = sympy.multiplicity(ell, q - 1)
    return AbelianLGroup(ell, (v,) if v > 0 else ())


@dataclass
class RegimeReport:
    """Outcome of validate_regime"""
    passed: bool
    violations: List[str]
    details: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "violations": list(self.violations), "details": self.details}


def validate_regime(rd: "RootDatum", S: CoeffRing, q: int) -> RegimeReport:
    """Check l^r | q-1, l prime to |W| and l != char F_q"""
    violations: List[str] = []
    factors = sympy.factorint(q) if q > 1 else {}
    characteristic = next(iter(factors)) if len(factors) == 1 else None
    if characteristic is None:
        violations.append(f"q = {q} is not a prime power")
    elif characteristic == S.ell:
        violations.append(f"ell = {S.ell} equals the characteristic of F_{q}")
    if (q - 1) % S.modulus != 0:
        violations.append(f"ell^r = {S.modulus} does not divide q - 1 = {q - 1}")
    weyl_order = rd.weyl_order
    if weyl_order % S.ell == 0:
        violations.append(f"ell = {S.ell} divides |W| = {weyl_order}")
    report = RegimeReport(
        passed=not violations,
        violations=violations,
        details={"group": rd.name, "q": q, "ell": S.ell, "r": S.r, "weyl_order": weyl_order},
    )
    if violations:
        logger.info(f"Regime check failed for {rd.name}, q={q}, S=Z/{S.modulus}: {violations}")
    return report

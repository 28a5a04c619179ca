"""
Finite-support group algebra S[X_*] of a cocharacter lattice.

Elements are sparse maps lambda -> coefficient mod N, written multiplicatively
(delta_lambda * delta_nu = delta_{lambda+nu}). Used for the discriminant,
central elements of the Iwahori algebra and the Theta projector.
"""

from typing import Dict, Iterable, List, Sequence, Tuple

from src.hecke.core.errors import InputError, NonUnitError

Coweight = Tuple[int, ...]


def apply_matrix(matrix: Sequence[Sequence[int]], vector: Sequence[int]) -> Coweight:
    return tuple(sum(c * x for c, x in zip(row, vector)) for row in matrix)


def add_vectors(a: Sequence[int], b: Sequence[int]) -> Coweight:
    return tuple(x + y for x, y in zip(a, b))


def sup_norm(vector: Sequence[int]) -> int:
    return max((abs(x) for x in vector), default=0)


class LatticeElement:
    """Element of (Z/modulus)[X_*] with X_* of the given rank"""

    def __init__(self, rank: int, modulus: int, coeffs: Dict[Coweight, int] = None):
        self.rank = rank
        self.modulus = modulus
        self.coeffs: Dict[Coweight, int] = {}
        for lam, c in (coeffs or {}).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != rank:
                raise InputError(f"coweight {lam} has wrong rank, expected {rank}")
            c = int(c) % modulus
            if c:
                self.coeffs[lam] = c

    @classmethod
    def monomial(cls, rank: int, modulus: int, lam: Sequence[int], c: int = 1) -> "LatticeElement":
        return cls(rank, modulus, {tuple(lam): c})

    @classmethod
    def constant(cls, rank: int, modulus: int, c: int) -> "LatticeElement":
        return cls(rank, modulus, {(0,) * rank: c})

    def _check(self, other: "LatticeElement"):
        if self.rank != other.rank or self.modulus != other.modulus:
            raise InputError("lattice elements over different lattices or rings")

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        self._check(other)
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            out[lam] = out.get(lam, 0) + c
        return LatticeElement(self.rank, self.modulus, out)

    def __neg__(self) -> "LatticeElement":
        return LatticeElement(self.rank, self.modulus, {lam: -c for lam, c in self.coeffs.items()})

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        return self + (-other)

    def __mul__(self, other) -> "LatticeElement":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        out: Dict[Coweight, int] = {}
        for lam, a in self.coeffs.items():
            for nu, b in other.coeffs.items():
                key = add_vectors(lam, nu)
                out[key] = (out.get(key, 0) + a * b) % self.modulus
        return LatticeElement(self.rank, self.modulus, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LatticeElement":
        result = LatticeElement.constant(self.rank, self.modulus, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return (self.rank, self.modulus, self.coeffs) == (other.rank, other.modulus, other.coeffs)

    def __hash__(self):
        return hash((self.rank, self.modulus, tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*d{list(lam)}" for lam, c in self.items())

    def scale(self, c: int) -> "LatticeElement":
        return LatticeElement(self.rank, self.modulus, {lam: a * c for lam, a in self.coeffs.items()})

    def items(self) -> List[Tuple[Coweight, int]]:
        return sorted(self.coeffs.items())

    def support(self) -> List[Coweight]:
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def act(self, matrix: Sequence[Sequence[int]]) -> "LatticeElement":
        """(w.f)(w lambda) = f(lambda)"""
        return LatticeElement(
            self.rank, self.modulus, {apply_matrix(matrix, lam): c for lam, c in self.coeffs.items()}
        )

    def is_invariant(self, matrices: Iterable[Sequence[Sequence[int]]]) -> bool:
        return all(self.act(m) == self for m in matrices)

    def evaluate(self, character_values: Sequence[int], modulus: int = None) -> int:
        """sum_lambda f(lambda) * chi(lambda), chi given by its values on the X_* basis"""
        modulus = modulus or self.modulus
        total = 0
        for lam, c in self.coeffs.items():
            total += c * character_value(character_values, lam, modulus)
        return total % modulus

    def reduce(self, modulus: int) -> "LatticeElement":
        if self.modulus % modulus != 0:
            raise InputError(f"cannot reduce mod {self.modulus} coefficients to mod {modulus}")
        return LatticeElement(self.rank, modulus, self.coeffs)

    def to_json(self) -> List[Dict]:
        return [{"coweight": list(lam), "coeff": c} for lam, c in self.items()]


def character_value(values: Sequence[int], lam: Sequence[int], modulus: int) -> int:
    """prod_i values[i]^lam[i] mod modulus; negative exponents need unit values"""
    result = 1
    for v, e in zip(values, lam):
        if e < 0:
            try:
                result = result * pow(v, e, modulus) % modulus
            except ValueError:
                raise NonUnitError(f"character value {v} is not a unit mod {modulus}")
        else:
            result = result * pow(v, e, modulus) % modulus
    return result

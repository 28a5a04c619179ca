"""
Root data for split groups

Character lattice X^* and cocharacter lattice X_* are Z^rank with the pairing
<chi, lambda> = chi^T P lambda (P the identity for every catalog entry).
Roots are stored in X^* coordinates, coroots in X_* coordinates.

Supported catalog: SL2, PGL2, SL3, Sp4, plus explicit descriptors (a torus
datum with no roots is a valid descriptor).
"""

import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Dict, List, Sequence, Tuple

from src.hecke.core.errors import InputError
from src.hecke.core.lattice_algebra import Coweight, LatticeElement, apply_matrix

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]

MAX_WEYL_ORDER = 1152


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(b[0]) if b else 0
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(n)) for i in range(len(a))
    )


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element: its matrix on X_*, a reduced word in the simple reflections, and its index in BFS order"""
    matrix: Matrix
    word: Tuple[int, ...]
    index: int

    @property
    def length(self) -> int:
        return len(self.word)

    def apply(self, lam: Sequence[int]) -> Coweight:
        return apply_matrix(self.matrix, lam)

    def to_dict(self) -> Dict[str, Any]:
        return {"word": list(self.word), "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class AffineWeylElement:
    """(translation lambda, finite part w) in X_* x| W"""
    translation: Coweight
    weyl: int


# Name -> roots in X^*, coroots in X_*, simple root indices (identity pairing)
ROOT_DATUM_CATALOG: Dict[str, Dict[str, Any]] = {
    "SL2": {
        "roots": [[2], [-2]],
        "coroots": [[1], [-1]],
        "simple": [0],
    },
    "PGL2": {
        "roots": [[1], [-1]],
        "coroots": [[2], [-2]],
        "simple": [0],
    },
    "SL3": {
        "roots": [[2, -1], [-1, 2], [1, 1], [-2, 1], [1, -2], [-1, -1]],
        "coroots": [[1, 0], [0, 1], [1, 1], [-1, 0], [0, -1], [-1, -1]],
        "simple": [0, 1],
    },
    "Sp4": {
        "roots": [[2, -1], [-2, 2], [0, 1], [2, 0], [-2, 1], [2, -2], [0, -1], [-2, 0]],
        "coroots": [[1, 0], [0, 1], [1, 2], [1, 1], [-1, 0], [0, -1], [-1, -2], [-1, -1]],
        "simple": [0, 1],
    },
}


@dataclass
class RootDatum:
    """Validated root datum with its Weyl group enumerated in BFS order"""
    name: str
    rank: int
    roots: Tuple[Coweight, ...]
    coroots: Tuple[Coweight, ...]
    simple: Tuple[int, ...]
    pairing: Matrix
    weyl_elements: List[WeylElement] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._validate()
        self.weyl_elements = self._enumerate_weyl()
        self._index_by_matrix = {w.matrix: w.index for w in self.weyl_elements}
        self._multiplication: Dict[Tuple[int, int], int] = {}
        logger.debug(f"Root datum {self.name}: rank {self.rank}, |W| = {self.weyl_order}")

    # --- pairing and reflections -------------------------------------------------

    def pair(self, chi: Sequence[int], lam: Sequence[int]) -> int:
        return sum(chi[i] * self.pairing[i][j] * lam[j] for i in range(self.rank) for j in range(self.rank))

    def reflection_matrix(self, root_index: int) -> Matrix:
        """s_alpha on X_*: lambda -> lambda - <alpha, lambda> alpha^vee"""
        alpha, coroot = self.roots[root_index], self.coroots[root_index]
        columns = []
        for j in range(self.rank):
            e = [int(i == j) for i in range(self.rank)]
            a = self.pair(alpha, e)
            columns.append([e[i] - a * coroot[i] for i in range(self.rank)])
        return tuple(tuple(columns[j][i] for j in range(self.rank)) for i in range(self.rank))

    def reflect_root(self, root_index: int, chi: Sequence[int]) -> Coweight:
        """s_alpha on X^*: chi -> chi - <chi, alpha^vee> alpha"""
        alpha, coroot = self.roots[root_index], self.coroots[root_index]
        a = self.pair(chi, coroot)
        return tuple(chi[i] - a * alpha[i] for i in range(self.rank))

    def _validate(self):
        if len(self.roots) != len(self.coroots):
            raise InputError(f"{self.name}: {len(self.roots)} roots but {len(self.coroots)} coroots")
        if len(self.pairing) != self.rank or any(len(row) != self.rank for row in self.pairing):
            raise InputError(f"{self.name}: pairing must be {self.rank}x{self.rank}")
        for alpha, coroot in zip(self.roots, self.coroots):
            if len(alpha) != self.rank or len(coroot) != self.rank:
                raise InputError(f"{self.name}: root {alpha} / coroot {coroot} has wrong rank")
            if self.pair(alpha, coroot) != 2:
                raise InputError(f"{self.name}: <{list(alpha)}, {list(coroot)}> != 2")
        root_set = set(self.roots)
        if len(root_set) != len(self.roots):
            raise InputError(f"{self.name}: repeated roots")
        for i in range(len(self.roots)):
            for beta in self.roots:
                if self.reflect_root(i, beta) not in root_set:
                    raise InputError(f"{self.name}: reflection in root {i} does not permute the roots")
        if self.roots and not self.simple:
            raise InputError(f"{self.name}: simple roots must be given")
        if any(i < 0 or i >= len(self.roots) for i in self.simple):
            raise InputError(f"{self.name}: simple root index out of range")

    def _enumerate_weyl(self) -> List[WeylElement]:
        generators = [self.reflection_matrix(i) for i in self.simple]
        start = _identity(self.rank)
        seen = {start: ()}
        order = [start]
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for k, gen in enumerate(generators):
                product = _mat_mul(current, gen)
                if product not in seen:
                    seen[product] = seen[current] + (k,)
                    order.append(product)
                    queue.append(product)
                    if len(order) > MAX_WEYL_ORDER:
                        raise InputError(f"{self.name}: Weyl group is not finite (exceeded {MAX_WEYL_ORDER})")
        return [WeylElement(matrix=m, word=seen[m], index=i) for i, m in enumerate(order)]

    # --- Weyl group ---------------------------------------------------------------

    @property
    def weyl_order(self) -> int:
        return len(self.weyl_elements)

    @property
    def identity(self) -> WeylElement:
        return self.weyl_elements[0]

    def simple_reflections(self) -> List[WeylElement]:
        return [self.weyl_elements[self._index_by_matrix[self.reflection_matrix(i)]] for i in self.simple]

    def element_from_matrix(self, matrix: Sequence[Sequence[int]]) -> WeylElement:
        key = tuple(tuple(int(c) for c in row) for row in matrix)
        if key not in self._index_by_matrix:
            raise InputError(f"{self.name}: matrix {key} is not a Weyl element")
        return self.weyl_elements[self._index_by_matrix[key]]

    def element_from_word(self, word: Sequence[int]) -> WeylElement:
        matrix = _identity(self.rank)
        for k in word:
            if k < 0 or k >= len(self.simple):
                raise InputError(f"{self.name}: no simple reflection {k}")
            matrix = _mat_mul(matrix, self.reflection_matrix(self.simple[k]))
        return self.element_from_matrix(matrix)

    def multiply(self, a: int, b: int) -> int:
        """Index of w_a w_b"""
        key = (a, b)
        if key not in self._multiplication:
            product = _mat_mul(self.weyl_elements[a].matrix, self.weyl_elements[b].matrix)
            self._multiplication[key] = self._index_by_matrix[product]
        return self._multiplication[key]

    def inverse(self, a: int) -> int:
        for b in range(self.weyl_order):
            if self.multiply(a, b) == 0:
                return b
        raise InputError(f"{self.name}: Weyl element {a} has no inverse")

    def element_order(self, a: int) -> int:
        current, n = a, 1
        while current != 0:
            current = self.multiply(current, a)
            n += 1
        return n

    def stabilizer(self, lam: Sequence[int]) -> List[WeylElement]:
        lam = tuple(lam)
        return [w for w in self.weyl_elements if w.apply(lam) == lam]

    def orbit(self, lam: Sequence[int]) -> List[Coweight]:
        return sorted({w.apply(lam) for w in self.weyl_elements})

    def affine_multiply(self, a: AffineWeylElement, b: AffineWeylElement) -> AffineWeylElement:
        """(l1, w1)(l2, w2) = (l1 + w1 l2, w1 w2)"""
        moved = self.weyl_elements[a.weyl].apply(b.translation)
        return AffineWeylElement(
            tuple(x + y for x, y in zip(a.translation, moved)), self.multiply(a.weyl, b.weyl)
        )

    # --- dominance ----------------------------------------------------------------

    def is_dominant(self, lam: Sequence[int]) -> bool:
        return all(self.pair(self.roots[i], lam) >= 0 for i in self.simple)

    def dominant_representative(self, lam: Sequence[int]) -> Tuple[Coweight, WeylElement]:
        """(lambda+, w) with w lambda = lambda+; w is the first such element in BFS order"""
        lam = tuple(int(x) for x in lam)
        if len(lam) != self.rank:
            raise InputError(f"coweight {lam} has wrong rank for {self.name}")
        for w in self.weyl_elements:
            image = w.apply(lam)
            if self.is_dominant(image):
                return image, w
        raise InputError(f"{self.name}: no dominant element in the orbit of {lam}")

    def dominant_coweights(self, bound: int) -> List[Coweight]:
        """Dominant coweights with sup-norm <= bound, lexicographic"""
        box = itertools.product(range(-bound, bound + 1), repeat=self.rank)
        return sorted(lam for lam in box if self.is_dominant(lam))

    # --- discriminant ----------------------------------------------------------------

    def root_divisibility(self, root_index: int) -> int:
        """m_alpha: the gcd of the coordinates of alpha in X^*"""
        value = 0
        for c in self.roots[root_index]:
            value = gcd(value, abs(c))
        return value

    def weyl_matrices(self) -> List[Matrix]:
        return [w.matrix for w in self.weyl_elements]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "rank": self.rank,
            "roots": [list(a) for a in self.roots],
            "coroots": [list(a) for a in self.coroots],
            "simple": list(self.simple),
            "pairing": [list(r) for r in self.pairing],
            "weyl_order": self.weyl_order,
        }


def _as_root_index(rd: RootDatum, alpha) -> int:
    if isinstance(alpha, int):
        if not 0 <= alpha < len(rd.roots):
            raise InputError(f"{rd.name}: no root with index {alpha}")
        return alpha
    key = tuple(alpha)
    if key not in rd.roots:
        raise InputError(f"{rd.name}: {list(key)} is not a root")
    return rd.roots.index(key)


def build_root_datum(name_or_data) -> RootDatum:
    """Catalog lookup by name, or an explicit descriptor dict"""
    if isinstance(name_or_data, str):
        if name_or_data not in ROOT_DATUM_CATALOG:
            raise InputError(
                f"unknown root datum '{name_or_data}'; supported: {sorted(ROOT_DATUM_CATALOG)}"
            )
        data = dict(ROOT_DATUM_CATALOG[name_or_data])
        data["name"] = name_or_data
    elif isinstance(name_or_data, dict):
        data = dict(name_or_data)
    else:
        raise InputError(f"cannot build a root datum from {type(name_or_data).__name__}")
    roots = [tuple(int(c) for c in a) for a in data.get("roots", [])]
    coroots = [tuple(int(c) for c in a) for a in data.get("coroots", [])]
    if "rank" in data:
        rank = int(data["rank"])
    elif roots:
        rank = len(roots[0])
    elif data.get("pairing"):
        rank = len(data["pairing"])
    else:
        raise InputError("descriptor needs a rank, roots or a pairing matrix")
    pairing = data.get("pairing") or _identity(rank)
    return RootDatum(
        name=data.get("name", "custom"),
        rank=rank,
        roots=tuple(roots),
        coroots=tuple(coroots),
        simple=tuple(int(i) for i in data.get("simple", [])),
        pairing=tuple(tuple(int(c) for c in row) for row in pairing),
    )


def torus_datum(rank: int = 1) -> RootDatum:
    """Split torus of the given rank: no roots, trivial Weyl group"""
    return build_root_datum({"name": f"GL1^{rank}", "rank": rank})


def load_root_datum(path: str) -> RootDatum:
    """Read a root-datum JSON descriptor {name, pairing, roots, coroots, simple}"""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    return build_root_datum(data)


def alpha_star(rd: RootDatum, alpha) -> Coweight:
    """alpha^* = m_alpha * alpha^vee (additive notation)"""
    i = _as_root_index(rd, alpha)
    m = rd.root_divisibility(i)
    return tuple(m * c for c in rd.coroots[i])


def discriminant(rd: RootDatum, modulus: int) -> LatticeElement:
    """prod over all roots of (1 - delta_{alpha^*}) in (Z/modulus)[X_*]"""
    one = LatticeElement.constant(rd.rank, modulus, 1)
    result = one
    for i in range(len(rd.roots)):
        result = result * (one - LatticeElement.monomial(rd.rank, modulus, alpha_star(rd, i)))
    return result


# --- the rank-one dual-side map e_{psi, g} -------------------------------------------

def _mat2_mul(a, b, modulus: int):
    return [
        [(a[0][0] * b[0][0] + a[0][1] * b[1][0]) % modulus, (a[0][0] * b[0][1] + a[0][1] * b[1][1]) % modulus],
        [(a[1][0] * b[0][0] + a[1][1] * b[1][0]) % modulus, (a[1][0] * b[0][1] + a[1][1] * b[1][1]) % modulus],
    ]


def _mat2_pow(a, k: int, modulus: int):
    result = [[1, 0], [0, 1]]
    for _ in range(k):
        result = _mat2_mul(result, a, modulus)
    return result


@dataclass(frozen=True)
class DualElement:
    """A 2x2 matrix over Z/modulus, a point of the rank-one dual group"""
    matrix: Tuple[Tuple[int, int], Tuple[int, int]]
    modulus: int

    def __post_init__(self):
        rows = tuple(tuple(int(c) % self.modulus for c in row) for row in self.matrix)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise InputError("dual elements are 2x2 matrices")
        object.__setattr__(self, "matrix", rows)
        if gcd(self.determinant, self.modulus) != 1:
            raise InputError(f"matrix {rows} is not invertible mod {self.modulus}")

    @property
    def trace(self) -> int:
        return (self.matrix[0][0] + self.matrix[1][1]) % self.modulus

    @property
    def determinant(self) -> int:
        (a, b), (c, d) = self.matrix
        return (a * d - b * c) % self.modulus

    def adjugate(self):
        (a, b), (c, d) = self.matrix
        m = self.modulus
        return [[d % m, -b % m], [-c % m, a % m]]

    def is_scalar(self) -> bool:
        (a, b), (c, d) = self.matrix
        return b == 0 and c == 0 and a == d

    def is_regular_semisimple(self) -> bool:
        """Not scalar, and either tr^2 - 4 det is a unit or the matrix is diagonal with distinct entries"""
        if self.is_scalar():
            return False
        disc = (self.trace ** 2 - 4 * self.determinant) % self.modulus
        if gcd(disc, self.modulus) == 1:
            return True
        (a, b), (c, d) = self.matrix
        return b == 0 and c == 0 and a != d


def e_psi_g(psi: int, g: DualElement, x=1) -> List[List[int]]:
    """
    e_{psi,g}: Lie(T^vee) -> Lie(Z_g) for the rank-one dual group.

    psi = k * (standard character); x is the input t*diag(1, -1), given as the
    scalar t or as the 2x2 matrix. The image is t * (g^k - adj(g)^k), the sum
    over the two identifications of T^vee with the centralizer; for k = 1 it is
    t * (2g - trace(g)).
    """
    if not g.is_regular_semisimple():
        raise InputError(f"g = {[list(r) for r in g.matrix]} is not regular semisimple")
    m = g.modulus
    if isinstance(x, int):
        t = x
    else:
        (a, b), (c, d) = x
        if b % m or c % m or (a + d) % m:
            raise InputError("input must be a trace-zero diagonal matrix t*diag(1,-1)")
        t = a
    k = abs(int(psi))
    sign = -1 if psi < 0 else 1
    gk = _mat2_pow([list(r) for r in g.matrix], k, m)
    ak = _mat2_pow(g.adjugate(), k, m)
    return [[(sign * t * (gk[i][j] - ak[i][j])) % m for j in range(2)] for i in range(2)]

"""
Chain-level group cohomology from 2-periodic resolutions.

For a cyclic group C = <t> of order m the minimal free resolution of Z is

    ... --N--> Z[C] --(t-1)--> Z[C] --N--> Z[C] --(t-1)--> Z[C] --> Z

and for T = C_1 x ... x C_d we take the tensor product. A basis element
g * e_k of the total complex is stored as the pair (k, g) with k the
multidegree and g in T; chains are dicts {(k, g): coeff mod l^r}.

Chain maps over a homomorphism are built by the usual lifting argument
F(e_k) = h(F(d e_k)) with h the contracting homotopy. Cup products use a
diagonal approximation lifted the same way, restriction lifts along the
homomorphism, and corestriction lifts P(T)|_H -> P(H) over coset
representatives.

With r <= n_i every cochain differential vanishes, so cochains are their own
cohomology classes and nothing here needs a quotient.
"""

import logging
from functools import lru_cache
from typing import Any, Dict, List, Tuple

from src.hecke.core.coeff_groups import AbelianLGroup, GroupHom
from src.hecke.core.errors import InputError, VerificationError
from src.hecke.core.finite_cohomology import CohClass, CohRing, Monomial, coeff_change, monomial_degree
from src.hecke.core.modular_linalg import is_surjective, solve

logger = logging.getLogger(__name__)

Multidegree = Tuple[int, ...]
Element = Tuple[int, ...]
Chain = Dict[Tuple[Multidegree, Element], int]
Cochain = Dict[Multidegree, int]


def add_term(chain: Chain, key, c: int, modulus: int):
    value = (chain.get(key, 0) + c) % modulus
    if value:
        chain[key] = value
    elif key in chain:
        del chain[key]


def multidegrees(d: int, n: int) -> List[Multidegree]:
    """All k in N^d with |k| = n, lexicographically decreasing"""
    if d == 0:
        return [()] if n == 0 else []
    out = []
    for first in range(n, -1, -1):
        for rest in multidegrees(d - 1, n - first):
            out.append((first,) + rest)
    return out


class PeriodicResolution:
    """Tensor product of cyclic periodic resolutions of Z, reduced mod `modulus`"""

    def __init__(self, group: AbelianLGroup, modulus: int):
        self.group = group
        self.modulus = modulus
        self.orders = group.orders
        self.d = group.rank

    def zero_element(self) -> Element:
        return (0,) * self.d

    def zero_degree(self) -> Multidegree:
        return (0,) * self.d

    def base(self) -> Chain:
        return {(self.zero_degree(), self.zero_element()): 1}

    def boundary(self, k: Multidegree, g: Element) -> Chain:
        """d(g e_k), with the Koszul sign (-1)^{k_1 + ... + k_{i-1}} on factor i"""
        out: Chain = {}
        for i in range(self.d):
            if k[i] == 0:
                continue
            sign = -1 if sum(k[:i]) % 2 else 1
            lower = k[:i] + (k[i] - 1,) + k[i + 1:]
            m = self.orders[i]
            if k[i] % 2:
                shifted = g[:i] + ((g[i] + 1) % m,) + g[i + 1:]
                add_term(out, (lower, shifted), sign, self.modulus)
                add_term(out, (lower, g), -sign, self.modulus)
            else:
                for a in range(m):
                    shifted = g[:i] + ((g[i] + a) % m,) + g[i + 1:]
                    add_term(out, (lower, shifted), sign, self.modulus)
        return out

    def differential(self, chain: Chain) -> Chain:
        out: Chain = {}
        for (k, g), c in chain.items():
            for key, v in self.boundary(k, g).items():
                add_term(out, key, c * v, self.modulus)
        return out

    def homotopy(self, chain: Chain) -> Chain:
        """Contracting homotopy h with dh + hd = 1 - (base point) o augmentation"""
        out: Chain = {}
        for (k, g), c in chain.items():
            current = list(g)
            for i in range(self.d):
                a, ki, m = current[i], k[i], self.orders[i]
                raised = k[:i] + (ki + 1,) + k[i + 1:]
                if ki % 2 == 0:
                    for b in range(a):
                        target = current[:i] + [b] + current[i + 1:]
                        add_term(out, (raised, tuple(target)), c, self.modulus)
                elif a == m - 1:
                    target = current[:i] + [0] + current[i + 1:]
                    add_term(out, (raised, tuple(target)), c, self.modulus)
                if ki != 0:
                    break
                current[i] = 0
        return out

    def augmentation(self, chain: Chain) -> int:
        zero = self.zero_degree()
        return sum(c for (k, _), c in chain.items() if k == zero) % self.modulus

    def translate(self, chain: Chain, h: Element) -> Chain:
        out: Chain = {}
        for (k, g), c in chain.items():
            moved = tuple((x + y) % m for x, y, m in zip(g, h, self.orders))
            add_term(out, (k, moved), c, self.modulus)
        return out


@lru_cache(maxsize=None)
def resolution(group: AbelianLGroup, modulus: int) -> PeriodicResolution:
    return PeriodicResolution(group, modulus)


class ChainMapLift:
    """Chain map P(source) -> P(target) over f, equivariant for f and lifting the identity of Z"""

    def __init__(self, f: GroupHom, modulus: int):
        self.f = f
        self.modulus = modulus
        self.source = resolution(f.source, modulus)
        self.target = resolution(f.target, modulus)
        self._generators: Dict[Multidegree, Chain] = {}

    def on_generator(self, k: Multidegree) -> Chain:
        if k not in self._generators:
            if sum(k) == 0:
                self._generators[k] = self.target.base()
            else:
                z = self.apply(self.source.boundary(k, self.source.zero_element()))
                self._generators[k] = self.target.homotopy(z)
        return self._generators[k]

    def apply(self, chain: Chain) -> Chain:
        out: Chain = {}
        for (k, g), c in chain.items():
            image = self.target.translate(self.on_generator(k), self.f.apply(g))
            for key, v in image.items():
                add_term(out, key, c * v, self.modulus)
        return out


@lru_cache(maxsize=None)
def chain_map_lift(f: GroupHom, modulus: int) -> ChainMapLift:
    return ChainMapLift(f, modulus)


class TransferLift:
    """H-equivariant chain map P(G) -> P(H) for an injective f: H -> G, on the basis {c e_k : c a coset representative}"""

    def __init__(self, f: GroupHom, modulus: int):
        if not f.is_injective():
            raise InputError("transfer needs an injective homomorphism")
        self.f = f
        self.modulus = modulus
        self.big = resolution(f.target, modulus)
        self.small = resolution(f.source, modulus)
        self.representatives: List[Element] = []
        self._decomposition: Dict[Element, Tuple[Element, Element]] = {}
        subgroup = [(f.apply(h), h) for h in f.source.elements()]
        for g in f.target.elements():
            if g in self._decomposition:
                continue
            self.representatives.append(g)
            for image, h in subgroup:
                self._decomposition[f.target.add(g, image)] = (g, h)
        self._basis: Dict[Tuple[Element, Multidegree], Chain] = {}

    def on_basis(self, c: Element, k: Multidegree) -> Chain:
        key = (c, k)
        if key not in self._basis:
            if sum(k) == 0:
                self._basis[key] = self.small.base()
            else:
                z: Chain = {}
                for (lower, g), v in self.big.boundary(k, c).items():
                    rep, h = self._decomposition[g]
                    image = self.small.translate(self.on_basis(rep, lower), h)
                    for t, w in image.items():
                        add_term(z, t, v * w, self.modulus)
                self._basis[key] = self.small.homotopy(z)
        return self._basis[key]


@lru_cache(maxsize=None)
def transfer_lift(f: GroupHom, modulus: int) -> TransferLift:
    return TransferLift(f, modulus)


def evaluate(cochain: Cochain, chain: Chain, modulus: int) -> int:
    """Pair a cochain (trivial coefficients) with a chain"""
    return sum(c * cochain.get(k, 0) for (k, _), c in chain.items()) % modulus


class ChainLevelCohomology:
    """H*(T; Z/l^r) realised on cochains of the periodic resolution"""

    def __init__(self, ring: CohRing):
        self.ring = ring
        self.modulus = ring.modulus
        self.d = ring.d
        self.res = resolution(ring.group, self.modulus)
        doubled = AbelianLGroup(ring.coeff.ell, ring.group.exponents * 2)
        rows = tuple(tuple(int(i % self.d == j) for j in range(self.d)) for i in range(2 * self.d))
        self.diagonal = chain_map_lift(GroupHom(ring.group, doubled, rows), self.modulus)
        self._monomials: Dict[Monomial, Cochain] = {}
        self._basis_matrix: Dict[int, List[List[int]]] = {}

    def cup(self, phi: Cochain, p: int, psi: Cochain, q: int) -> Cochain:
        out: Cochain = {}
        for k in multidegrees(self.d, p + q):
            total = 0
            for (big, _), c in self.diagonal.on_generator(k).items():
                left, right = big[:self.d], big[self.d:]
                if sum(left) != p:
                    continue
                total += c * phi.get(left, 0) * psi.get(right, 0)
            total %= self.modulus
            if total:
                out[k] = total
        return out

    def generator_cocycle(self, kind: str, i: int) -> Cochain:
        k = [0] * self.d
        k[i] = 1 if kind == "x" else 2
        return {tuple(k): 1}

    def monomial_cocycle(self, monomial: Monomial) -> Cochain:
        """Ordered chain-level product x_{i_1} ... x_{i_s} y_1^{e_1} ... y_d^{e_d}"""
        if monomial not in self._monomials:
            xs, ys = monomial
            current: Cochain = {self.res.zero_degree(): 1}
            degree = 0
            for i in xs:
                current = self.cup(current, degree, self.generator_cocycle("x", i), 1)
                degree += 1
            for i, e in enumerate(ys):
                for _ in range(e):
                    current = self.cup(current, degree, self.generator_cocycle("y", i), 2)
                    degree += 2
            self._monomials[monomial] = current
        return self._monomials[monomial]

    def cocycle(self, a: CohClass, degree: int) -> Cochain:
        out: Cochain = {}
        for monomial, c in a.component(degree).terms.items():
            for k, v in self.monomial_cocycle(monomial).items():
                out[k] = (out.get(k, 0) + c * v) % self.modulus
        return {k: v for k, v in out.items() if v}

    def to_class(self, cochain: Cochain, degree: int) -> CohClass:
        basis = self.ring.basis(degree)
        if not basis:
            return self.ring.zero()
        if degree not in self._basis_matrix:
            columns = [self.monomial_cocycle(m) for m in basis]
            self._basis_matrix[degree] = [
                [col.get(k, 0) for col in columns] for k in multidegrees(self.d, degree)
            ]
        rhs = [cochain.get(k, 0) for k in multidegrees(self.d, degree)]
        solution = solve(self._basis_matrix[degree], rhs, self.ring.coeff.ell, self.ring.coeff.r)
        if solution is None:
            raise VerificationError(f"cochain {cochain} is not in the span of the degree-{degree} monomials")
        return self.ring.from_vector(degree, solution)


@lru_cache(maxsize=None)
def chain_model(ring: CohRing) -> ChainLevelCohomology:
    return ChainLevelCohomology(ring)


def chain_cup(a: CohClass, b: CohClass) -> CohClass:
    a._check(b)
    model = chain_model(a.ring)
    result = a.ring.zero()
    for p in a.degrees():
        for q in b.degrees():
            product = model.cup(model.cocycle(a, p), p, model.cocycle(b, q), q)
            result = result + model.to_class(product, p + q)
    return result


def chain_restrict(f: GroupHom, a: CohClass) -> CohClass:
    """Restriction computed by lifting f to a chain map between resolutions"""
    if f.target != a.ring.group:
        raise InputError("restriction along a homomorphism whose target is not the class's group")
    big = chain_model(a.ring)
    small = chain_model(CohRing(f.source, a.ring.coeff, a.ring.max_degree))
    lift = chain_map_lift(f, a.ring.modulus)
    result = small.ring.zero()
    for n in a.degrees():
        phi = big.cocycle(a, n)
        pulled = {}
        for k in multidegrees(f.source.rank, n):
            value = evaluate(phi, lift.on_generator(k), a.ring.modulus)
            if value:
                pulled[k] = value
        result = result + small.to_class(pulled, n)
    return result


def chain_corestrict(f: GroupHom, a: CohClass) -> CohClass:
    """Transfer computed as sum over coset representatives of the cocycle on the lifted chain map"""
    if f.source != a.ring.group:
        raise InputError("corestriction along a homomorphism whose source is not the class's group")
    small = chain_model(a.ring)
    big = chain_model(CohRing(f.target, a.ring.coeff, a.ring.max_degree))
    lift = transfer_lift(f, a.ring.modulus)
    result = big.ring.zero()
    for n in a.degrees():
        phi = small.cocycle(a, n)
        pushed = {}
        for k in multidegrees(f.target.rank, n):
            value = sum(
                evaluate(phi, lift.on_basis(c, k), a.ring.modulus) for c in lift.representatives
            ) % a.ring.modulus
            if value:
                pushed[k] = value
        result = result + big.to_class(pushed, n)
    return result


def check_resolution(group: AbelianLGroup, modulus: int, max_degree: int = 4) -> Dict[str, bool]:
    """d o d = 0 and dh + hd = 1 on generators up to max_degree"""
    res = resolution(group, modulus)
    d_squared = True
    contracting = True
    for n in range(max_degree + 1):
        for k in multidegrees(group.rank, n):
            for g in group.elements():
                basis = {(k, g): 1}
                if res.differential(res.differential(basis)):
                    d_squared = False
                total = res.differential(res.homotopy(basis))
                for key, v in res.homotopy(res.differential(basis)).items():
                    add_term(total, key, v, modulus)
                if n == 0:
                    add_term(total, (res.zero_degree(), res.zero_element()), res.augmentation(basis), modulus)
                if total != {(k, g): 1 % modulus}:
                    contracting = False
    return {"d_squared_zero": d_squared, "contracting_homotopy": contracting}


def check_coeff_change(ring: CohRing, m: int) -> Dict[str, Any]:
    """Reduction Z/l^r -> Z/l^m against the cochain model, with a surjectivity witness per degree.

    Every degree-n cochain over Z/l^m is a cocycle, so H^n(T; Z/l^m) is spanned by the
    indicator cochains e_k. Each e_k lifts to the Z/l^r cocycle with the same support;
    coeff_change of its class must be the class of e_k.
    """
    big = chain_model(ring)
    small = chain_model(ring.reduce_to(m))
    ell = ring.coeff.ell
    mismatches = []
    onto: Dict[int, bool] = {}
    for n in range(ring.max_degree + 1):
        basis = small.ring.basis(n)
        columns = []
        for k in multidegrees(ring.d, n):
            cochain = {k: 1}
            image = coeff_change(big.to_class(cochain, n), m)
            if image != small.to_class(cochain, n):
                mismatches.append({"degree": n, "multidegree": list(k)})
            columns.append([image.terms.get(monomial, 0) for monomial in basis])
        matrix = [[col[i] for col in columns] for i in range(len(basis))]
        onto[n] = is_surjective(matrix, ell, m) if basis else True
    return {
        "matches_chain_model": not mismatches,
        "surjective": all(onto.values()),
        "surjective_by_degree": {str(n): v for n, v in onto.items()},
        "mismatches": mismatches,
    }

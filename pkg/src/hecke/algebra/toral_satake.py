"""
Toral and spherical derived Hecke algebras

The toral algebra is S[X_*] (x) H*(T; S): finite-support maps from
cocharacters to cohomology classes, multiplied by convolution in the lattice
variable and cup product in the cohomology variable. The Weyl group acts by
(w.a)(w lambda) = w.(a(lambda)); its invariants are the derived spherical
Hecke algebra, which is represented here through this Satake image.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.hecke.core.coeff_groups import CoeffRing, ell_valuation
from src.hecke.core.errors import InputError, NonUnitError, RegimeError
from src.hecke.core.finite_cohomology import (
    DEFAULT_MAX_DEGREE, CohClass, CohRing, coeff_change, cup, torus_group, weyl_act,
)
from src.hecke.core.lattice_algebra import Coweight, LatticeElement, add_vectors, character_value, sup_norm
from src.hecke.core.modular_linalg import kernel_length
from src.hecke.core.root_datum import RootDatum

logger = logging.getLogger(__name__)


def torus_coh_ring(rd: RootDatum, q: int, S: CoeffRing, max_degree: int = DEFAULT_MAX_DEGREE) -> CohRing:
    """H*(T; S) for T the l-part of the split torus over F_q, i.e. X_* (x) Z/l^{v_l(q-1)}"""
    exponent = ell_valuation(q - 1, S.ell) if (q - 1) % S.ell == 0 else 0
    return CohRing(torus_group(rd.rank, S.ell, exponent), S, max_degree)


class ToralElement:
    """Finite-support map X_* -> H*(T; S)"""

    def __init__(self, rd: RootDatum, ring: CohRing, values: Dict[Sequence[int], CohClass] = None):
        if not ring.group.is_trivial() and ring.group.rank != rd.rank:
            raise InputError(
                f"torus of rank {ring.group.rank} does not match the root datum {rd.name} of rank {rd.rank}"
            )
        self.rd = rd
        self.ring = ring
        self.values: Dict[Coweight, CohClass] = {}
        for lam, cls in (values or {}).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != rd.rank:
                raise InputError(f"coweight {list(lam)} has wrong rank for {rd.name}")
            if cls.ring != ring:
                raise InputError(f"value at {list(lam)} lives over a different cohomology ring")
            if not cls.is_zero():
                self.values[lam] = cls

    # --- constructors ------------------------------------------------------------

    @classmethod
    def delta(cls, rd: RootDatum, ring: CohRing, lam: Sequence[int], value: Optional[CohClass] = None):
        return cls(rd, ring, {tuple(lam): value if value is not None else ring.one()})

    @classmethod
    def zero(cls, rd: RootDatum, ring: CohRing):
        return cls(rd, ring, {})

    @classmethod
    def one(cls, rd: RootDatum, ring: CohRing):
        return cls.delta(rd, ring, (0,) * rd.rank)

    @classmethod
    def from_lattice(cls, f: LatticeElement, rd: RootDatum, ring: CohRing, value: Optional[CohClass] = None):
        """f (x) value for f in S[X_*]"""
        value = value if value is not None else ring.one()
        return cls(rd, ring, {lam: value.scale(c) for lam, c in f.coeffs.items()})

    # --- arithmetic ---------------------------------------------------------------

    def _check(self, other: "ToralElement"):
        if not isinstance(other, ToralElement) or other.rd.name != self.rd.name or other.ring != self.ring:
            raise InputError("toral elements over different root data or cohomology rings")

    def __add__(self, other: "ToralElement") -> "ToralElement":
        self._check(other)
        out = dict(self.values)
        for lam, cls in other.values.items():
            out[lam] = out[lam] + cls if lam in out else cls
        return ToralElement(self.rd, self.ring, out)

    def __neg__(self) -> "ToralElement":
        return ToralElement(self.rd, self.ring, {lam: -cls for lam, cls in self.values.items()})

    def __sub__(self, other: "ToralElement") -> "ToralElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return toral_convolve(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, ToralElement):
            return NotImplemented
        return self.rd.name == other.rd.name and self.ring == other.ring and self.values == other.values

    def __repr__(self) -> str:
        if not self.values:
            return "0"
        return " + ".join(f"d{list(lam)}*({cls})" for lam, cls in self.items())

    def scale(self, c: int) -> "ToralElement":
        return ToralElement(self.rd, self.ring, {lam: cls.scale(c) for lam, cls in self.values.items()})

    def value(self, lam: Sequence[int]) -> CohClass:
        return self.values.get(tuple(lam), self.ring.zero())

    def items(self):
        return sorted(self.values.items())

    def support(self) -> List[Coweight]:
        return sorted(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def degrees(self) -> List[int]:
        return sorted({d for cls in self.values.values() for d in cls.degrees()})

    def component(self, degree: int) -> "ToralElement":
        return ToralElement(self.rd, self.ring, {lam: cls.component(degree) for lam, cls in self.values.items()})

    def restrict_support(self, bound: int) -> "ToralElement":
        return ToralElement(self.rd, self.ring, {lam: c for lam, c in self.values.items() if sup_norm(lam) <= bound})

    # --- Weyl action ----------------------------------------------------------------

    def act(self, w) -> "ToralElement":
        """(w.a)(w lambda) = w.(a(lambda))"""
        return ToralElement(
            self.rd, self.ring, {w.apply(lam): weyl_act(w, cls) for lam, cls in self.values.items()}
        )

    def invariance_defects(self) -> List[Dict[str, Any]]:
        defects = []
        for w in self.rd.weyl_elements:
            moved = self.act(w)
            if moved != self:
                diff = moved - self
                lam, cls = diff.items()[0]
                defects.append({"weyl_word": list(w.word), "coweight": list(lam), "difference": cls.to_json()})
        return defects

    def is_invariant(self) -> bool:
        return all(self.act(w) == self for w in self.rd.weyl_elements)

    # --- evaluation and coefficients -------------------------------------------------

    def evaluate(self, character_values: Sequence[int]) -> CohClass:
        """ev_chi = sum_lambda chi(lambda) a(lambda), chi given on the X_* basis with values in S"""
        total = self.ring.zero()
        for lam, cls in self.values.items():
            total = total + cls.scale(character_value(character_values, lam, self.ring.modulus))
        return total

    def coeff_change(self, m: int) -> "ToralElement":
        target = self.ring.reduce_to(m)
        return ToralElement(self.rd, target, {lam: coeff_change(cls, m) for lam, cls in self.values.items()})

    # --- serialization -----------------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        return {"support": [{"coweight": list(lam), "class": cls.to_json()} for lam, cls in self.items()]}

    @classmethod
    def from_json(cls, rd: RootDatum, ring: CohRing, payload: Dict[str, Any]):
        if not isinstance(payload, dict) or not isinstance(payload.get("support"), list):
            raise InputError("element payload must be an object with a 'support' list")
        values: Dict[Coweight, CohClass] = {}
        for i, entry in enumerate(payload["support"]):
            try:
                lam = tuple(int(x) for x in entry["coweight"])
                value = CohClass.from_json(ring, entry["class"])
            except (KeyError, TypeError, ValueError) as e:
                raise InputError(f"support entry {i}: {e}")
            values[lam] = values[lam] + value if lam in values else value
        return cls(rd, ring, values)


class SphericalElement(ToralElement):
    """A W-invariant toral element"""

    def __init__(self, rd: RootDatum, ring: CohRing, values: Dict[Sequence[int], CohClass] = None):
        super().__init__(rd, ring, values)
        defects = self.invariance_defects()
        if defects:
            raise InputError(f"element is not Weyl-invariant; first defect {defects[0]}")

    @classmethod
    def from_toral(cls, element: ToralElement) -> "SphericalElement":
        return cls(element.rd, element.ring, element.values)


def toral_convolve(a: ToralElement, b: ToralElement,
                   support_bound: Optional[int] = None,
                   degree_bound: Optional[int] = None) -> ToralElement:
    """(a*b)(lambda) = sum_{mu+nu=lambda} a(mu) cup b(nu), optionally truncated"""
    a._check(b)
    out: Dict[Coweight, CohClass] = {}
    for mu, ca in a.values.items():
        for nu, cb in b.values.items():
            lam = add_vectors(mu, nu)
            if support_bound is not None and sup_norm(lam) > support_bound:
                continue
            product = cup(ca, cb, degree_bound)
            out[lam] = out[lam] + product if lam in out else product
    result = ToralElement(a.rd, a.ring, out)
    if isinstance(a, SphericalElement) and isinstance(b, SphericalElement) and support_bound is None:
        return SphericalElement.from_toral(result)
    return result


def satake_basis(rd: RootDatum, ring: CohRing, lam: Sequence[int], alpha: CohClass) -> SphericalElement:
    """The invariant element supported on W lambda with value alpha at lambda"""
    lam = tuple(int(x) for x in lam)
    if not rd.is_dominant(lam):
        raise InputError(f"{list(lam)} is not dominant for {rd.name}")
    for w in rd.stabilizer(lam):
        if weyl_act(w, alpha) != alpha:
            raise InputError(
                f"class {alpha} is not invariant under the stabilizer of {list(lam)} "
                f"(moved by Weyl word {list(w.word)})"
            )
    values: Dict[Coweight, CohClass] = {}
    for w in rd.weyl_elements:
        values.setdefault(w.apply(lam), weyl_act(w, alpha))
    return SphericalElement(rd, ring, values)


def symmetrize(a: ToralElement) -> SphericalElement:
    """(1/|W|) sum_w w.a"""
    try:
        inverse = a.ring.coeff.inverse(a.rd.weyl_order)
    except NonUnitError:
        raise RegimeError(f"|W| = {a.rd.weyl_order} is not invertible in Z/{a.ring.modulus}")
    total = ToralElement.zero(a.rd, a.ring)
    for w in a.rd.weyl_elements:
        total = total + a.act(w)
    return SphericalElement.from_toral(total.scale(inverse))


def invariant_rank(rd: RootDatum, ring: CohRing, lam: Sequence[int], degree: int) -> int:
    """Rank of H^degree(T)^{W_lambda}, from the kernel of the stacked (w - 1)"""
    basis = ring.basis(degree)
    if not basis:
        return 0
    stabilizer = [w for w in rd.stabilizer(lam) if w.index != 0]
    if not stabilizer:
        return len(basis)
    rows: List[List[int]] = []
    for w in stabilizer:
        images = [weyl_act(w, ring.from_vector(degree, [int(i == j) for i in range(len(basis))])).vector(degree)
                  for j in range(len(basis))]
        for i in range(len(basis)):
            rows.append([(images[j][i] - int(i == j)) % ring.modulus for j in range(len(basis))])
    length = kernel_length(rows, ring.coeff.ell, ring.coeff.r)
    return length // ring.coeff.r


def invariant_dims(rd: RootDatum, T, S: CoeffRing, support_bound: int, degree_bound: int) -> pd.DataFrame:
    """
    Ranks of W-invariant elements per (orbit shell, degree).

    Shells are the W-orbits whose dominant representative has sup-norm at
    most support_bound; an invariant element on a shell is determined by its
    W_lambda-invariant value at the dominant representative.
    """
    ring = T if isinstance(T, CohRing) else CohRing(T, S, max(DEFAULT_MAX_DEGREE, degree_bound))
    records = []
    for lam in rd.dominant_coweights(support_bound):
        for degree in range(degree_bound + 1):
            records.append({
                "shell": str(list(lam)),
                "orbit_size": len(rd.orbit(lam)),
                "degree": degree,
                "rank": invariant_rank(rd, ring, lam, degree),
            })
    df = pd.DataFrame.from_records(records, columns=["shell", "orbit_size", "degree", "rank"])
    logger.info(f"Invariant ranks for {rd.name}, N={support_bound}, D={degree_bound}: {len(df)} rows")
    return df


def presentation_dims(df: pd.DataFrame) -> Dict[int, int]:
    """Total invariant rank per degree"""
    totals = df.groupby("degree")["rank"].sum()
    return {int(degree): int(rank) for degree, rank in totals.items()}


def spherical_from_lattice(f: LatticeElement, rd: RootDatum, ring: CohRing) -> SphericalElement:
    """f (x) 1 for an invariant f in S[X_*]^W"""
    return SphericalElement.from_toral(ToralElement.from_lattice(f, rd, ring))

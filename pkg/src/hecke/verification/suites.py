"""
Verification suites

Each suite runs a family of exact checks and returns a SuiteReport with pass
and fail counts plus a witness for every failure. Parameters come from
config/suite_config.json; a missing file falls back to built-in defaults.
Reports contain no timestamps, so identical inputs give identical output.
"""

import json
import logging
import random
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable, Dict, List, Optional

from src.hecke.algebra.iwahori_hecke import (
    IwahoriElement, center_report, chi_t, e_K, induced_rep, morita_check,
    spherical_compress, theta_projector, theta_values,
)
from src.hecke.algebra.koszul_ext import (
    GradedPolyBase, GroupRingSn, ext_quotient_module, ext_self_algebra,
    freeness_generation_check, group_ring_ext,
)
from src.hecke.algebra.toral_satake import (
    ToralElement, invariant_dims, presentation_dims, satake_basis, symmetrize, toral_convolve, torus_coh_ring,
)
from src.hecke.core.coeff_groups import AbelianLGroup, GroupHom, make_coeff
from src.hecke.core.errors import CompatibilityError, InputError, OrbitError
from src.hecke.core.finite_cohomology import CohClass, CohRing, corestrict, cup, restrict
from src.hecke.core.lattice_algebra import LatticeElement
from src.hecke.core.modular_linalg import rank_mod_p
from src.hecke.core.periodic_resolution import (
    chain_corestrict, chain_cup, chain_restrict, check_coeff_change, check_resolution,
)
from src.hecke.core.root_datum import build_root_datum
from src.hecke.infrastructure.monitoring import log_suite_report, monitor_check
from src.hecke.verification.torus_manifold import (
    ManifoldClass, Place, TorusManifold, action_endomorphism, derived_act,
    exterior_generation_report, intertwining_report, limit_assemble,
)
from src.hecke.verification.tree_oracle import (
    classical_relation, compare_with_model, oracle_setup, splitness_check,
)

logger = logging.getLogger(__name__)

SUITE_NAMES = [
    "satake-oracle",
    "commutativity",
    "presentation",
    "splitness",
    "iwahori",
    "koszul",
    "torus",
    "cohomology",
]


@dataclass
class SuiteReport:
    suite: str
    checks_passed: int = 0
    checks_failed: int = 0
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checks_failed == 0

    def record(self, check: str, ok: bool, witness: Optional[Dict[str, Any]] = None):
        if ok:
            self.checks_passed += 1
        else:
            self.checks_failed += 1
            self.witnesses.append({"check": check, **(witness or {})})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "checks_passed": self.checks_passed,
            "checks_failed": self.checks_failed,
            "witnesses": self.witnesses,
            "details": self.details,
        }


def _basis_classes(ring: CohRing, degree: int) -> List[CohClass]:
    size = ring.rank(degree)
    return [ring.from_vector(degree, [int(i == j) for i in range(size)]) for j in range(size)]


def _classes_up_to(ring: CohRing, max_degree: int) -> List[CohClass]:
    return [c for degree in range(max_degree + 1) for c in _basis_classes(ring, degree)]


class SuiteRunner:
    """Runs the named suites with parameters from the suite configuration"""

    def __init__(self, config_path: str = "config/suite_config.json", overrides: Optional[Dict[str, Any]] = None):
        self.config = self._load_suite_config(config_path)
        self.overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        self._suites: Dict[str, Callable[[], SuiteReport]] = {
            "satake-oracle": self.run_satake_oracle,
            "commutativity": self.run_commutativity,
            "presentation": self.run_presentation,
            "splitness": self.run_splitness,
            "iwahori": self.run_iwahori,
            "koszul": self.run_koszul,
            "torus": self.run_torus,
            "cohomology": self.run_cohomology,
        }

    def _load_suite_config(self, config_path: str) -> Dict[str, Any]:
        """Load suite parameters from JSON file"""
        try:
            with open(config_path, 'r') as f:
                return json.load(f)
        except FileNotFoundError:
            logger.warning(f"{config_path} not found, using default suite parameters")
            return self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        """Fallback default configuration"""
        return {
            "suites": {
                "satake-oracle": {"regimes": [[7, 3, 1], [13, 3, 1], [19, 3, 2]], "depth": 2, "window": 2},
                "commutativity": {
                    "pairs": 50, "seed": 20240,
                    "data": [["SL2", 7, 3], ["PGL2", 7, 3], ["SL3", 11, 5], ["Sp4", 7, 3]],
                    "support": 2, "degree": 2,
                },
                "presentation": {"group": "PGL2", "q": 7, "ell": 3, "r": 1, "bounds": [2, 3, 4], "degree": 2},
                "splitness": {"regimes": [[7, 3, 1], [19, 3, 2]], "depth": 2, "max_degree": 3},
                "iwahori": {"group": "PGL2", "p": 7, "q": 29, "chis": [[2], [1]], "radius": 3, "refinement_steps": 1},
                "koszul": {
                    "p": 3, "ext_ranks": [1, 2, 3, 4], "products_up_to": 3,
                    "generation": [[2, 1], [3, 1], [3, 2]],
                    "group_rings": [[3, 1, 1], [3, 1, 2], [3, 2, 1], [3, 2, 2]],
                    "max_degree": 3,
                },
                "torus": {"p": 3, "deltas": [1, 2, 3], "top_precision": 4},
                "cohomology": {
                    "ell": 3,
                    "groups": [{"orders": [3], "max_degree": 4}, {"orders": [9], "max_degree": 4},
                               {"orders": [3, 3], "max_degree": 4}, {"orders": [3, 9], "max_degree": 4},
                               {"orders": [9, 9], "max_degree": 4}],
                },
            }
        }

    def params(self, suite: str) -> Dict[str, Any]:
        defaults = self._get_default_config()["suites"].get(suite, {})
        params = dict(defaults)
        params.update(self.config.get("suites", {}).get(suite, {}))
        return params

    def _regimes(self, params: Dict[str, Any]) -> List[List[int]]:
        if {"q", "ell", "r"} <= set(self.overrides):
            return [[self.overrides["q"], self.overrides["ell"], self.overrides["r"]]]
        return params["regimes"]

    def run(self, suite: str) -> SuiteReport:
        if suite not in self._suites:
            raise InputError(f"unknown suite {suite}; expected one of {SUITE_NAMES}")
        report = self._suites[suite]()
        log_suite_report(report.to_dict())
        return report

    def run_all(self, suites: Optional[List[str]] = None) -> List[SuiteReport]:
        names = SUITE_NAMES if not suites or "all" in suites else suites
        return [self.run(name) for name in names]

    # --- suites -------------------------------------------------------------------

    @monitor_check("satake-oracle")
    def run_satake_oracle(self) -> SuiteReport:
        """Tree convolution against toral convolution for PGL2 basis pairs"""
        params = self.params("satake-oracle")
        depth = self.overrides.get("depth", params["depth"])
        window = min(params["window"], depth)
        report = SuiteReport("satake-oracle")
        for q, ell, r in self._regimes(params):
            rd, ring, tree = oracle_setup(q, ell, r, depth)
            basis = []
            for lam in [(0,), (1,)]:
                for alpha in _classes_up_to(ring, 1):
                    try:
                        basis.append(((lam, alpha.to_json()), satake_basis(rd, ring, lam, alpha)))
                    except InputError:
                        continue
            for label_a, a in basis:
                for label_b, b in basis:
                    result = compare_with_model(tree, a, b, window)
                    failed = [p for p in result.pairs if not p["match"]]
                    report.record("oracle_equivalence", result.passed, {
                        "q": q, "ell": ell, "r": r,
                        "a": {"lambda": list(label_a[0]), "class": label_a[1]},
                        "b": {"lambda": list(label_b[0]), "class": label_b[1]},
                        "mismatch": failed[:1],
                        "off_apartment_vanishes": result.off_apartment_vanishes,
                    })
            relation = classical_relation(tree, ring.coeff)
            report.record("classical_relation", relation["passed"], {"q": q, "counts": {str(k): v for k, v in relation["counts"].items()}})
            report.details[f"{q},{ell},{r}"] = {"basis_size": len(basis), "orbits": len(tree.orbits())}
        return report

    @monitor_check("commutativity")
    def run_commutativity(self) -> SuiteReport:
        """a * b = (-1)^{|a||b|} b * a on random homogeneous spherical elements"""
        params = self.params("commutativity")
        rng = random.Random(params["seed"])
        support, top = params["support"], params["degree"]
        report = SuiteReport("commutativity")
        for name, q, ell in params["data"]:
            rd = build_root_datum(name)
            ring = torus_coh_ring(rd, q, make_coeff(ell, 1))
            box = [lam for lam in rd.dominant_coweights(support)]

            def sample():
                degree = rng.randint(0, top)
                size = ring.rank(degree)
                lam = rng.choice(box)
                value = ring.from_vector(degree, [rng.randrange(ring.modulus) for _ in range(size)])
                return degree, symmetrize(ToralElement.delta(rd, ring, lam, value)).component(degree)

            for _ in range(params["pairs"]):
                da, a = sample()
                db, b = sample()
                left = toral_convolve(a, b)
                right = toral_convolve(b, a).scale((-1) ** (da * db))
                report.record("graded_commutativity", left == right, {
                    "group": name, "a": a.to_json(), "b": b.to_json(),
                })
        return report

    @monitor_check("presentation")
    def run_presentation(self) -> SuiteReport:
        """Invariant ranks for PGL2 are (N+1, N, N) in degrees 0, 1, 2"""
        params = self.params("presentation")
        rd = build_root_datum(params["group"])
        S = make_coeff(params["ell"], params["r"])
        ring = torus_coh_ring(rd, params["q"], S)
        report = SuiteReport("presentation")
        bounds = [self.overrides["support"]] if "support" in self.overrides else params["bounds"]
        for N in bounds:
            dims = presentation_dims(invariant_dims(rd, ring, S, N, params["degree"]))
            expected = {0: N + 1, 1: N, 2: N}
            observed = {d: dims.get(d, 0) for d in expected}
            report.record("presentation_dims", observed == expected, {
                "N": N, "observed": {str(k): v for k, v in observed.items()},
                "expected": {str(k): v for k, v in expected.items()},
            })
            report.details[str(N)] = [observed[d] for d in sorted(observed)]
        return report

    @monitor_check("splitness")
    def run_splitness(self) -> SuiteReport:
        """Corestriction from off-apartment stabilizers vanishes"""
        params = self.params("splitness")
        depth = self.overrides.get("depth", params["depth"])
        report = SuiteReport("splitness")
        for q, ell, r in self._regimes(params):
            result = splitness_check(q, ell, r, depth, params["max_degree"])
            report.record("corestriction_vanishes", result.passed, {
                "q": q, "ell": ell, "r": r, "violations": result.violations[:1], "witnesses": result.witnesses[:1],
            })
            report.details[f"{q},{ell},{r}"] = {
                "vertices": result.vertices_checked, "stabilizer_orders": result.stabilizer_orders,
            }
        return report

    @monitor_check("iwahori")
    def run_iwahori(self) -> SuiteReport:
        """Iwahori relations, the principal series, Morita ranks and the Theta projector"""
        params = self.params("iwahori")
        rd = build_root_datum(params["group"])
        p, radius = params["p"], params["radius"]
        report = SuiteReport("iwahori")

        one = IwahoriElement.one(rd, p)
        for s in rd.simple_reflections():
            t_s = IwahoriElement.weyl(rd, p, s.index)
            report.record("quadratic_relation", t_s * t_s == one, {"reflection": list(s.word)})
        idempotent = e_K(rd, p)
        report.record("e_K_idempotent", idempotent * idempotent == idempotent)

        z = LatticeElement(rd.rank, p, {lam: 1 for lam in rd.orbit(tuple(int(i == 0) for i in range(rd.rank)))})
        center = center_report(rd, z, radius)
        report.record("center", center.passed, {"violations": center.violations[:1]})

        ring = torus_coh_ring(rd, params["q"], make_coeff(p, 1))
        for values in params["chis"]:
            rep = induced_rep(rd, p, values)
            relations = rep.relations_report()
            report.record("principal_series_relations", all(relations.values()), {"chi": values, **relations})
            rank = rank_mod_p(rep.e_K_matrix(), p)
            report.record("e_K_rank_one", rank == 1, {"chi": values, "rank": rank})

            morita = morita_check(rd, p, values, min(radius, 2))
            if morita.applicable:
                report.record("morita", morita.passed, {"chi": values, "ranks": morita.ranks})
            report.details[f"morita {values}"] = morita.to_dict()

            chi = chi_t(rd, values, p)
            try:
                theta = theta_projector(rd, chi, params["refinement_steps"])
            except OrbitError as e:
                report.details[f"theta {values}"] = f"not applicable: {e}"
                continue
            observed = theta_values(rd, chi, theta)
            expected = [1] + [0] * (rd.weyl_order - 1)
            report.record("theta_interpolation", observed == expected, {"chi": values, "values": observed})
            for h in _classes_up_to(ring, 1):
                try:
                    compressed = spherical_compress(rd, theta, h, chi)
                    ok = all(abs(lam[0]) <= radius for lam in compressed.support()) if rd.rank == 1 else True
                    report.record("theta_compression", ok, {"chi": values, "h": h.to_json()})
                except CompatibilityError as e:
                    report.record("theta_compression", False, {"chi": values, "h": h.to_json(), "witness": e.witness})
        return report

    @monitor_check("koszul")
    def run_koszul(self) -> SuiteReport:
        """Ext ranks, products, quotient-module generation and the group-ring lemma"""
        params = self.params("koszul")
        coeff = make_coeff(params["p"], 1)
        top = params["max_degree"]
        report = SuiteReport("koszul")
        for R in params["ext_ranks"]:
            algebra = ext_self_algebra(GradedPolyBase(coeff, R), R)
            expected = [comb(R, i) for i in range(R + 1)]
            report.record("ext_ranks", algebra.ranks == expected, {"R": R, "ranks": algebra.ranks})
            report.details[f"ext_ranks R={R}"] = algebra.ranks
            if R <= params["products_up_to"]:
                report.record("lifts_are_chain_maps", algebra.lifts_are_chain_maps(), {"R": R})
                products = algebra.product_report()
                report.record("exterior_products", products["passed"], {"R": R, "failures": products["witness_failures"][:1]})
        for R, delta in params["generation"]:
            base = GradedPolyBase(coeff, R)
            U = list(range(delta))
            action = ext_quotient_module(base, U, min(top, R)).action_report()
            report.record("quotient_action", action["passed"], {"R": R, "U": U, "failures": action["witness_failures"][:1]})
            generation = freeness_generation_check(base, U, min(top, R))
            report.record("generation_from_degree_zero", generation.passed, {"R": R, "U": U, **generation.details})
        for p, n, rank in params["group_rings"]:
            result = group_ring_ext(GroupRingSn(p, n, n, rank), top)
            report.record("group_ring_ext", result.passed, {"p": p, "n": n, "R": rank, **result.to_dict()})
        return report

    @monitor_check("torus")
    def run_torus(self) -> SuiteReport:
        """Exterior generation, intertwining and limit assembly for torus manifolds"""
        params = self.params("torus")
        p, top = params["p"], self.overrides.get("precision", params["top_precision"])
        S = make_coeff(p, 1)
        report = SuiteReport("torus")
        for delta in params["deltas"]:
            identity = tuple(tuple(int(i == j) for j in range(delta)) for i in range(delta))
            m = TorusManifold(delta, [
                Place("v", AbelianLGroup(p, (2,) * delta), identity),
                Place("w", AbelianLGroup(p, (top,) * delta), identity),
            ])
            choices = [("v", [int(i == j) for j in range(delta)]) for i in range(delta)]
            generation = exterior_generation_report(m, S, choices)
            report.record("exterior_generation", generation.passed and generation.ranks == m.cohomology_ranks(),
                          {"delta": delta, "witnesses": generation.witnesses[:1]})
            report.details[f"ranks delta={delta}"] = generation.ranks

            if delta > 1:
                deficient = exterior_generation_report(m, S, choices[:-1] + [choices[0]])
                report.record("deficient_span_detected", not deficient.passed and bool(deficient.witnesses),
                              {"delta": delta})

            alpha = [j + 1 for j in range(delta)]
            intertwining = intertwining_report(m, "w", alpha, p, top)
            report.record("coefficient_intertwining", intertwining["passed"],
                          {"delta": delta, "failures": intertwining["failures"][:1]})

            levels = {n: action_endomorphism(m, "w", [a % p ** n for a in alpha], make_coeff(p, n))
                      for n in range(1, top + 1)}
            limit = limit_assemble(m, levels)
            round_trip = all(limit.reduce_to(n) == levels[n] for n in levels)
            report.record("limit_assembly", round_trip and limit == levels[top], {"delta": delta})

            omega = ManifoldClass.one(delta, make_coeff(p, top))
            twice = derived_act(m, "w", alpha, derived_act(m, "w", alpha, omega))
            report.record("square_zero", twice.is_zero(), {"delta": delta})
            scaled = derived_act(m, "w", alpha, omega.scale(2)) == derived_act(m, "w", alpha, omega).scale(2)
            report.record("scalars_commute", scaled, {"delta": delta})
        return report

    @monitor_check("cohomology")
    def run_cohomology(self) -> SuiteReport:
        """Closed-form cup, restriction and corestriction against the periodic resolution"""
        params = self.params("cohomology")
        ell = params["ell"]
        report = SuiteReport("cohomology")
        for entry in params["groups"]:
            group = AbelianLGroup.from_orders(entry["orders"])
            top = self.overrides.get("max_degree", entry["max_degree"])
            for r in range(1, min(group.exponents) + 1):
                if r > 2:
                    break
                S = make_coeff(ell, r)
                label = {"orders": entry["orders"], "r": r}
                resolution_ok = check_resolution(group, S.modulus, top)
                report.record("resolution", all(resolution_ok.values()), {**label, **resolution_ok})
                ring = CohRing(group, S, top)
                self._check_cup(report, ring, top, label)
                for f in self._test_homs(group, r):
                    self._check_transfer(report, f, S, top, label)
                if r > 1:
                    reduction = check_coeff_change(ring, 1)
                    report.record("coeff_change", reduction["matches_chain_model"] and reduction["surjective"],
                                  {**label, **reduction})
                    report.details[f"coeff_change {entry['orders']} Z/{S.modulus}"] = reduction["surjective_by_degree"]
        return report

    def _check_cup(self, report: SuiteReport, ring: CohRing, top: int, label: Dict[str, Any]):
        for a in _classes_up_to(ring, top):
            for b in _classes_up_to(ring, top - a.degree):
                if a.degree + b.degree > top:
                    continue
                engine, chain = cup(a, b), chain_cup(a, b)
                report.record("cup", engine == chain, {**label, "a": a.to_json(), "b": b.to_json(),
                                                       "engine": engine.to_json(), "chain": chain.to_json()})

    def _test_homs(self, group: AbelianLGroup, r: int) -> List[GroupHom]:
        """Identity, inversion, factor inclusions of index ell and first-factor inclusions"""
        homs = [GroupHom.identity(group), GroupHom.inversion(group)]
        d = group.rank
        for i, n in enumerate(group.exponents):
            if n - 1 >= r:
                sub = AbelianLGroup(group.ell, tuple(m - 1 if j == i else m for j, m in enumerate(group.exponents)))
                matrix = tuple(tuple((group.ell if j == i else 1) * int(j == k) for k in range(d)) for j in range(d))
                homs.append(GroupHom(sub, group, matrix))
        if d == 2:
            sub = AbelianLGroup(group.ell, (group.exponents[0],))
            homs.append(GroupHom(sub, group, ((1,), (0,))))
        return homs

    def _check_transfer(self, report: SuiteReport, f: GroupHom, S, top: int, label: Dict[str, Any]):
        big = CohRing(f.target, S, top)
        small = CohRing(f.source, S, top)
        hom = {**label, "hom": f.to_dict()}
        index = f.target.order // f.source.order
        for a in _classes_up_to(big, top):
            engine, chain = restrict(f, a), chain_restrict(f, a)
            report.record("restriction", engine == chain, {**hom, "class": a.to_json()})
            report.record("cores_res_index", corestrict(f, engine) == a.scale(index), {**hom, "class": a.to_json()})
        for b in _classes_up_to(small, top):
            engine = corestrict(f, b)
            report.record("corestriction", engine == chain_corestrict(f, b), {**hom, "class": b.to_json()})
            if f.source.rank < f.target.rank:
                # a factor of T is missed, so the transfer carries its order
                report.record("zero_transfer", engine.is_zero(), {**hom, "class": b.to_json()})
            for a in _classes_up_to(big, top - b.degree):
                left = corestrict(f, cup(restrict(f, a), b))
                report.record("projection_formula", left == cup(a, engine), {**hom, "a": a.to_json(), "b": b.to_json()})


def run_suites(names: List[str], config_path: str = "config/suite_config.json",
               overrides: Optional[Dict[str, Any]] = None) -> List[SuiteReport]:
    return SuiteRunner(config_path, overrides).run_all(names)

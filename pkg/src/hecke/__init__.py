"""
Derived Hecke algebras at finite level

Exact computations for derived Hecke algebras of split groups with
coefficients Z/l^r: toral and spherical models, the Iwahori algebra and its
principal series, Koszul Ext algebras, a Bruhat-Tits tree oracle for PGL2
and torus arithmetic manifolds, plus the verification suites tying them
together.
"""

# Package version
__version__ = "1.0.0"

# Re-export the main entry points
try:
    from src.hecke.core.errors import HeckeError, RegimeError, NonUnitError, InputError, OrbitError, CompatibilityError
    from src.hecke.core.coeff_groups import CoeffRing, AbelianLGroup, GroupHom, make_coeff, validate_regime
    from src.hecke.core.root_datum import RootDatum, build_root_datum, load_root_datum
    from src.hecke.core.finite_cohomology import CohRing, CohClass, cup, restrict, corestrict
    from src.hecke.algebra.toral_satake import ToralElement, SphericalElement, toral_convolve, satake_basis, invariant_dims
    from src.hecke.algebra.iwahori_hecke import IwahoriElement, morita_check, theta_projector, spherical_compress
    from src.hecke.algebra.koszul_ext import ext_self_algebra, ext_quotient_module, freeness_generation_check
    from src.hecke.verification.tree_oracle import build_tree, oracle_convolve, splitness_check
    from src.hecke.verification.torus_manifold import TorusManifold, congruence_class, derived_act, limit_assemble
    from src.hecke.verification.suites import SuiteRunner, SuiteReport, run_suites
except ModuleNotFoundError as e:
    # Only a missing numeric stack (pandas, sympy, numpy) is tolerated
    if e.name not in ("numpy", "pandas", "sympy"):
        raise
    import logging

    logging.getLogger(__name__).debug(f"hecke re-exports unavailable: {e}")

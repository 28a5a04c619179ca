"""
Command-line surface

    python -m src.hecke.cli satake multiply --group PGL2 --q 7 --ell 3 --r 1 a.json b.json
    python -m src.hecke.cli satake presentation --group PGL2 --support 3 --max-degree 2
    python -m src.hecke.cli verify --suite satake-oracle --q 7 --ell 3 --r 1 --depth 2

Reports go to stdout (or --out) as sorted JSON; logs go to stderr.
Exit codes: 0 pass, 1 verification failure, 2 regime error, 3 input error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError, field_validator

from src.hecke.algebra.toral_satake import (
    SphericalElement, ToralElement, invariant_dims, presentation_dims, toral_convolve, torus_coh_ring,
)
from src.hecke.core.coeff_groups import make_coeff, validate_regime
from src.hecke.core.errors import (
    CompatibilityError, InputError, NonUnitError, OrbitError, RegimeError, VerificationError,
)
from src.hecke.core.root_datum import build_root_datum
from src.hecke.infrastructure.monitoring import configure_logging
from src.hecke.verification.suites import SUITE_NAMES, run_suites
from src.hecke.verification.tree_oracle import MAX_DEPTH, MAX_Q

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_REGIME = 2
EXIT_INPUT = 3


class RunConfig(BaseModel):
    group: str = "PGL2"
    q: int = 7
    ell: int = 3
    r: int = 1
    max_degree: int = 4
    support: int = 2
    depth: int = 2
    suite: List[str] = []
    out: Optional[str] = None
    precision: int = 4
    config_path: str = "config/suite_config.json"

    @field_validator("q")
    @classmethod
    def q_in_range(cls, v: int) -> int:
        if not 2 <= v <= MAX_Q:
            raise ValueError(f"q must lie in 2..{MAX_Q}")
        return v

    @field_validator("depth")
    @classmethod
    def depth_in_range(cls, v: int) -> int:
        if not 1 <= v <= MAX_DEPTH:
            raise ValueError(f"tree depth must lie in 1..{MAX_DEPTH}")
        return v

    @field_validator("ell", "r", "precision")
    @classmethod
    def positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be positive")
        return v

    @field_validator("max_degree", "support")
    @classmethod
    def non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator("suite")
    @classmethod
    def known_suites(cls, v: List[str]) -> List[str]:
        unknown = [s for s in v if s not in SUITE_NAMES and s != "all"]
        if unknown:
            raise ValueError(f"unknown suites {unknown}; expected {SUITE_NAMES} or 'all'")
        return v


def _checked_setup(config: RunConfig):
    """Root datum and torus cohomology ring, after the regime check"""
    rd = build_root_datum(config.group)
    S = make_coeff(config.ell, config.r)
    report = validate_regime(rd, S, config.q)
    if not report.passed:
        raise RegimeError("; ".join(report.violations))
    ring = torus_coh_ring(rd, config.q, S, max(config.max_degree, 1))
    return rd, S, ring


def cmd_satake_multiply(config: RunConfig, payloads: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """Convolve the given elements left to right"""
    if len(payloads) < 2:
        raise InputError("multiply needs at least two elements")
    rd, S, ring = _checked_setup(config)
    elements = [ToralElement.from_json(rd, ring, p) for p in payloads]
    product = elements[0]
    for element in elements[1:]:
        product = toral_convolve(product, element, degree_bound=config.max_degree)
    return {
        "group": rd.name,
        "coefficients": S.to_dict(),
        "torus": ring.group.to_dict(),
        "spherical": product.is_invariant(),
        "product": product.to_json(),
    }


def cmd_satake_presentation(config: RunConfig) -> Dict[str, Any]:
    """Invariant ranks per shell and degree, with totals per degree"""
    rd, S, ring = _checked_setup(config)
    table = invariant_dims(rd, ring, S, config.support, config.max_degree)
    dims = presentation_dims(table)
    return {
        "group": rd.name,
        "support": config.support,
        "max_degree": config.max_degree,
        "table": table.to_dict(orient="records"),
        "dims": {str(d): v for d, v in sorted(dims.items())},
    }


def cmd_verify(config: RunConfig, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Run the selected suites; overrides carry only the flags given explicitly"""
    overrides = dict(overrides or {})
    if {"q", "ell", "r"} & set(overrides):
        _checked_setup(config)
    reports = run_suites(config.suite or ["all"], config.config_path, overrides)
    return {
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--group", type=str, default=None, help="Root datum name (SL2, PGL2, SL3, Sp4).")
    parent.add_argument("--q", type=int, default=None, help="Residue field size.")
    parent.add_argument("--ell", type=int, default=None, help="Coefficient prime.")
    parent.add_argument("--r", type=int, default=None, help="Coefficient exponent, S = Z/ell^r.")
    parent.add_argument("--max-degree", dest="max_degree", type=int, default=None, help="Cohomological degree cap.")
    parent.add_argument("--support", type=int, default=None, help="Support bound N.")
    parent.add_argument("--depth", type=int, default=None, help="Tree depth for the oracle.")
    parent.add_argument("--suite", action="append", default=None, help="Suite to run; repeatable.")
    parent.add_argument("--out", type=str, default=None, help="Write the report here instead of stdout.")
    parent.add_argument("--precision", type=int, default=None, help="Top p-adic precision for the torus suite.")
    parent.add_argument("--config", dest="config_path", type=str, default=None, help="Suite configuration file.")
    parent.add_argument("--log-level", dest="log_level", type=str, default="WARNING")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _common_flags()
    parser = argparse.ArgumentParser(description="Derived Hecke algebra computations and checks")
    subparsers = parser.add_subparsers(dest="command", required=True)

    satake = subparsers.add_parser("satake", parents=[parent], help="Toral and spherical algebra commands.")
    satake.add_argument("action", choices=["multiply", "presentation"])
    satake.add_argument("elements", nargs="*", help="Element JSON files for multiply.")

    subparsers.add_parser("verify", parents=[parent], help="Run verification suites.")
    return parser


FLAG_FIELDS = ["group", "q", "ell", "r", "max_degree", "support", "depth", "suite", "out", "precision", "config_path"]


def _read_json(path: str) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError(f"{path} not found")
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")


def _emit(payload: Dict[str, Any], out: Optional[str]):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    given = {name: getattr(args, name) for name in FLAG_FIELDS if getattr(args, name) is not None}
    try:
        config = RunConfig(**given)
        if args.command == "satake":
            if args.action == "multiply":
                payload = cmd_satake_multiply(config, [_read_json(p) for p in args.elements])
            else:
                payload = cmd_satake_presentation(config)
            _emit(payload, config.out)
            return EXIT_OK
        overrides = {k: v for k, v in given.items() if k in ("q", "ell", "r", "depth", "support", "max_degree", "precision")}
        payload = cmd_verify(config, overrides)
        _emit(payload, config.out)
        return EXIT_OK if payload["passed"] else EXIT_FAILED
    except RegimeError as e:
        logger.error(f"Regime error: {e}")
        _emit({"error": "regime", "message": str(e)}, None)
        return EXIT_REGIME
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        _emit({"error": "input", "message": str(e)}, None)
        return EXIT_INPUT
    except (InputError, NonUnitError) as e:
        logger.error(f"Input error: {e}")
        _emit({"error": "input", "message": str(e)}, None)
        return EXIT_INPUT
    except (VerificationError, OrbitError, CompatibilityError) as e:
        logger.error(f"Verification failed: {e}")
        _emit({"error": "verification", "message": str(e)}, None)
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())

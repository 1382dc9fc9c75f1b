"""Command line front end.

    drtwist check CONFIG
    drtwist cohomology CONFIG
    drtwist oracle CONFIG [--depth N] [--epsilon E] [--seed S]

A single JSON report goes to stdout; diagnostics go to stderr.
Exit codes: 0 Simple or pass, 1 NotSimple or fail, 2 Unknown, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from .cohomology import (Cocycle2, OutOfBoxError, antisymmetrize, bicharacter_from_cocycle, is_cohomologous,
                         twisted_group_algebra_simple, vanish_on_centre_normalize)
from .config import ConfigError, JobConfig, apply_env, load_config
from .exact_circle import format_angle
from .graphs import (GraphError, component_P_T, is_minimal, is_path_space_uncountable, label_sum,
                     primitive_cycles_in)
from .oracles import OracleResult, brute_force_P_T, circle_net, minimal_by_cylinders, uncountable_by_growth
from .spectral import NOT_SIMPLE, SIMPLE, UNKNOWN, Verdict, circle_dense, crossed_product_simple, simplicity_pipeline

log = logging.getLogger("drtwist")

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3
_STATUS_EXIT = {SIMPLE: EXIT_OK, NOT_SIMPLE: EXIT_FAIL, UNKNOWN: EXIT_UNKNOWN}


@dataclass
class Report:
    command: str
    input_echo: dict
    verdict: Verdict | None = None
    cohomology: dict | None = None
    oracle_results: list[OracleResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if self.verdict is not None:
            return _STATUS_EXIT[self.verdict.status]
        return EXIT_FAIL if any(not r.passed for r in self.oracle_results) else EXIT_OK

    def to_json(self, with_timings: bool = True) -> dict:
        out: dict[str, Any] = {"command": self.command}
        if self.verdict is not None:
            out["verdict"] = self.verdict.to_json()
        if self.cohomology is not None:
            out["cohomology"] = self.cohomology
        out["oracle_results"] = [r.to_json() for r in self.oracle_results]
        if with_timings:
            out["timings_ms"] = {k: round(v, 3) for k, v in self.timings.items()}
        out["input_echo"] = self.input_echo
        return out

    def dumps(self, with_timings: bool = True) -> str:
        return json.dumps(self.to_json(with_timings), indent=2, default=str)


@contextmanager
def _timed(report: Report, stage: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        report.timings[stage] = (time.perf_counter() - t0) * 1000.0


# --------------------------------------------------------------------------
# jobs

def run_check(cfg: JobConfig) -> Report:
    rep = Report("check", cfg.to_dict())
    if cfg.mode == "crossed-product":
        with _timed(rep, "build"):
            g, ell = cfg.graphs()[0], cfg.labelings()[0]
        with _timed(rep, "crossed_product_simple"):
            rep.verdict = crossed_product_simple(g, ell)
    elif cfg.mode == "simplicity":
        with _timed(rep, "build"):
            s, sigma = cfg.groupoid_cocycle()
        with _timed(rep, "simplicity_pipeline"):
            rep.verdict = simplicity_pipeline(s, sigma, flatten_radius=int(cfg.bounds["flatten_radius"]))
    else:
        raise ConfigError("mode", f"'check' runs simplicity or crossed-product jobs, not {cfg.mode!r}")
    return rep


def run_cohomology(cfg: JobConfig) -> Report:
    if cfg.cocycle is None or cfg.cocycle["kind"] != "degree":
        raise ConfigError("cocycle", "'cohomology' needs a cocycle with an explicit pairing")
    rep = Report("cohomology", cfg.to_dict())
    with _timed(rep, "normalize"):
        sigma = cfg.cocycle2()
        omega = bicharacter_from_cocycle(sigma)
        nf = vanish_on_centre_normalize(omega)
    skew = antisymmetrize(sigma)
    rep.cohomology = {
        "omega": omega.to_json(),
        "skew": skew.to_json(),
        **nf.to_json(),
        "centre_generators": nf.centre_generators(),
        "twisted_group_algebra_simple": twisted_group_algebra_simple(nf.omega_tilde),
    }
    with _timed(rep, "checks"):
        rep.oracle_results.append(OracleResult("omega_cohomologous_to_sigma",
                                               is_cohomologous(Cocycle2.of(omega), sigma), {}))
    return rep


def run_oracles(cfg: JobConfig) -> Report:
    """Definition-level cross-checks of every exact decision the system depends on."""
    rep = Report("oracle", cfg.to_dict())
    depth, eps, seed = int(cfg.bounds["depth"]), float(cfg.bounds["epsilon"]), cfg.seed
    samples, budget = int(cfg.bounds["samples"]), int(cfg.bounds["budget"])
    if not cfg.components:
        raise ConfigError("system", "'oracle' needs a system")
    replay = {"config": cfg.to_dict(), "command": "oracle"}
    for i, (g, ell) in enumerate(zip(cfg.graphs(), cfg.labelings())):
        where = {"component": i}
        with _timed(rep, f"component[{i}].minimality"):
            exact, brute = is_minimal(g), minimal_by_cylinders(g, depth)
        rep.oracle_results.append(_compare("minimality", exact, brute, where, replay))
        with _timed(rep, f"component[{i}].countability"):
            exact, brute = is_path_space_uncountable(g), uncountable_by_growth(g)
        rep.oracle_results.append(_compare("uncountable", exact, brute, where, replay))
        if is_minimal(g):
            with _timed(rep, f"component[{i}].P_T"):
                exact = component_P_T(g)
                brute = brute_force_P_T(g, max_prefix=depth, max_cycle=depth)
            rep.oracle_results.append(_compare("P_T_generator", exact, brute, where, replay))
        if ell is not None:
            with _timed(rep, f"component[{i}].cycle_labels"):
                gens = []
                for comp in g.components:
                    for n in range(1, depth + 1):
                        gens.extend(label_sum(ell, c) for c in primitive_cycles_in(g, comp, n))
                if gens:
                    dense, fam = circle_dense(gens)
                    res = circle_net(gens, dense, () if dense else fam, eps, samples, seed, budget)
                    res.details.update(where, claim_dense=dense, generators=[format_angle(a) for a in gens])
                    if not res.passed:
                        res.details["replay"] = replay
                    rep.oracle_results.append(res)
    return rep


def _compare(name: str, exact: Any, brute: Any, where: dict, replay: dict) -> OracleResult:
    ok = exact == brute
    details = {**where, "exact": exact, "oracle": brute}
    if not ok:
        details["replay"] = replay
    return OracleResult(name, ok, details)


COMMANDS = {"check": run_check, "cohomology": run_cohomology, "oracle": run_oracles}


def run(cfg: JobConfig, command: str | None = None) -> Report:
    command = command or {"cohomology": "cohomology", "oracle": "oracle"}.get(cfg.mode, "check")
    return COMMANDS[command](cfg)


# --------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="drtwist", description="Simplicity of twisted Deaconu-Renault groupoid algebras.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("check", help="simplicity or crossed-product verdict").add_argument("config")
    sub.add_parser("cohomology", help="normal form, centre and quotient of a cocycle").add_argument("config")
    orc = sub.add_parser("oracle", help="brute-force cross-checks")
    orc.add_argument("config")
    orc.add_argument("--depth", type=int)
    orc.add_argument("--epsilon", type=float)
    orc.add_argument("--seed", type=int)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="drtwist: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = apply_env(load_config(args.config))
        if args.command == "oracle":
            if args.depth is not None:
                cfg.bounds["depth"] = _flag("--depth", args.depth, 1)
            if args.epsilon is not None:
                if not 0 < args.epsilon < 0.5:
                    raise ConfigError("--epsilon", "must lie in (0, 0.5)")
                cfg.bounds["epsilon"] = args.epsilon
            if args.seed is not None:
                cfg.seed = _flag("--seed", args.seed, 0)
        report = run(cfg, args.command)
    except (ConfigError, GraphError, OutOfBoxError) as exc:
        print(f"drtwist: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report.dumps() + "\n")
    log.debug("timings: %s", report.timings)
    return report.exit_code


def _flag(name: str, value: int, minimum: int) -> int:
    if value < minimum:
        raise ConfigError(name, f"must be >= {minimum}")
    return value


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

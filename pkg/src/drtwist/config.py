"""Job configuration: one schema, read from TOML or JSON.

Every validation failure raises :class:`ConfigError` carrying the dotted path
of the offending field, so the CLI can point at it.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Mapping

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .cohomology import Bicharacter, Cocycle2, OneCochain
from .exact_circle import AngleParseError, IrrationalBasis, format_angle, parse_angle
from .graphs import EdgeLabeling, Graph, GraphError, ProductSystem
from .groupoid import LOOP_GRAPH, CHCocycle, CocycleSpec, DegreeCocycle

MODES = ("simplicity", "crossed-product", "cohomology", "oracle")
COCYCLE_KINDS = ("trivial", "degree", "labels")
ENV_PREFIX = "DRTWIST_"

DEFAULT_BOUNDS: dict[str, int | float] = {
    "epsilon": 0.05,
    "samples": 10_000,
    "budget": 20_000,
    "depth": 6,
    "flatten_radius": 2,
    "max_prefix": 4,
    "max_cycle": 4,
    "max_degree": 4,
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(path, message)


def _keys(d: Any, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    _expect(isinstance(d, Mapping), path, "expected a table")
    for k in d:
        _expect(k in allowed, f"{path}.{k}" if path else k, "unknown key")
    for k in sorted(required):
        _expect(k in d, f"{path}.{k}" if path else k, "missing required key")
    return dict(d)


def _angle(text: Any, basis: IrrationalBasis, path: str):
    try:
        return parse_angle(text, basis)
    except AngleParseError as exc:
        raise ConfigError(path, str(exc)) from None


def _int(v: Any, path: str, minimum: int | None = None) -> int:
    _expect(isinstance(v, int) and not isinstance(v, bool), path, "expected an integer")
    if minimum is not None:
        _expect(v >= minimum, path, f"must be >= {minimum}")
    return v


@dataclass
class JobConfig:
    mode: str
    seed: int
    bounds: dict[str, int | float]
    irrationals: dict[str, float] = field(default_factory=dict)
    components: list[dict] = field(default_factory=list)
    cocycle: dict | None = None

    # -- derived objects -------------------------------------------------------
    @property
    def basis(self) -> IrrationalBasis:
        return IrrationalBasis.of(self.irrationals)

    def graphs(self) -> list[Graph]:
        return [Graph.build([(e["name"], e["o"], e["t"]) for e in c["edges"]], c["vertices"])
                for c in self.components]

    def labelings(self) -> list[EdgeLabeling | None]:
        out = []
        for c in self.components:
            if all("label" in e for e in c["edges"]):
                out.append(EdgeLabeling({e["name"]: parse_angle(e["label"], self.basis) for e in c["edges"]}))
            else:
                out.append(None)
        return out

    def system(self) -> ProductSystem:
        return ProductSystem.of(*zip(self.graphs(), self.labelings()))

    def cocycle2(self) -> Cocycle2:
        c = self.cocycle
        basis = self.basis
        rank = c["rank"]
        base = Bicharacter.from_rows([[parse_angle(a, basis) for a in row] for row in c["pairing"]])
        chain = None
        if c.get("cochain"):
            chain = OneCochain(rank, {tuple(item["at"]): parse_angle(item["value"], basis) for item in c["cochain"]})
        return Cocycle2(rank, base, chain)

    def groupoid_cocycle(self) -> tuple[ProductSystem, CocycleSpec]:
        """System and groupoid cocycle for the simplicity pipeline."""
        kind = (self.cocycle or {"kind": "trivial"})["kind"]
        if kind == "labels":
            g, ell = self.graphs()[0], self.labelings()[0]
            return ProductSystem.of((g, ell), LOOP_GRAPH), CHCocycle(g, ell)
        s = self.system()
        if kind == "trivial":
            return s, DegreeCocycle(Cocycle2.trivial(s.k))
        return s, DegreeCocycle(self.cocycle2())

    # -- canonical form --------------------------------------------------------
    def to_dict(self) -> dict:
        out: dict[str, Any] = {"mode": self.mode, "seed": self.seed, "bounds": dict(self.bounds)}
        if self.irrationals:
            out["irrationals"] = dict(self.irrationals)
        if self.components:
            out["system"] = {"components": self.components}
        if self.cocycle is not None:
            out["cocycle"] = self.cocycle
        return out


# --------------------------------------------------------------------------
# parsing

def _parse_component(raw: Any, basis: IrrationalBasis, path: str) -> dict:
    d = _keys(raw, path, {"vertices", "edges"}, {"edges"})
    edges_raw = d["edges"]
    _expect(isinstance(edges_raw, list) and edges_raw, f"{path}.edges", "expected a non-empty list")
    edges = []
    for j, e in enumerate(edges_raw):
        ep = f"{path}.edges[{j}]"
        e = _keys(e, ep, {"name", "o", "t", "label"}, {"name", "o", "t"})
        for k in ("name", "o", "t"):
            _expect(isinstance(e[k], str) and e[k], f"{ep}.{k}", "expected a non-empty string")
        item = {"name": e["name"], "o": e["o"], "t": e["t"]}
        if "label" in e:
            item["label"] = format_angle(_angle(e["label"], basis, f"{ep}.label"))
        edges.append(item)
    if "vertices" in d:
        vs = d["vertices"]
        _expect(isinstance(vs, list) and all(isinstance(v, str) for v in vs), f"{path}.vertices",
                "expected a list of strings")
    else:
        seen: dict[str, None] = {}
        for e in edges:
            seen.setdefault(e["o"])
            seen.setdefault(e["t"])
        vs = list(seen)
    labelled = [("label" in e) for e in edges]
    _expect(all(labelled) or not any(labelled), f"{path}.edges",
            "either every edge carries a label or none does")
    comp = {"vertices": list(vs), "edges": edges}
    try:
        Graph.build([(e["name"], e["o"], e["t"]) for e in edges], vs)
    except GraphError as exc:
        raise ConfigError(path, str(exc)) from None
    return comp


def _parse_cocycle(raw: Any, basis: IrrationalBasis, path: str = "cocycle") -> dict:
    d = _keys(raw, path, {"kind", "rank", "pairing", "cochain"})
    kind = d.get("kind", "degree")
    _expect(kind in COCYCLE_KINDS, f"{path}.kind", f"must be one of {list(COCYCLE_KINDS)}")
    if kind != "degree":
        extra = sorted(set(d) - {"kind"})
        _expect(not extra, f"{path}.{extra[0]}" if extra else path, f"not used by kind {kind!r}")
        return {"kind": kind}
    for k in ("rank", "pairing"):
        _expect(k in d, f"{path}.{k}", "missing required key")
    rank = _int(d["rank"], f"{path}.rank", 1)
    rows = d["pairing"]
    _expect(isinstance(rows, list) and len(rows) == rank, f"{path}.pairing", f"expected {rank} rows")
    pairing = []
    for i, row in enumerate(rows):
        _expect(isinstance(row, list) and len(row) == rank, f"{path}.pairing[{i}]", f"expected {rank} entries")
        pairing.append([format_angle(_angle(a, basis, f"{path}.pairing[{i}][{j}]")) for j, a in enumerate(row)])
    out: dict[str, Any] = {"kind": "degree", "rank": rank, "pairing": pairing}
    if "cochain" in d:
        items = d["cochain"]
        _expect(isinstance(items, list), f"{path}.cochain", "expected a list of {at, value} tables")
        chain = []
        for j, item in enumerate(items):
            ip = f"{path}.cochain[{j}]"
            item = _keys(item, ip, {"at", "value"}, {"at", "value"})
            at = item["at"]
            _expect(isinstance(at, list) and len(at) == rank, f"{ip}.at", f"expected {rank} integers")
            at = [_int(v, f"{ip}.at[{i}]") for i, v in enumerate(at)]
            val = _angle(item["value"], basis, f"{ip}.value")
            _expect(any(at) or val.rational == 0 and not val.coeffs, f"{ip}.value", "cochain must vanish at 0")
            chain.append({"at": at, "value": format_angle(val)})
        chain.sort(key=lambda c: c["at"])
        out["cochain"] = chain
    return out


def _parse_bounds(raw: Any) -> dict:
    d = _keys(raw, "bounds", set(DEFAULT_BOUNDS))
    out = dict(DEFAULT_BOUNDS)
    for k, v in d.items():
        out[k] = _bound_value(k, v, f"bounds.{k}")
    return out


def _bound_value(key: str, v: Any, path: str) -> int | float:
    if key == "epsilon":
        _expect(isinstance(v, (int, float)) and not isinstance(v, bool), path, "expected a number")
        _expect(0 < float(v) < 0.5 and math.isfinite(float(v)), path, "must lie in (0, 0.5)")
        return float(v)
    return _int(v, path, 0 if key == "max_prefix" else 1)


def from_dict(doc: Any) -> JobConfig:
    d = _keys(doc, "", {"mode", "seed", "bounds", "irrationals", "system", "cocycle"}, {"mode"})
    mode = d["mode"]
    _expect(mode in MODES, "mode", f"must be one of {list(MODES)}")
    seed = _int(d.get("seed", 0), "seed", 0)
    bounds = _parse_bounds(d.get("bounds", {}))

    irr_raw = d.get("irrationals", {})
    _expect(isinstance(irr_raw, Mapping), "irrationals", "expected a table of symbol = approximation")
    irrationals = {}
    for k, v in irr_raw.items():
        _expect(isinstance(v, (int, float)) and not isinstance(v, bool), f"irrationals.{k}",
                "expected a numeric approximation in turns")
        irrationals[k] = float(v)
    try:
        basis = IrrationalBasis.of(irrationals)
    except ValueError as exc:
        raise ConfigError("irrationals", str(exc)) from None

    components = []
    if "system" in d:
        sysd = _keys(d["system"], "system", {"components"}, {"components"})
        comps = sysd["components"]
        _expect(isinstance(comps, list) and comps, "system.components", "expected a non-empty list")
        components = [_parse_component(c, basis, f"system.components[{i}]") for i, c in enumerate(comps)]

    cocycle = _parse_cocycle(d["cocycle"], basis) if "cocycle" in d else None
    cfg = JobConfig(mode, seed, bounds, irrationals, components, cocycle)
    _check_mode(cfg)
    return cfg


def _check_mode(cfg: JobConfig) -> None:
    if cfg.mode in ("simplicity", "crossed-product", "oracle"):
        _expect(bool(cfg.components), "system", f"required in mode {cfg.mode!r}")
    if cfg.mode == "cohomology":
        _expect(cfg.cocycle is not None, "cocycle", "required in mode 'cohomology'")
        _expect(cfg.cocycle["kind"] == "degree", "cocycle.kind", "cohomology needs an explicit pairing")
    if cfg.mode == "crossed-product":
        _expect(len(cfg.components) == 1, "system.components", "crossed-product takes exactly one graph")
        _expect(cfg.cocycle is None, "cocycle", "not used in mode 'crossed-product'; the edge labels define it")
        _expect(all("label" in e for e in cfg.components[0]["edges"]), "system.components[0].edges",
                "crossed-product needs a label on every edge")
    if cfg.mode == "simplicity" and cfg.cocycle is not None:
        kind = cfg.cocycle["kind"]
        if kind == "labels":
            _expect(len(cfg.components) == 1, "system.components", "labelled cocycles take exactly one graph")
            _expect(all("label" in e for e in cfg.components[0]["edges"]), "system.components[0].edges",
                    "labelled cocycles need a label on every edge")
        if kind == "degree":
            _expect(cfg.cocycle["rank"] == len(cfg.components), "cocycle.rank",
                    f"must equal the number of components ({len(cfg.components)})")


def parse_config(text: str, fmt: str = "toml") -> JobConfig:
    fmt = fmt.lower()
    if fmt == "toml":
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("", f"TOML syntax error: {exc}") from None
    elif fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    else:
        raise ConfigError("", f"unknown config format {fmt!r}")
    return from_dict(doc)


def load_config(path: str) -> JobConfig:
    fmt = "json" if path.endswith(".json") else "toml"
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, fmt)


def apply_env(cfg: JobConfig, environ: Mapping[str, str] | None = None) -> JobConfig:
    """``DRTWIST_SEED`` and ``DRTWIST_BOUNDS_<NAME>`` override the file."""
    environ = os.environ if environ is None else environ
    for key in DEFAULT_BOUNDS:
        var = f"{ENV_PREFIX}BOUNDS_{key.upper()}"
        if var in environ:
            cfg.bounds[key] = _bound_value(key, _number(environ[var], var), var)
    if f"{ENV_PREFIX}SEED" in environ:
        cfg.seed = _int(_number(environ[f"{ENV_PREFIX}SEED"], f"{ENV_PREFIX}SEED"), f"{ENV_PREFIX}SEED", 0)
    return cfg


def _number(text: str, path: str) -> int | float:
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            continue
    raise ConfigError(path, f"not a number: {text!r}")

"""Run configuration: a strict, versioned TOML schema.

Reproducibility beats convenience here: the schema is versioned, unknown keys
are hard errors (a typo must never silently fall back to a default), and every
section gets a content hash so certificates stay bound to the instance that
produced them.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .primal import SigmaWeight
from .regions import validate
from .scalars import rational
from .serialize import section_hash
from .spectra import build_structure

SCHEMA_VERSION = 1

_FINITE_KINDS = ("cyclic", "finite_abelian", "dihedral")
_CONTINUOUS_KINDS = ("circle", "sphere")

_ALLOWED = {
    "": {"schema", "structure", "region", "sigma", "epsilon", "sweep"},
    "structure": {"kind", "order", "moduli", "dimension", "truncation",
                  "grid_size", "arith"},
    "region": {"flavour", "omega_plus", "omega_minus", "arc_plus", "arc_minus",
               "cap_plus_degrees", "cap_minus_degrees"},
    "sigma": {"point_mass", "density", "tail_inf"},
    "epsilon": {"value", "levels"},
    "sweep": {"parameter", "values"},
}

_SWEEP_PARAMETERS = ("interval_radius", "arc_plus", "cap_plus_degrees", "epsilon")


class ConfigError(ValueError):
    """Schema violation; the message names the offending key or value."""


def _check_keys(table: dict, section: str):
    allowed = _ALLOWED[section]
    for key in table:
        if key not in allowed:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} at {where}")


def _require(table: dict, key: str, section: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{section}]")
    return table[key]


@dataclass
class RunConfig:
    structure: dict
    region: dict
    sigma: dict
    epsilon: dict
    sweep: dict
    hashes: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.structure["kind"]

    @property
    def continuous(self) -> bool:
        return self.kind in _CONTINUOUS_KINDS

    @property
    def arith(self) -> str:
        return self.structure.get("arith", "float" if self.continuous else "exact")


def load_config(path: str) -> RunConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    _check_keys(raw, "")
    if raw.get("schema") != SCHEMA_VERSION:
        raise ConfigError(
            f"config schema must be {SCHEMA_VERSION}, got {raw.get('schema')!r}"
        )
    structure = _require(raw, "structure", "top level")
    region = _require(raw, "region", "top level")
    sigma = raw.get("sigma", {})
    epsilon = raw.get("epsilon", {})
    sweep = raw.get("sweep", {})
    for name, table in (("structure", structure), ("region", region),
                        ("sigma", sigma), ("epsilon", epsilon), ("sweep", sweep)):
        if not isinstance(table, dict):
            raise ConfigError(f"[{name}] must be a table")
        _check_keys(table, name)

    kind = _require(structure, "kind", "structure")
    if kind not in _FINITE_KINDS + _CONTINUOUS_KINDS:
        raise ConfigError(f"unknown structure kind {kind!r}")
    arith = structure.get("arith", "float" if kind in _CONTINUOUS_KINDS else "exact")
    if arith not in ("exact", "float"):
        raise ConfigError(f"arith must be 'exact' or 'float', got {arith!r}")
    if arith == "exact" and kind in _CONTINUOUS_KINDS:
        raise ConfigError(f"{kind} structures support only arith = 'float'")

    flavour = region.get("flavour")
    if flavour is not None and flavour not in ("turan", "delsarte", "two_sided"):
        raise ConfigError(f"unknown flavour {flavour!r}")
    _check_region_keys_for_kind(kind, region)

    if sweep:
        parameter = _require(sweep, "parameter", "sweep")
        if parameter not in _SWEEP_PARAMETERS:
            raise ConfigError(
                f"sweep parameter must be one of {_SWEEP_PARAMETERS}, "
                f"got {parameter!r}"
            )
        values = _require(sweep, "values", "sweep")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep values must be a nonempty list")

    cfg = RunConfig(structure=dict(structure), region=dict(region),
                    sigma=dict(sigma), epsilon=dict(epsilon), sweep=dict(sweep))
    cfg.hashes = {
        "structure": section_hash(cfg.structure),
        "region": section_hash(cfg.region),
        "sigma": section_hash(cfg.sigma),
    }
    return cfg


def _check_region_keys_for_kind(kind: str, region: dict):
    finite = kind in _FINITE_KINDS
    if finite:
        bad = [k for k in ("arc_plus", "arc_minus", "cap_plus_degrees",
                           "cap_minus_degrees") if k in region]
        if bad:
            raise ConfigError(f"{bad[0]!r} does not apply to finite structures")
        _require(region, "omega_plus", "region")
    elif kind == "circle":
        bad = [k for k in ("omega_plus", "omega_minus", "cap_plus_degrees",
                           "cap_minus_degrees") if k in region]
        if bad:
            raise ConfigError(f"{bad[0]!r} does not apply to the circle")
        _require(region, "arc_plus", "region")
    else:  # sphere
        bad = [k for k in ("omega_plus", "omega_minus", "arc_plus", "arc_minus")
               if k in region]
        if bad:
            raise ConfigError(f"{bad[0]!r} does not apply to the sphere")
        _require(region, "cap_plus_degrees", "region")

    flavour = region.get("flavour")
    minus_key = {"circle": "arc_minus", "sphere": "cap_minus_degrees"}.get(
        kind, "omega_minus"
    )
    has_minus = minus_key in region and region[minus_key] != "all"
    if flavour == "delsarte" and has_minus:
        raise ConfigError(
            f"flavour 'delsarte' forbids {minus_key!r} (it forces no lower "
            "constraint)"
        )
    if flavour == "turan" and has_minus:
        raise ConfigError(
            f"flavour 'turan' forbids {minus_key!r} (the lower region is "
            "forced equal to the upper one)"
        )
    if flavour == "two_sided" and not has_minus:
        raise ConfigError(f"flavour 'two_sided' requires {minus_key!r}")


def parse_exact(ctx, value):
    """Interpret a TOML scalar (int, float, or 'p/q' string) in the context."""
    if isinstance(value, str):
        return ctx.coerce(rational(value)) if ctx.exact else float(rational(value))
    return ctx.coerce(value)


def build_instance(cfg: RunConfig, *, arith=None, truncation=None,
                   region_override=None):
    """Materialize (structure, region, sigma) from a parsed config.

    ``region_override`` replaces single keys in [region] (used by sweeps);
    continuous structures get the region boundaries pinned into their grids so
    the sampled constraints include the support boundary.
    """
    s = cfg.structure
    r = dict(cfg.region)
    if region_override:
        r.update(region_override)
    arith = arith or cfg.arith
    kind = cfg.kind

    extra = []
    if kind == "circle":
        extra.append(float(r["arc_plus"]))
        if isinstance(r.get("arc_minus"), (int, float)):
            extra.append(float(r["arc_minus"]))
    elif kind == "sphere":
        extra.append(math.radians(float(r["cap_plus_degrees"])))
        if isinstance(r.get("cap_minus_degrees"), (int, float)):
            extra.append(math.radians(float(r["cap_minus_degrees"])))

    structure = build_structure(
        kind,
        moduli=s.get("moduli"),
        order=s.get("order"),
        dimension=s.get("dimension"),
        truncation=truncation or s.get("truncation"),
        grid_size=s.get("grid_size"),
        extra_points=extra,
        arith=arith,
    )

    flavour = r.get("flavour")
    if kind in _FINITE_KINDS:
        plus = r["omega_plus"]
        minus = r.get("omega_minus", "all")
        if flavour == "turan":
            minus = plus
        elif flavour == "delsarte":
            minus = "all"
        region = validate(structure, omega_plus=plus, omega_minus=minus)
    else:
        if kind == "circle":
            plus_angle = float(r["arc_plus"])
            minus = r.get("arc_minus", "all")
            minus_angle = None if minus == "all" else float(minus)
        else:
            plus_angle = math.radians(float(r["cap_plus_degrees"]))
            minus = r.get("cap_minus_degrees", "all")
            minus_angle = None if minus == "all" else math.radians(float(minus))
        if flavour == "turan":
            minus_angle = plus_angle
        elif flavour == "delsarte":
            minus_angle = None
        if minus_angle is None:
            region = validate(structure, plus_angle=plus_angle)
        else:
            region = validate(structure, plus_angle=plus_angle,
                              minus_angle=minus_angle)

    sigma = _build_sigma(structure, cfg.sigma)
    return structure, region, sigma


def _build_sigma(structure, table: dict) -> SigmaWeight:
    if not table:
        return SigmaWeight.dirac(structure)
    ctx = structure.ctx
    c = parse_exact(ctx, table.get("point_mass", 1))
    density = table.get("density")
    if density is None:
        density = [0] * len(structure.grid)
    elif len(density) != len(structure.grid):
        raise ConfigError(
            f"sigma density needs {len(structure.grid)} entries "
            f"(one per grid point), got {len(density)}"
        )
    density = [parse_exact(ctx, v) for v in density]
    tail_inf = table.get("tail_inf")
    if tail_inf is not None:
        tail_inf = parse_exact(ctx, tail_inf)
    return SigmaWeight.mixture(structure, c, density, tail_inf=tail_inf)


def epsilon_value(cfg: RunConfig, ctx, override=None):
    """The single relaxation parameter for a solve (0 when unspecified)."""
    raw = override if override is not None else cfg.epsilon.get("value", 0)
    eps = parse_exact(ctx, raw)
    return eps

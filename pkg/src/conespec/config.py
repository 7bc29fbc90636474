"""Run configuration: INI sections whose values are JSON.

Bare words that are not valid JSON are read as strings, so ``cmd = sweep``
and ``cmd = "sweep"`` mean the same thing. Unknown sections and keys are
rejected; every error names the file, line, section and key.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .channel_model import CapCondition, Geometry, channels_from_pairs, make_channels
from .cross_section import (
    CatalogError,
    CrossSectionSpectrum,
    build_a_spectrum,
    catalog_lookup,
    load_custom_file,
)

COMMANDS = ("a-spectrum", "eps-spectrum", "limit-spectrum", "sweep", "pseudomode",
            "topology", "verify")

SCHEMA = {
    "run": {"cmd"},
    "cross_section": {"catalog", "params", "cutoff", "custom_file", "n", "betti",
                      "coexact_modes", "allow_incomplete"},
    "geometry": {"channels", "channel_cutoff", "r0", "cap_m2", "cap_m1", "cap_m2_overrides",
                 "cap_m1_overrides"},
    "sweep": {"eps", "count", "pseudomode_gamma"},
    "topology": {"decompositions", "predict"},
    "outputs": {"dir"},
}

# sections each command needs
REQUIRED = {
    "a-spectrum": ("cross_section",),
    "eps-spectrum": ("geometry",),
    "limit-spectrum": ("geometry",),
    "sweep": ("geometry",),
    "pseudomode": ("geometry",),
    "topology": ("topology",),
    "verify": (),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    path: Path
    values: dict[str, dict[str, object]]
    lines: dict[tuple[str, str], int]

    def has(self, section: str) -> bool:
        return section in self.values

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def where(self, section: str, key: str | None = None) -> str:
        line = self.lines.get((section, key or ""), 0)
        loc = f"{self.path}:{line}" if line else str(self.path)
        return f"{loc} [{section}]" + (f" {key}" if key else "")

    def error(self, section: str, key: str | None, msg: str) -> ConfigError:
        return ConfigError(f"{self.where(section, key)}: {msg}")

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.path.parent / p


def _line_numbers(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = ""
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines.setdefault((section, ""), i)
        elif s and s[0] not in "#;" and "=" in s and not raw[:1].isspace():
            lines.setdefault((section, s.split("=", 1)[0].strip()), i)
    return lines


def _value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    lines = _line_numbers(text)
    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            line = lines.get((section, ""), 0)
            raise ConfigError(f"{path}:{line}: unknown section [{section}]; "
                              f"expected one of {sorted(SCHEMA)}")
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                line = lines.get((section, key), 0)
                raise ConfigError(f"{path}:{line} [{section}] {key}: unknown key; "
                                  f"expected one of {sorted(SCHEMA[section])}")
            values[section][key] = _value(raw)
    return RunConfig(path, values, lines)


def resolve_command(cfg: RunConfig, override: str | None) -> str:
    cmd = override or cfg.get("run", "cmd")
    if cmd is None:
        raise ConfigError(f"{cfg.path}: no command; set [run] cmd or pass --cmd")
    if cmd not in COMMANDS:
        where = cfg.where("run", "cmd") if override is None else "--cmd"
        raise ConfigError(f"{where}: unknown command {cmd!r}; expected one of {list(COMMANDS)}")
    for section in REQUIRED[cmd]:
        if not cfg.has(section):
            raise ConfigError(f"{cfg.path}: command {cmd!r} needs a [{section}] section")
    return cmd


def _number(cfg: RunConfig, section: str, key: str, default=None, positive=False) -> float:
    v = cfg.get(section, key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise cfg.error(section, key, f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise cfg.error(section, key, "must be positive")
    return float(v)


def _integer(cfg: RunConfig, section: str, key: str, default: int) -> int:
    v = cfg.get(section, key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise cfg.error(section, key, f"expected a positive integer, got {v!r}")
    return v


def cross_section_from(cfg: RunConfig) -> CrossSectionSpectrum:
    s = "cross_section"
    if not cfg.has(s):
        raise ConfigError(f"{cfg.path}: missing [{s}] section")
    sources = [k for k in ("catalog", "custom_file", "n") if cfg.get(s, k) is not None]
    if len(sources) != 1:
        raise cfg.error(s, None, "give exactly one of catalog, custom_file or inline n/betti")
    cutoff = _number(cfg, s, "cutoff", 3.0, positive=True)
    try:
        if sources[0] == "catalog":
            return catalog_lookup(str(cfg.get(s, "catalog")), cfg.get(s, "params"), cutoff,
                                  bool(cfg.get(s, "allow_incomplete", False)))
        if sources[0] == "custom_file":
            cs = load_custom_file(cfg.resolve(str(cfg.get(s, "custom_file"))))
            if cfg.get(s, "cutoff") is None:
                return cs
            return CrossSectionSpectrum(cs.n, cs.betti, cs.coexact_modes, cutoff, True, cs.label)
        modes = cfg.get(s, "coexact_modes", [])
        if not isinstance(modes, list) or any(not isinstance(m, list) or len(m) != 3 for m in modes):
            raise cfg.error(s, "coexact_modes", "expected a list of [p, mu_sq, mult]")
        betti = cfg.get(s, "betti")
        if not isinstance(betti, list):
            raise cfg.error(s, "betti", "expected a list of integers")
        return CrossSectionSpectrum(cfg.get(s, "n"), tuple(betti),
                                    tuple(tuple(m) for m in modes), cutoff, True, "inline")
    except (CatalogError, OSError, TypeError) as exc:
        raise cfg.error(s, sources[0], str(exc)) from None


def _cap(cfg: RunConfig, key: str, value) -> CapCondition:
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict):
        raise cfg.error("geometry", key, f"expected a cap object, got {value!r}")
    try:
        return CapCondition.from_dict(value)
    except (ValueError, TypeError) as exc:
        raise cfg.error("geometry", key, str(exc)) from None


def _overrides(cfg: RunConfig, key: str):
    raw = cfg.get("geometry", key, [])
    if not isinstance(raw, list):
        raise cfg.error("geometry", key, "expected a list of [gamma, cap]")
    out = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2):
            raise cfg.error("geometry", key, f"entry {item!r} is not [gamma, cap]")
        out.append((float(item[0]), _cap(cfg, key, item[1])))
    return tuple(out)


def geometry_from(cfg: RunConfig) -> Geometry:
    g = "geometry"
    if not cfg.has(g):
        raise ConfigError(f"{cfg.path}: missing [{g}] section")
    chans = cfg.get(g, "channels")
    try:
        if chans == "from_cross_section":
            cut = cfg.get(g, "channel_cutoff")
            cut = None if cut is None else _number(cfg, g, "channel_cutoff", positive=True)
            channels = tuple(make_channels(build_a_spectrum(cross_section_from(cfg)), cut))
        elif isinstance(chans, list) and chans:
            channels = channels_from_pairs(chans)
        else:
            raise cfg.error(g, "channels",
                            "expected a non-empty list of [gamma, mult] or \"from_cross_section\"")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise cfg.error(g, "channels", str(exc)) from None
    try:
        return Geometry(channels, _number(cfg, g, "r0", 0.5),
                        _cap(cfg, "cap_m2", cfg.get(g, "cap_m2", "dirichlet")),
                        _cap(cfg, "cap_m1", cfg.get(g, "cap_m1", "dirichlet")),
                        _overrides(cfg, "cap_m2_overrides"), _overrides(cfg, "cap_m1_overrides"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise cfg.error(g, None, str(exc)) from None


def eps_list_from(cfg: RunConfig, default) -> tuple[float, ...]:
    v = cfg.get("sweep", "eps")
    if v is None:
        return tuple(default)
    if not isinstance(v, list) or not v or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise cfg.error("sweep", "eps", "expected a non-empty list of numbers")
    return tuple(float(x) for x in v)


def count_from(cfg: RunConfig, default: int = 5) -> int:
    return _integer(cfg, "sweep", "count", default)


def pseudomode_gamma_from(cfg: RunConfig) -> float:
    return _number(cfg, "sweep", "pseudomode_gamma", 0.5)

"""Scenario configuration files.

A scenario is an INI-style text file::

    [model]
    variant = toxic

    [params]
    m = 1.35
    ...

    [initial]
    P = 1.0
    S = 6.0
    U = 4.0

    [integrate]
    t_end = 1000
    rtol = 1e-8

    [output]
    csv = run.csv

Unknown sections and keys are rejected.  Errors name the file, the line
and the offending key.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dynamics import IntegrationSettings
from .errors import ConfigError
from .model import PARAM_NAMES, ParameterSet, Variant

SECTIONS = ("model", "params", "initial", "integrate", "output")
INTEGRATE_KEYS = ("t_end", "rtol", "atol", "dt_init", "dt_max", "record_every")
OUTPUT_KEYS = ("csv", "svg", "report")

# rates the variant ignores may be omitted
_OPTIONAL_PARAMS = {
    Variant.CLASSICAL: {"b": 0.0, "beta": 1.0, "mu": 1.0},
    Variant.AVOIDED: {"b": 0.0},
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


@dataclass(frozen=True)
class ScenarioConfig:
    params: ParameterSet
    initial: tuple | None = None
    integrate: IntegrationSettings | None = None
    output: dict = field(default_factory=dict)

    @property
    def variant(self) -> Variant:
        return self.params.variant

    def dump(self) -> str:
        """Canonical text form; :func:`parse_config_text` reproduces ``self`` exactly."""
        lines = ["[model]", f"variant = {self.variant.value}", "", "[params]"]
        lines += [f"{name} = {getattr(self.params, name)!r}" for name in PARAM_NAMES]
        if self.initial is not None:
            lines += ["", "[initial]"]
            lines += [f"{n} = {v!r}" for n, v in zip(initial_keys(self.variant), self.initial)]
        if self.integrate is not None:
            lines += ["", "[integrate]"]
            for key in INTEGRATE_KEYS:
                value = getattr(self.integrate, key)
                if value is not None:
                    lines.append(f"{key} = {float(value)!r}")
        if self.output:
            lines += ["", "[output]"]
            lines += [f"{k} = {self.output[k]}" for k in OUTPUT_KEYS if k in self.output]
        return "\n".join(lines) + "\n"


def initial_keys(variant: Variant) -> tuple[str, ...]:
    return ("P", "Q") if variant is Variant.CLASSICAL else ("P", "S", "U")


def _line_index(text: str) -> dict:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), n)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip()), n)
    return index


def parse_config_text(text: str, path: str | Path = "<string>",
                      require: tuple[str, ...] = ()) -> ScenarioConfig:
    """Parse scenario text; ``require`` lists sections that must be present."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], path=path,
                          line=getattr(exc, "lineno", None)) from None
    lines = _line_index(text)

    def err(msg, section, key=None):
        return ConfigError(msg, path=path, line=lines.get((section, key)), key=key)

    for section in parser.sections():
        if section not in SECTIONS:
            raise err(f"unknown section [{section}]", section)
    for section in ("model", "params", *require):
        if not parser.has_section(section):
            raise ConfigError(f"missing section [{section}]", path=path)

    def number(section, key):
        raw = parser.get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise err(f"expected a number, got {raw!r}", section, key) from None

    def check_keys(section, allowed):
        for key in parser.options(section):
            if key not in allowed:
                raise err(f"unknown key in [{section}]", section, key)

    check_keys("model", ("variant",))
    if not parser.has_option("model", "variant"):
        raise err("missing required key", "model", "variant")
    try:
        variant = Variant.parse(parser.get("model", "variant"))
    except ValueError as exc:
        raise err(str(exc), "model", "variant") from None

    check_keys("params", PARAM_NAMES)
    values = {}
    for name in PARAM_NAMES:
        if not parser.has_option("params", name):
            if name in _OPTIONAL_PARAMS.get(variant, {}):
                values[name] = _OPTIONAL_PARAMS[variant][name]
                continue
            raise ConfigError("missing required key in [params]", path=path, key=name)
        values[name] = number("params", name)
    try:
        params = ParameterSet(**values, variant=variant)
    except ValueError as exc:
        bad = next((n for n in PARAM_NAMES if f"parameter {n} " in str(exc)), None)
        raise err(str(exc), "params", bad) from None

    initial = None
    if parser.has_section("initial"):
        keys = initial_keys(variant)
        check_keys("initial", keys)
        for key in keys:
            if not parser.has_option("initial", key):
                raise ConfigError("missing required key in [initial]", path=path, key=key)
        initial = tuple(number("initial", k) for k in keys)
        for k, v in zip(keys, initial):
            if v < 0.0:
                raise err("initial populations must be nonnegative", "initial", k)

    integrate = None
    if parser.has_section("integrate"):
        check_keys("integrate", INTEGRATE_KEYS)
        if not parser.has_option("integrate", "t_end"):
            raise ConfigError("missing required key in [integrate]", path=path, key="t_end")
        kwargs = {k: number("integrate", k) for k in parser.options("integrate")}
        try:
            integrate = IntegrationSettings(**kwargs)
        except ValueError as exc:
            bad = next((k for k in INTEGRATE_KEYS if str(exc).startswith(k)), None)
            raise err(str(exc), "integrate", bad) from None

    output = {}
    if parser.has_section("output"):
        check_keys("output", OUTPUT_KEYS)
        output = {k: parser.get("output", k) for k in parser.options("output")}

    return ScenarioConfig(params=params, initial=initial, integrate=integrate, output=output)


def load_config(path: str | Path, require: tuple[str, ...] = ()) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", path=path) from None
    return parse_config_text(text, path=path, require=require)


def bundled_config_text(figure: int) -> str:
    if figure not in (1, 2, 3):
        raise ValueError(f"figure must be 1, 2 or 3, got {figure!r}")
    return resources.files("ecoepi").joinpath("configs").joinpath(f"fig{figure}.ini").read_text(encoding="utf-8")


def bundled_config(figure: int) -> ScenarioConfig:
    """The shipped scenario reproducing one of the three toxic-variant figures."""
    return parse_config_text(bundled_config_text(figure), path=f"<bundled fig{figure}.ini>",
                             require=("initial", "integrate"))

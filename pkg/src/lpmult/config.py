"""Run configuration read from INI files.

A configuration has the sections `[run]`, `[grid]`, `[sweep]` and `[norm]`. Lists are
comma separated; `inf` is accepted wherever an exponent may be infinite. Every value is
validated before anything is computed, and errors point at the line of the offending key.
See `configs/default.ini` for a complete example.
"""
from __future__ import annotations

import logging
import re
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar, Union

from lpmult import DEFAULT_L, DEFAULT_N, DEFAULT_SEED
from lpmult.dyadic import max_level
from lpmult.exceptions import ConfigError, ParameterError, WeightError
from lpmult.grid import FamilyKind, GridSpec
from lpmult.multiplier.sweep import LADDER, SweepConfig
from lpmult.norms import SpaceSpec
from lpmult.verify import Suite

_logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")
COMMANDS = ("verify", "sweep", "norm")
SECTIONS = ("run", "grid", "sweep", "norm")

T = TypeVar("T")


@dataclass(frozen=True)
class RunConfig:
    command: Optional[str] = None
    """Subcommand run when none is given on the command line."""

    suite: str = "all"
    d: int = 1
    L: float = DEFAULT_L
    Ns: Tuple[int, ...] = (DEFAULT_N,)
    K: Optional[int] = None
    seed: int = DEFAULT_SEED
    workers: int = 1
    out: Optional[Path] = None
    """Where reports go; standard output when unset."""

    format: Optional[str] = None
    """Report format; sweeps write CSV and `norm` prints a text table when unset."""

    s_values: Tuple[float, ...] = (0.3,)
    p_values: Tuple[float, ...] = (2.0,)
    gamma_values: Tuple[float, ...] = (0.0,)
    families: Tuple[str, ...] = (LADDER,)
    spaces: Tuple[str, ...] = ("H",)
    ladder_depth: int = 3
    norm_field: str = "gaussian"
    """Family label of the field tabulated by the `norm` command."""

    norm_params: Dict[str, float] = field(default_factory=dict)
    norm_spaces: Tuple[str, ...] = ("L", "H", "B2", "F2")

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            self.s_values,
            self.p_values,
            self.gamma_values,
            self.Ns,
            self.families,
            self.spaces,
            d=self.d,
            L=self.L,
            K=self.K,
            seed=self.seed,
            ladder_depth=self.ladder_depth,
            workers=self.workers,
        )

    def with_overrides(
        self,
        out: Optional[Path] = None,
        format: Optional[str] = None,
        workers: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> RunConfig:
        """Apply command-line flags on top of the file values."""
        updated = self
        if out is not None:
            updated = replace(updated, out=out)
        if format is not None:
            updated = replace(updated, format=_check_format(format, None))
        if workers is not None:
            if workers < 1:
                raise ConfigError(f"workers must be positive, got {workers}")
            updated = replace(updated, workers=workers)
        if seed is not None:
            updated = replace(updated, seed=seed)
        return updated


class _Located:
    """Values of a parsed file together with the line each key came from."""

    def __init__(self, parser: ConfigParser, lines: Dict[Tuple[str, str], int]) -> None:
        self._parser = parser
        self._lines = lines

    def line(self, section: str, key: str) -> Optional[int]:
        return self._lines.get((section, key))

    def has(self, section: str, key: str) -> bool:
        return self._parser.has_option(section, key)

    def get(self, section: str, key: str, convert: Callable[[str], T], default: T) -> T:
        if not self.has(section, key):
            return default
        raw = self._parser.get(section, key)
        try:
            return convert(raw)
        except (ValueError, ParameterError, WeightError) as error:
            raise ConfigError(f"[{section}] {key}: {error}", self.line(section, key)) from None


def _key_lines(text: str) -> Dict[Tuple[str, str], int]:
    lines: Dict[Tuple[str, str], int] = {}
    section = None
    header = re.compile(r"^\s*\[(?P<name>[^\]]+)\]")
    entry = re.compile(r"^(?P<key>[^\s=:#;][^=:]*?)\s*[=:]")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if match := header.match(line):
            section = match["name"].strip()
        elif section is not None and (match := entry.match(line)):
            lines[(section, match["key"].strip().lower())] = lineno
    return lines


def _float(raw: str) -> float:
    return float(raw.strip())


def _float_list(raw: str) -> Tuple[float, ...]:
    items = [item for item in (part.strip() for part in raw.split(",")) if item]
    if not items:
        raise ValueError("list must not be empty")
    return tuple(float(item) for item in items)


def _int_list(raw: str) -> Tuple[int, ...]:
    items = [item for item in (part.strip() for part in raw.split(",")) if item]
    if not items:
        raise ValueError("list must not be empty")
    return tuple(int(item) for item in items)


def _str_list(raw: str) -> Tuple[str, ...]:
    items = tuple(item for item in (part.strip() for part in raw.split(",")) if item)
    if not items:
        raise ValueError("list must not be empty")
    return items


def _optional_int(raw: str) -> Optional[int]:
    return None if raw.strip().lower() in ("", "auto", "none") else int(raw)


def _params(raw: str) -> Dict[str, float]:
    params: Dict[str, float] = {}
    for item in _str_list(raw) if raw.strip() else ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got '{item}'")
        params[key.strip()] = float(value)
    return params


def _command(raw: str) -> str:
    command = raw.strip().lower()
    if command not in COMMANDS:
        raise ValueError(f"command must be one of {', '.join(COMMANDS)}, got '{raw}'")
    return command


def _check_format(value: str, lineno: Optional[int]) -> str:
    fmt = value.strip().lower()
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got '{value}'", lineno)
    return fmt


def _check_families(labels: Tuple[str, ...]) -> Tuple[str, ...]:
    for label in labels:
        if label != LADDER:
            FamilyKind.from_label(label)
    if LADDER not in labels:
        raise ParameterError(f"families must include '{LADDER}', got {', '.join(labels)}")
    return labels


def _check_spaces(tokens: Tuple[str, ...]) -> Tuple[str, ...]:
    for token in tokens:
        SpaceSpec.from_token(token)
    return tokens


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = ConfigParser()
    try:
        parser.read_string(text, source=source)
    except ConfigParserError as error:
        raise ConfigError(f"cannot parse {source}: {error}", getattr(error, "lineno", None)) from None
    lines = _key_lines(text)
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]", _section_line(text, section))
    cfg = _Located(parser, lines)
    defaults = RunConfig()
    out = cfg.get("run", "out", lambda raw: Path(raw.strip()) if raw.strip() else None, None)
    run_format = defaults.format
    if cfg.has("run", "format"):
        run_format = _check_format(parser.get("run", "format"), cfg.line("run", "format"))
    command = cfg.get("run", "command", _command, None)
    config = RunConfig(
        command=command,
        suite=cfg.get("run", "suite", lambda raw: Suite.from_label(raw).label, defaults.suite),
        d=cfg.get("grid", "d", int, defaults.d),
        L=cfg.get("grid", "l", _float, defaults.L),
        Ns=cfg.get("grid", "n", _int_list, defaults.Ns),
        K=cfg.get("grid", "k", _optional_int, defaults.K),
        seed=cfg.get("run", "seed", int, defaults.seed),
        workers=cfg.get("run", "workers", int, defaults.workers),
        out=out,
        format=run_format,
        s_values=cfg.get("sweep", "s", _float_list, defaults.s_values),
        p_values=cfg.get("sweep", "p", _float_list, defaults.p_values),
        gamma_values=cfg.get("sweep", "gamma", _float_list, defaults.gamma_values),
        families=cfg.get("sweep", "families", lambda raw: _check_families(_str_list(raw)), defaults.families),
        spaces=cfg.get("sweep", "spaces", lambda raw: _check_spaces(_str_list(raw)), defaults.spaces),
        ladder_depth=cfg.get("sweep", "ladder_depth", int, defaults.ladder_depth),
        norm_field=cfg.get("norm", "field", lambda raw: FamilyKind.from_label(raw).label, defaults.norm_field),
        norm_params=cfg.get("norm", "params", _params, {}),
        norm_spaces=cfg.get("norm", "spaces", lambda raw: _check_spaces(_str_list(raw)), defaults.norm_spaces),
    )
    _validate(config, cfg)
    _logger.debug(f"Loaded configuration from {source}: {config}")
    return config


def _section_line(text: str, section: str) -> Optional[int]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return lineno
    return None


def _check_levels(config: RunConfig) -> None:
    if config.K is None:
        return
    if config.K < 0:
        raise ParameterError(f"K must be nonnegative, got {config.K}")
    for N in config.Ns:
        top = max_level(GridSpec(config.d, config.L, N))
        if config.K > top:
            raise ParameterError(f"K={config.K} exceeds max admissible K={top} at N={N}")


def _validate(config: RunConfig, cfg: _Located) -> None:
    sample_s = (0.0,)
    checks: List[Tuple[str, str, Callable[[], object]]] = [
        ("grid", "d", lambda: GridSpec(config.d, DEFAULT_L, 8)),
        ("grid", "l", lambda: GridSpec(1, config.L, 8)),
        ("grid", "n", lambda: [GridSpec(config.d, config.L, N) for N in config.Ns]),
        ("grid", "k", lambda: _check_levels(config)),
        ("sweep", "p", lambda: SweepConfig(sample_s, p_values=config.p_values)),
        ("sweep", "gamma", lambda: SweepConfig(sample_s, gamma_values=config.gamma_values)),
        ("sweep", "spaces", lambda: SweepConfig(sample_s, spaces=config.spaces)),
        ("sweep", "ladder_depth", lambda: SweepConfig(sample_s, ladder_depth=config.ladder_depth)),
        ("run", "workers", lambda: SweepConfig(sample_s, workers=config.workers)),
        ("sweep", "s", config.sweep_config),
    ]
    for section, key, check in checks:
        try:
            check()
        except ParameterError as error:
            raise ConfigError(str(error), cfg.line(section, key)) from None


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read {path}: {error.strerror}") from None
    return parse_config(text, str(path))

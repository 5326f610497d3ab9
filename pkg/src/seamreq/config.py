"""Project configuration files.

A config file is flat ``key = value`` text; ``#`` and ``;`` start comments.
Recognized keys::

    sources      = clock/*.sreq requirements.sreq   # globs, relative to this file
    requirements = CLOCK_REQUIREMENTS               # classes verified by default
    seed         = 7
    jobs         = 4
    report       = out/report.json
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass

from .model import SeamreqError

KEYS = ("sources", "requirements", "seed", "jobs", "report")


class ConfigError(SeamreqError):
    code = "ConfigError"


@dataclass(frozen=True)
class ProjectConfig:
    sources: tuple[str, ...] = ()
    requirements: tuple[str, ...] = ()
    seed: int | None = None
    jobs: int | None = None
    report: str | None = None
    base_dir: str = "."

    def source_patterns(self) -> list[str]:
        return [p if os.path.isabs(p) else os.path.join(self.base_dir, p) for p in self.sources]

    def report_path(self) -> str | None:
        if self.report is None or os.path.isabs(self.report):
            return self.report
        return os.path.join(self.base_dir, self.report)


def _split(value: str) -> tuple[str, ...]:
    return tuple(v for v in re.split(r"[,\s]+", value.strip()) if v)


def _int(key: str, value: str, minimum: int | None = None) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    if minimum is not None and n < minimum:
        raise ConfigError(f"{key} must be at least {minimum}")
    return n


def parse_config(text: str, base_dir: str = ".", path: str = "<config>") -> ProjectConfig:
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";"),
        interpolation=None, default_section="\x00defaults",
    )
    parser.optionxform = str
    try:
        parser.read_string("[seamreq]\n" + text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    items = dict(parser.items("seamreq"))
    unknown = sorted(set(items) - set(KEYS))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s): {', '.join(unknown)}")
    sources = _split(items.get("sources", ""))
    if not sources:
        raise ConfigError(f"{path}: at least one source is required")
    return ProjectConfig(
        sources=sources,
        requirements=_split(items.get("requirements", "")),
        seed=_int("seed", items["seed"]) if "seed" in items else None,
        jobs=_int("jobs", items["jobs"], 1) if "jobs" in items else None,
        report=items.get("report") or None,
        base_dir=base_dir,
    )


def load_config(path: str) -> ProjectConfig:
    """Read a config file; OSError propagates."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)), path)

"""Schema-versioned reports shared by the command-line subcommands."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from . import logic as L
from .vcgen import VerificationOutcome

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Report:
    command: str
    payload: dict = field(default_factory=dict)
    diagnostics: tuple = ()
    exit_code: int = 0
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool": "seamreq",
            "tool_version": self.tool_version,
            "command": self.command,
            "exit_code": self.exit_code,
            "diagnostics": [dict(d) for d in self.diagnostics],
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
        return cls(
            command=data["command"],
            payload=data["payload"],
            diagnostics=tuple(data.get("diagnostics", ())),
            exit_code=data["exit_code"],
            tool_version=data["tool_version"],
            schema_version=data["schema_version"],
        )


def render_report(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def diagnostic_dict(d) -> dict:
    loc = d.loc
    return {"code": d.code, "message": d.message,
            "file": loc.file, "line": loc.line, "column": loc.column}


def model_dict(model: dict | None) -> dict | None:
    if model is None:
        return None
    return {L.render(s): v for s, v in sorted(model.items(), key=lambda kv: kv[0].sort_key())}


def outcome_dict(o: VerificationOutcome, timing: bool = False) -> dict:
    out = {
        "name": o.name,
        "owner": o.owner,
        "comment": o.comment,
        "verdict": o.verdict.value,
        "counterexample": model_dict(o.counterexample),
        "explanation": o.explanation,
        "reason": o.reason,
        "assumptions": list(o.assumptions),
        "notes": list(o.notes),
        "clause": o.clause,
    }
    if timing:
        out["elapsed_seconds"] = round(o.elapsed, 6)
    return out


def _excerpt(text: str, width: int = 60) -> str:
    text = " ".join(text.split())
    return text if len(text) <= width else text[: width - 3] + "..."


def outcome_table(outcomes, timing: bool = False) -> str:
    """Fixed-width table of outcomes with counterexamples below failed rows."""
    if not outcomes:
        return "  (no obligations)\n"
    width = max(len(o.name) for o in outcomes)
    lines = []
    for o in outcomes:
        extra = f"  {o.elapsed * 1000:.1f} ms" if timing else ""
        detail = o.clause or _excerpt(o.comment)
        lines.append(f"  {o.name:<{width}}  {o.verdict.value:<11}  {detail}{extra}")
        if o.explanation:
            lines.append("    counterexample:")
            lines.extend("    " + line for line in o.explanation.splitlines())
        if o.reason:
            lines.append(f"    {o.reason}")
        for n in o.notes:
            lines.append(f"    note: {n}")
    return "\n".join(lines) + "\n"

"""Customer-readable requirements documents from driver comments."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import model as M

PLACEHOLDER = "(no description)"


@dataclass(frozen=True)
class DocItem:
    label: str
    driver: str
    text: str
    verdict: str | None = None


@dataclass(frozen=True)
class RequirementsDocument:
    title: str
    header: str
    items: tuple[DocItem, ...]


def sentence(text: str) -> str:
    """Reflow to one line, capitalize, end with a period."""
    text = " ".join(text.split())
    if not text:
        return ""
    text = text[0].upper() + text[1:]
    if text[-1] not in ".!?":
        text += "."
    return text


def _header(project: M.Project, rc: M.RequirementClass) -> str:
    cur = rc
    seen = set()
    while cur is not None and cur.name not in seen:
        seen.add(cur.name)
        if cur.header_comment:
            return " ".join(cur.header_comment.split())
        cur = project.requirement_classes.get(cur.parent) if cur.parent else None
    return ""


def build(rc: M.RequirementClass | str, project: M.Project, verdicts: dict | None = None) -> RequirementsDocument:
    if isinstance(rc, str):
        rc = project.requirement_classes[rc]
    verdicts = verdicts or {}
    items = []
    for i, d in enumerate(project.flatten(rc.name), 1):
        text = sentence(d.comment)
        if not text:
            warnings.warn(f"driver {d.ref} has no comment", stacklevel=2)
            text = PLACEHOLDER
        v = verdicts.get(d.ref, verdicts.get(d.name))
        v = getattr(v, "value", v)
        items.append(DocItem(f"REQ{i}", d.name, text, v))
    return RequirementsDocument(rc.name, _header(project, rc), tuple(items))


def render(doc: RequirementsDocument, fmt: str = "text") -> str:
    if fmt == "text":
        lines = [doc.title, "=" * len(doc.title), ""]
        if doc.header:
            lines.append(doc.header)
        for it in doc.items:
            badge = f" [{it.verdict}]" if it.verdict else ""
            lines.append(f"  ({it.label}) {it.text}{badge}")
        return "\n".join(lines) + "\n"
    if fmt in ("markdown", "md"):
        lines = [f"# {doc.title}", ""]
        if doc.header:
            lines += [doc.header, ""]
        for it in doc.items:
            badge = f" **{it.verdict}**" if it.verdict else ""
            lines.append(f"1. **({it.label})** `{it.driver}`: {it.text}{badge}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown document format {fmt}")


def generate(rc, project: M.Project, fmt: str = "text", verdicts: dict | None = None) -> str:
    """Document text for a requirement class (flattened, inherited drivers first)."""
    return render(build(rc, project, verdicts), fmt)

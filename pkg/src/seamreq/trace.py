"""Traceability between specification drivers and class features."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import logic as L
from . import model as M


class UnknownFeature(M.SeamreqError):
    code = "UnknownFeature"


@dataclass(frozen=True)
class TraceMatrix:
    """``down``: driver ref -> features; ``up``: feature -> driver refs.

    ``down`` keeps driver declaration order (requirement classes in source
    order, each flattened).

    Features are written ``CLASS.feature`` and drivers ``OWNER.name``, where
    the owner is the requirement class declaring the driver.
    """

    down: dict = field(default_factory=dict)
    up: dict = field(default_factory=dict)

    def rows(self, direction: str = "down") -> list[tuple[str, str]]:
        """Pairs in driver declaration order, features sorted."""
        if direction == "down":
            return [(d, f) for d in self.down for f in sorted(self.down[d])]
        order = {d: i for i, d in enumerate(self.down)}
        return [(f, d) for f in sorted(self.up) for d in sorted(self.up[f], key=order.__getitem__)]


def _formulas(stmts):
    for s in stmts:
        if isinstance(s, M.Check):
            for c in s.clauses:
                yield c.formula
        elif isinstance(s, M.If):
            for cond, body in s.branches:
                yield cond
                yield from _formulas(body)
            yield from _formulas(s.else_body or ())
        elif isinstance(s, M.Call):
            for a in s.actuals:
                if not isinstance(a, str):
                    yield a


def driver_references(d: M.SpecificationDriver) -> frozenset[str]:
    """Features a driver reads or calls, through its contracts and body."""
    types = {p.name: p.type for p in d.object_args}
    refs = set()
    formulas = [c.formula for c in (*d.precondition, *d.postcondition)]
    formulas.extend(_formulas(d.body))
    for f in formulas:
        for s in L.symbols(f):
            if isinstance(s, L.StateVar) and s.obj in types:
                refs.add(f"{types[s.obj]}.{s.attr}")
            elif isinstance(s, L.QueryApp) and s.obj in types:
                refs.add(f"{types[s.obj]}.{s.query}")
    for call in M._calls(d.body):
        refs.add(f"{types[call.target]}.{call.feature}")
    return frozenset(refs)


def build_matrix(project: M.Project) -> TraceMatrix:
    down = {d.ref: driver_references(d) for d in project.drivers()}
    up: dict = {}
    for ref, feats in down.items():
        for f in feats:
            up.setdefault(f, set()).add(ref)
    return TraceMatrix(down, {k: frozenset(v) for k, v in sorted(up.items())})


def _check_feature(project: M.Project, feature: str):
    cls_name, _, name = feature.partition(".")
    cls = project.classes.get(cls_name)
    if cls is None or not name or cls.feature(name) is None:
        raise UnknownFeature(f"unknown feature {feature}")


def impact(project: M.Project, feature: str, verdicts: dict | None = None) -> dict:
    """Drivers constraining ``feature``, each with its latest verdict if known.

    ``verdicts`` maps driver refs (or bare driver names) to verdicts.
    """
    _check_feature(project, feature)
    matrix = build_matrix(project)
    verdicts = verdicts or {}
    out = {}
    hits = matrix.up.get(feature, frozenset())
    for ref in (r for r in matrix.down if r in hits):
        short = ref.split(".", 1)[1]
        out[ref] = verdicts.get(ref, verdicts.get(short))
    return out


def find_driver(project: M.Project, name: str) -> M.SpecificationDriver:
    """Look up a driver by ``OWNER.name`` or by a bare name if unambiguous."""
    drivers = project.drivers()
    exact = [d for d in drivers if d.ref == name]
    if exact:
        return exact[0]
    matches = [d for d in drivers if d.name == name]
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise KeyError(f"unknown driver {name}")
    raise KeyError(f"ambiguous driver {name}: " + ", ".join(d.ref for d in matches))

"""Resolved object model of a project.

Operational classes carry typed attributes, commands and queries with
contracts expressed in the ``logic`` IR.  Requirement classes are deferred
containers of specification drivers: self-contained routines whose contracts
and bodies only mention their formal arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logic import BOOLEAN, INTEGER, PRIMITIVES
from .syntax import NOWHERE, Location


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    loc: Location = NOWHERE

    def __str__(self) -> str:
        return f"{self.loc}: {self.code}: {self.message}"


class SeamreqError(Exception):
    pass


class ResolveError(SeamreqError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


def _loc():
    return field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class Attribute:
    name: str
    type: str
    loc: Location = _loc()


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    loc: Location = _loc()

    @property
    def is_object(self) -> bool:
        return self.type not in PRIMITIVES


@dataclass(frozen=True)
class Clause:
    formula: object
    label: str | None = None
    # source text of the clause, for reports
    text: str = ""
    loc: Location = _loc()


# -- statements ----------------------------------------------------------------


@dataclass(frozen=True)
class Call:
    target: str
    feature: str
    # object actuals are argument names, primitive actuals are terms
    actuals: tuple = ()
    loc: Location = _loc()


@dataclass(frozen=True)
class If:
    branches: tuple[tuple[object, tuple], ...]
    else_body: tuple | None = None
    loc: Location = _loc()


@dataclass(frozen=True)
class Check:
    clauses: tuple[Clause, ...]
    loc: Location = _loc()


@dataclass(frozen=True)
class Assign:
    target: str
    value: object
    loc: Location = _loc()


# -- operational classes -------------------------------------------------------


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple[Param, ...] = ()
    precondition: tuple[Clause, ...] = ()
    postcondition: tuple[Clause, ...] = ()
    # None when the implementation is hidden
    body: tuple | None = None
    comment: str = ""
    loc: Location = _loc()


@dataclass(frozen=True)
class Query:
    name: str
    result_type: str = BOOLEAN
    args: tuple[Param, ...] = ()
    precondition: tuple[Clause, ...] = ()
    postcondition: tuple[Clause, ...] = ()
    body: tuple | None = None
    comment: str = ""
    loc: Location = _loc()


@dataclass(frozen=True)
class ContractedClass:
    name: str
    frozen: bool = False
    attributes: tuple[Attribute, ...] = ()
    commands: tuple[Command, ...] = ()
    queries: tuple[Query, ...] = ()
    loc: Location = _loc()

    def attribute(self, name: str) -> Attribute | None:
        return next((a for a in self.attributes if a.name == name), None)

    def command(self, name: str) -> Command | None:
        return next((c for c in self.commands if c.name == name), None)

    def query(self, name: str) -> Query | None:
        return next((q for q in self.queries if q.name == name), None)

    def feature(self, name: str):
        return self.attribute(name) or self.command(name) or self.query(name)

    def feature_names(self) -> list[str]:
        return ([a.name for a in self.attributes] + [c.name for c in self.commands]
                + [q.name for q in self.queries])


# -- requirements --------------------------------------------------------------


@dataclass(frozen=True)
class SpecificationDriver:
    name: str
    owner: str
    comment: str = ""
    header: str = ""
    args: tuple[Param, ...] = ()
    modify_set: frozenset = frozenset()
    precondition: tuple[Clause, ...] = ()
    body: tuple = ()
    postcondition: tuple[Clause, ...] = ()
    loc: Location = _loc()

    @property
    def ref(self) -> str:
        return f"{self.owner}.{self.name}"

    @property
    def object_args(self) -> tuple[Param, ...]:
        return tuple(p for p in self.args if p.is_object)

    @property
    def auxiliary_args(self) -> tuple[Param, ...]:
        return tuple(p for p in self.args if not p.is_object)

    def arg(self, name: str) -> Param | None:
        return next((p for p in self.args if p.name == name), None)

    @property
    def text(self) -> str:
        """Group header and own comment read as one sentence."""
        head = self.header.rstrip().rstrip(":").strip()
        if head and self.comment:
            return f"{head} {self.comment}"
        return self.comment or self.header


@dataclass(frozen=True)
class RequirementClass:
    name: str
    parent: str | None = None
    header_comment: str = ""
    description: str = ""
    drivers: tuple[SpecificationDriver, ...] = ()
    # raw note entries, not interpreted
    notes: tuple[tuple[str, str], ...] = ()
    loc: Location = _loc()


@dataclass(frozen=True, eq=False)
class Project:
    """Resolved project; treat as read-only once built."""

    classes: dict = field(default_factory=dict)
    requirement_classes: dict = field(default_factory=dict)
    source_index: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Project):
            return NotImplemented
        return (self.classes == other.classes
                and self.requirement_classes == other.requirement_classes)

    def flatten(self, name: str) -> list[SpecificationDriver]:
        return flatten_requirements(self, self.requirement_classes[name])

    def arg_class(self, driver: SpecificationDriver, arg: str) -> ContractedClass:
        return self.classes[driver.arg(arg).type]

    def drivers(self) -> list[SpecificationDriver]:
        """All distinct drivers of all requirement classes, flattened."""
        seen: dict = {}
        for name in self.requirement_classes:
            for d in self.flatten(name):
                seen.setdefault(d.ref, d)
        return list(seen.values())


def flatten_requirements(project: Project, rc: RequirementClass) -> list[SpecificationDriver]:
    """Inherited drivers first, then own ones, in declaration order."""
    chain = []
    seen = set()
    cur = rc
    while cur is not None:
        if cur.name in seen:
            raise ResolveError([Diagnostic(
                "InheritanceCycle",
                " -> ".join([c.name for c in chain] + [cur.name]),
                rc.loc)])
        seen.add(cur.name)
        chain.append(cur)
        if cur.parent is None:
            break
        if cur.parent not in project.requirement_classes:
            raise ResolveError([Diagnostic(
                "UnknownName", f"unknown requirement class {cur.parent}", cur.loc)])
        cur = project.requirement_classes[cur.parent]
    out: list[SpecificationDriver] = []
    names: dict[str, str] = {}
    for cls in reversed(chain):
        for d in cls.drivers:
            if d.name in names:
                raise ResolveError([Diagnostic(
                    "DuplicateDriverName",
                    f"{d.name} in {cls.name} collides with {names[d.name]}.{d.name}",
                    d.loc)])
            names[d.name] = cls.name
            out.append(d)
    return out


@dataclass(frozen=True)
class DriverPattern:
    """Whether a driver fits the single-call, single-object inference pattern."""

    matches: bool
    object_arg: str | None = None
    command: str | None = None
    auxiliary: tuple[str, ...] = ()
    reasons: tuple[str, ...] = ()


def _calls(stmts) -> list[Call]:
    out = []
    for s in stmts:
        if isinstance(s, Call):
            out.append(s)
        elif isinstance(s, If):
            for _, body in s.branches:
                out.extend(_calls(body))
            if s.else_body:
                out.extend(_calls(s.else_body))
    return out


def classify_driver(d: SpecificationDriver, project: Project | None = None) -> DriverPattern:
    reasons = []
    calls = _calls(d.body)
    objs = d.object_args
    if len(calls) == 0:
        reasons.append("no feature call")
    elif len(calls) > 1:
        reasons.append("multiple feature calls")
    if len(objs) != 1:
        reasons.append(f"{len(objs)} object arguments (exactly one required)")
    if any(not isinstance(s, Call) for s in d.body):
        reasons.append("body contains statements other than a call")
    command = calls[0].feature if len(calls) == 1 else None
    if len(calls) == 1:
        if calls[0].actuals:
            reasons.append("called command takes arguments")
        elif project is not None and objs:
            cls = project.classes.get(objs[0].type)
            cmd = cls.command(command) if cls else None
            if cmd is not None and cmd.args:
                reasons.append("called command takes arguments")
    return DriverPattern(
        matches=not reasons,
        object_arg=objs[0].name if len(objs) == 1 else None,
        command=command,
        auxiliary=tuple(p.name for p in d.auxiliary_args),
        reasons=tuple(reasons),
    )


__all__ = [
    "Assign", "Attribute", "BOOLEAN", "Call", "Check", "Clause", "Command",
    "ContractedClass", "Diagnostic", "DriverPattern", "If", "INTEGER", "Param",
    "Project", "Query", "RequirementClass", "ResolveError", "SeamreqError",
    "SpecificationDriver", "classify_driver", "flatten_requirements",
]

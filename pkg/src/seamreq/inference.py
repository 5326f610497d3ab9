"""Postcondition inference from single-call specification drivers.

For a driver ``d (o: C; a1: T1 ...)`` whose body is the single call
``o.cmd``:

* a precondition atom over ``o.q`` becomes ``old q`` in the antecedent;
* a postcondition atom over ``o.q`` becomes ``q`` in the consequent;
* an auxiliary argument ``a`` bound by a precondition atom ``o.p = a`` is
  replaced by ``old p`` and the binding atom is dropped.

The result is ``antecedent implies consequent``, or the bare consequent
when nothing remains in the antecedent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import logic as L
from . import model as M
from .logic import CUR, CURRENT, OLD


class InferenceError(M.SeamreqError):
    code = "InferenceError"

    def __init__(self, driver: str, message: str):
        super().__init__(f"{driver}: {message}")
        self.driver = driver
        self.message = message


class PatternMismatch(InferenceError):
    code = "PatternMismatch"

    def __init__(self, driver: str, reasons):
        self.reasons = tuple(reasons)
        super().__init__(driver, "; ".join(self.reasons))


class UnboundAuxiliary(InferenceError):
    code = "UnboundAuxiliary"


@dataclass(frozen=True)
class InferredAssertion:
    driver: str
    assertion: object
    text: str

    def clause(self) -> M.Clause:
        return M.Clause(self.assertion, None, self.text)


@dataclass
class InferenceResult:
    assertions: list[InferredAssertion] = field(default_factory=list)
    errors: list[InferenceError] = field(default_factory=list)
    # (driver ref, note) for drivers that do not call the target command
    skipped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def _bindings(d: M.SpecificationDriver, obj: str) -> tuple[dict, set]:
    """First ``o.p = a`` atom per auxiliary; returns (aux -> old p, binding atoms)."""
    aux_names = {p.name for p in d.auxiliary_args}
    out: dict = {}
    used: set = set()
    for clause in d.precondition:
        for atom in L.conjuncts(clause.formula):
            if not (isinstance(atom, L.Cmp) and atom.op == "="):
                continue
            for sv, av in ((atom.left, atom.right), (atom.right, atom.left)):
                if (isinstance(sv, L.StateVar) and sv.obj == obj and isinstance(av, L.AuxVar)
                        and av.name in aux_names and av.name not in out):
                    out[av.name] = L.StateVar(CURRENT, sv.attr, OLD, sv.type)
                    used.add(id(atom))
                    break
    return out, used


def _to_class(f, obj: str, epoch_for_cur):
    def epoch(o, e):
        return epoch_for_cur if e == CUR else e

    def fn(sym):
        if isinstance(sym, L.StateVar) and sym.obj == obj:
            return L.StateVar(CURRENT, sym.attr, epoch(obj, sym.epoch), sym.type)
        if isinstance(sym, L.QueryApp) and sym.obj == obj:
            if sym.args:
                raise InferenceError("", f"query {sym.query} with arguments cannot be lifted")
            return L.QueryApp(CURRENT, sym.query, (), epoch(obj, sym.epoch), sym.type)
        return sym

    return L.map_symbols(f, fn)


def _check_shape(d: M.SpecificationDriver, f, bound: dict):
    """Every auxiliary occurs in a side of shape ``a``, ``a + c`` or ``a - c``."""
    for sub in L.walk(f):
        if not isinstance(sub, L.Cmp):
            continue
        for side in (sub.left, sub.right):
            if L.type_of(side) != L.INTEGER:
                continue
            aux = [s for s in L.symbols(side) if isinstance(s, L.AuxVar)]
            if not aux:
                continue
            coeffs, _ = L.linearize(side)
            if len(coeffs) != 1 or list(coeffs.values()) != [1]:
                raise UnboundAuxiliary(
                    d.name, f"unsupported auxiliary term {L.render(side)} "
                    "(expected a, a + c, a - c or c)")


def infer_assertion(d: M.SpecificationDriver, project: M.Project | None = None) -> InferredAssertion:
    pattern = M.classify_driver(d, project)
    if not pattern.matches:
        raise PatternMismatch(d.name, pattern.reasons)
    obj = pattern.object_arg
    binding, used = _bindings(d, obj)

    antecedent = []
    for clause in d.precondition:
        for atom in L.conjuncts(clause.formula):
            if id(atom) in used:
                continue
            antecedent.append(atom)
    consequent = [a for c in d.postcondition for a in L.conjuncts(c.formula)]

    try:
        ante = [_to_class(a, obj, OLD) for a in antecedent]
        cons = [_to_class(a, obj, CUR) for a in consequent]
    except InferenceError as exc:
        raise InferenceError(d.name, exc.message) from None

    for part in cons:
        _check_shape(d, part, binding)
    for part in ante + cons:
        for s in L.symbols(part):
            if isinstance(s, L.AuxVar) and s.name not in binding:
                raise UnboundAuxiliary(
                    d.name, f"auxiliary argument {s.name} is not bound by an equality "
                    f"{obj}.<attribute> = {s.name} in the precondition")
    subst = {L.AuxVar(n, v.type): v for n, v in binding.items()}
    ante = [L.substitute_all(a, subst) for a in ante]
    cons = [L.substitute_all(a, subst) for a in cons]
    assertion = L.implies(L.conj(ante), L.conj(cons))
    return InferredAssertion(d.name, assertion, L.render(assertion))


def infer_contract(drivers, command: str, project: M.Project | None = None) -> InferenceResult:
    """Infer one assertion per driver calling ``command``, in the given order.

    ``drivers`` is a sequence of drivers or a requirement class name (then
    ``project`` is required and the class is flattened).
    """
    if isinstance(drivers, str):
        drivers = project.flatten(drivers)
    elif isinstance(drivers, M.RequirementClass):
        drivers = project.flatten(drivers.name)
    result = InferenceResult()
    for d in drivers:
        called = {c.feature for c in M._calls(d.body)}
        if command not in called:
            note = "calls no command" if not called else f"calls {', '.join(sorted(called))}"
            result.skipped.append((d.ref, note))
            continue
        try:
            result.assertions.append(infer_assertion(d, project))
        except InferenceError as exc:
            result.errors.append(exc)
    return result


def with_postcondition(project: M.Project, class_name: str, command: str, clauses) -> M.Project:
    """Copy of ``project`` where ``class_name.command`` has the given postcondition."""
    cls = project.classes[class_name]
    cmd = cls.command(command)
    if cmd is None:
        raise KeyError(f"{class_name} has no command {command}")
    clauses = tuple(c.clause() if isinstance(c, InferredAssertion) else c for c in clauses)
    commands = tuple(replace(c, postcondition=clauses) if c.name == command else c
                     for c in cls.commands)
    classes = dict(project.classes)
    classes[class_name] = replace(cls, commands=commands)
    return M.Project(classes, project.requirement_classes, project.source_index)

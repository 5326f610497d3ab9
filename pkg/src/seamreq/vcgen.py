"""Proof obligations for specification drivers and command implementations.

Drivers are checked modularly.  The body is executed symbolically from
snapshot 0.  Each call ``c.cmd`` asserts the callee precondition, moves ``c``
to a fresh snapshot and assumes the callee postcondition between the two
snapshots.  Other objects keep their symbols.  Command bodies are checked
against their own contracts by weakest precondition.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from . import logic as L
from . import model as M
from .logic import CUR, CURRENT, OLD, RESULT, conj, implies
from .solver import Status, check_sat, check_valid, explain

# query axioms can mention further queries; unfold at most this deep
_AXIOM_DEPTH = 8

NON_ALIASING = "distinct object arguments denote distinct objects"


class Verdict(str, Enum):
    PROVED = "PROVED"
    FAILED = "FAILED"
    UNSUPPORTED = "UNSUPPORTED"
    SKIPPED = "SKIPPED"


class VcError(M.SeamreqError):
    code = "VcError"


class MissingContract(VcError):
    code = "MissingContract"


class UnsupportedConstruct(VcError):
    code = "UnsupportedConstruct"


@dataclass(frozen=True)
class Obligation:
    owner: str
    name: str
    hypothesis: object
    goal: object
    snapshots: tuple = (0,)
    # (object, epoch holding its post-state) pairs
    final_epochs: tuple = ()
    assumptions: tuple[str, ...] = ()
    clause: str = ""

    @property
    def formula(self):
        return implies(self.hypothesis, self.goal)


@dataclass(frozen=True)
class VerificationOutcome:
    name: str
    owner: str
    comment: str
    verdict: Verdict
    counterexample: dict | None = None
    explanation: str = ""
    reason: str = ""
    assumptions: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    clause: str = ""
    elapsed: float = field(default=0.0, compare=False)

    @property
    def proved(self) -> bool:
        return self.verdict == Verdict.PROVED


# --------------------------------------------------------------------------
# Contract instantiation


def instantiate(f, objects: dict, aux: dict | None = None, result=None):
    """Rename the objects of a class-level formula.

    ``objects`` maps a formula-side object name (``Current`` or a formal) to
    ``(name, old_epoch, cur_epoch)``.  ``aux`` maps primitive formal names to
    terms and ``result`` replaces ``Result``.
    """
    aux = aux or {}

    def epoch_of(obj, epoch):
        if obj not in objects:
            return obj, epoch
        name, old_e, cur_e = objects[obj]
        if epoch == OLD:
            return name, old_e
        if epoch == CUR:
            return name, cur_e
        return name, epoch

    def fn(sym):
        if isinstance(sym, L.StateVar):
            obj, e = epoch_of(sym.obj, sym.epoch)
            return L.StateVar(obj, sym.attr, e, sym.type)
        if isinstance(sym, L.QueryApp):
            obj, e = epoch_of(sym.obj, sym.epoch)
            args = []
            for n, ae in sym.args:
                if ae is None:
                    rep = aux.get(n)
                    if rep is None:
                        args.append((n, None))
                    elif isinstance(rep, L.AuxVar):
                        args.append((rep.name, None))
                    else:
                        raise UnsupportedConstruct(
                            f"query argument {n} bound to the non-name {L.render(rep)}")
                else:
                    args.append(epoch_of(n, ae))
            return L.QueryApp(obj, sym.query, tuple(args), e, sym.type)
        if isinstance(sym, L.AuxVar):
            if sym.name == RESULT and result is not None:
                return result
            return aux.get(sym.name, sym)
        return sym

    return L.map_symbols(f, fn)


def _clauses(cs) -> object:
    return conj(c.formula for c in cs)


def query_axioms(f, project: M.Project, types: dict) -> object:
    """Instantiated query postconditions for every query application in ``f``.

    ``types`` maps object names to class names.  Each distinct application
    yields one axiom ``pre implies post`` with ``Result`` bound to it;
    applications introduced by axioms are unfolded in turn.
    """
    done: set = set()
    axioms = []
    todo = sorted((s for s in L.symbols(f) if isinstance(s, L.QueryApp)), key=lambda s: s.sort_key())
    for _ in range(_AXIOM_DEPTH):
        fresh = []
        for qa in todo:
            if qa in done:
                continue
            done.add(qa)
            cls = project.classes.get(types.get(qa.obj, ""))
            query = cls.query(qa.query) if cls else None
            if query is None:
                raise MissingContract(f"no contract for query {qa.obj}.{qa.query}")
            objects = {CURRENT: (qa.obj, qa.epoch, qa.epoch)}
            aux = {}
            for p, (n, e) in zip(query.args, qa.args):
                if p.is_object:
                    objects[p.name] = (n, e, e)
                else:
                    aux[p.name] = L.AuxVar(n, p.type)
            pre = instantiate(_clauses(query.precondition), objects, aux)
            post = instantiate(_clauses(query.postcondition), objects, aux, result=qa)
            if post == L.TRUE:
                continue
            ax = implies(pre, post)
            axioms.append(ax)
            fresh.extend(s for s in L.symbols(ax) if isinstance(s, L.QueryApp) and s not in done)
        todo = sorted(set(fresh), key=lambda s: s.sort_key())
        if not todo:
            break
    return conj(axioms)


# --------------------------------------------------------------------------
# Drivers


def _at(f, epochs: dict):
    """Place a current-state formula over driver arguments at their epochs."""
    return L.rename_epochs(f, lambda obj, e: epochs.get(obj, e) if e == CUR else e)


def driver_obligation(d: M.SpecificationDriver, project: M.Project) -> Obligation:
    types = {p.name: p.type for p in d.object_args}
    snapshots = {0}
    finals: list[dict] = []

    def call(stmt: M.Call, epochs: dict, rest) -> object:
        cls = project.classes[types[stmt.target]]
        cmd = cls.command(stmt.feature)
        if cmd is None:
            raise MissingContract(f"{cls.name} has no command {stmt.feature}")
        k = epochs[stmt.target]
        after = max(snapshots) + 1
        snapshots.add(after)
        objects = {CURRENT: (stmt.target, k, after)}
        aux = {}
        for p, a in zip(cmd.args, stmt.actuals):
            if p.is_object:
                if a == stmt.target:
                    objects[p.name] = (a, k, after)
                else:
                    objects[p.name] = (a, epochs[a], epochs[a])
            else:
                aux[p.name] = _at(a, epochs)
        entry = {n: (name, old_e, old_e) for n, (name, old_e, _) in objects.items()}
        pre = instantiate(_clauses(cmd.precondition), entry, aux)
        post = instantiate(_clauses(cmd.postcondition), objects, aux)
        nxt = dict(epochs)
        nxt[stmt.target] = after
        return conj([pre, implies(post, rest(nxt))])

    def run(stmts: tuple, epochs: dict, cont) -> object:
        if not stmts:
            return cont(epochs)
        head, tail = stmts[0], stmts[1:]
        if isinstance(head, M.Call):
            return call(head, epochs, lambda e: run(tail, e, cont))
        if isinstance(head, M.Check):
            return conj([_at(_clauses(head.clauses), epochs), run(tail, epochs, cont)])
        if isinstance(head, M.If):
            parts = []
            taken = []
            for cond, body in head.branches:
                c = _at(cond, epochs)
                guard = conj([L.Not(t) for t in taken] + [c])
                parts.append(implies(guard, run(body + tail, epochs, cont)))
                taken.append(c)
            guard = conj(L.Not(t) for t in taken)
            parts.append(implies(guard, run((head.else_body or ()) + tail, epochs, cont)))
            return conj(parts)
        raise UnsupportedConstruct(f"{type(head).__name__} in a specification driver")

    def finish(epochs: dict) -> object:
        finals.append(dict(epochs))
        post = L.rename_epochs(
            _clauses(d.postcondition),
            lambda obj, e: 0 if e == OLD else epochs.get(obj, e) if e == CUR else e)
        frame = []
        for p in d.object_args:
            if p.name in d.modify_set or epochs[p.name] == 0:
                continue
            for a in project.classes[p.type].attributes:
                frame.append(L.Cmp("=", L.StateVar(p.name, a.name, epochs[p.name], a.type),
                                   L.StateVar(p.name, a.name, 0, a.type)))
        return conj([post] + frame)

    start = {p.name: 0 for p in d.object_args}
    body_vc = run(d.body, start, finish)
    pre = _at(_clauses(d.precondition), start)

    # peel leading implications into the hypothesis for readability
    hyp = [pre]
    goal = body_vc
    while isinstance(goal, L.Implies):
        hyp.append(goal.left)
        goal = goal.right
    axioms = query_axioms(conj([*hyp, goal]), project, types)
    assumptions = []
    if len(d.object_args) > 1:
        assumptions.append(NON_ALIASING)
    if axioms != L.TRUE:
        assumptions.append("query postconditions instantiated as axioms")
    for p in d.object_args:
        if p.name not in d.modify_set:
            assumptions.append(f"{p.name} not in modify set: asserted unchanged")
    final = {}
    for fe in finals:
        for obj, e in fe.items():
            final[obj] = max(final.get(obj, 0), e)
    return Obligation(
        owner=d.ref,
        name=d.name,
        hypothesis=conj(hyp + [axioms]),
        goal=goal,
        snapshots=tuple(sorted(snapshots)),
        final_epochs=tuple(sorted(final.items())),
        assumptions=tuple(assumptions),
    )


def discharge(ob: Obligation, *, seed: int | None = None) -> tuple[Verdict, dict | None, str, str]:
    """Run the solver; returns (verdict, counterexample, explanation, reason)."""
    v = check_valid(ob.formula, seed=seed)
    if v.status == Status.VALID:
        return Verdict.PROVED, None, "", ""
    if v.status == Status.INVALID:
        if L.evaluate(ob.formula, v.model):
            raise AssertionError("counterexample does not falsify the obligation")
        return Verdict.FAILED, v.model, explain(v, dict(ob.final_epochs)), ""
    return Verdict.UNSUPPORTED, None, "", v.reason


def verify_driver(d: M.SpecificationDriver, project: M.Project, *, seed: int | None = None) -> VerificationOutcome:
    t0 = time.perf_counter()
    try:
        ob = driver_obligation(d, project)
    except (VcError, L.LogicError) as exc:
        return VerificationOutcome(d.name, d.ref, d.text, Verdict.UNSUPPORTED,
                                   reason=f"{getattr(exc, 'code', 'LogicError')}: {exc}",
                                   elapsed=time.perf_counter() - t0)
    verdict, model, text, reason = discharge(ob, seed=seed)
    notes = []
    if d.precondition and check_sat(ob.hypothesis, seed=seed).status == Status.UNSAT:
        notes.append("precondition is unsatisfiable; the verdict is vacuous")
    return VerificationOutcome(d.name, d.ref, d.text, verdict, model, text, reason,
                               ob.assumptions, tuple(notes), elapsed=time.perf_counter() - t0)


def _verify_one(args):
    project, rc_name, index, seed = args
    d = project.flatten(rc_name)[index]
    return verify_driver(d, project, seed=seed)


def default_jobs() -> int:
    return os.cpu_count() or 1


def verify_requirement_class(rc: M.RequirementClass | str, project: M.Project, *,
                             jobs: int = 1, seed: int | None = None) -> list[VerificationOutcome]:
    """One outcome per flattened driver, in declaration order."""
    name = rc if isinstance(rc, str) else rc.name
    drivers = project.flatten(name)
    if jobs <= 1 or len(drivers) <= 1:
        return [verify_driver(d, project, seed=seed) for d in drivers]
    tasks = [(project, name, i, seed) for i in range(len(drivers))]
    with ProcessPoolExecutor(max_workers=min(jobs, len(drivers))) as pool:
        return list(pool.map(_verify_one, tasks))


# --------------------------------------------------------------------------
# Implementations


def _current_query_apps(f) -> list:
    return [s for s in L.symbols(f)
            if isinstance(s, L.QueryApp) and s.obj == CURRENT and s.epoch == CUR]


def wp(body, post, *, result_type: str | None = None):
    """Weakest precondition of a loop-free command body.

    Only current-epoch symbols of ``Current`` (and ``Result``) are rewritten
    by assignments; ``old`` symbols denote the entry state.
    """
    q = post
    for stmt in reversed(tuple(body)):
        q = _wp_stmt(stmt, q, result_type)
    return q


def _wp_stmt(stmt, q, result_type):
    if isinstance(stmt, M.Assign):
        if _current_query_apps(q):
            raise UnsupportedConstruct("assignment under a query of the current object")
        if stmt.target == RESULT:
            var = L.AuxVar(RESULT, result_type or L.type_of(stmt.value))
        else:
            var = L.StateVar(CURRENT, stmt.target, CUR, L.type_of(stmt.value))
        return L.substitute(q, var, stmt.value)
    if isinstance(stmt, M.Check):
        return conj([_clauses(stmt.clauses), q])
    if isinstance(stmt, M.If):
        parts = []
        taken = []
        for cond, body in stmt.branches:
            guard = conj([L.Not(t) for t in taken] + [cond])
            parts.append(implies(guard, wp(body, q, result_type=result_type)))
            taken.append(cond)
        guard = conj(L.Not(t) for t in taken)
        parts.append(implies(guard, wp(stmt.else_body or (), q, result_type=result_type)))
        return conj(parts)
    if isinstance(stmt, M.Call):
        raise UnsupportedConstruct(f"call of {stmt.feature} inside a command body")
    raise UnsupportedConstruct(f"{type(stmt).__name__} in a command body")


def _entry_bindings(cls: M.ContractedClass, routine, project: M.Project):
    """``attr = old attr`` for Current and every object argument."""
    out = []
    owners = [(CURRENT, cls)] + [(p.name, project.classes[p.type]) for p in routine.args if p.is_object]
    for obj, c in owners:
        for a in c.attributes:
            out.append(L.Cmp("=", L.StateVar(obj, a.name, CUR, a.type),
                             L.StateVar(obj, a.name, OLD, a.type)))
    return out


def _routine_types(cls, routine) -> dict:
    types = {CURRENT: cls.name}
    types.update({p.name: p.type for p in routine.args if p.is_object})
    return types


def implementation_obligations(cls: M.ContractedClass, routine, project: M.Project) -> list[Obligation]:
    """One obligation per top-level ensure clause of a routine with a body."""
    is_query = isinstance(routine, M.Query)
    result_type = routine.result_type if is_query else None
    pre = _clauses(routine.precondition)
    bindings = _entry_bindings(cls, routine, project)
    types = _routine_types(cls, routine)
    out = []
    for i, clause in enumerate(routine.postcondition):
        goal = wp(routine.body, clause.formula, result_type=result_type)
        if is_query:
            initial = L.FALSE if result_type == L.BOOLEAN else L.IntLit(0)
            goal = L.substitute(goal, L.AuxVar(RESULT, result_type), initial)
        hyp = conj([pre, *bindings])
        axioms = query_axioms(conj([hyp, goal]), project, types)
        label = clause.label or f"clause {i + 1}"
        out.append(Obligation(
            owner=f"{cls.name}.{routine.name}",
            name=f"{routine.name}: {label}",
            hypothesis=conj([hyp, axioms]),
            goal=goal,
            assumptions=("entry state bound to old",),
            clause=clause.text,
        ))
    return out


def run_body(cls: M.ContractedClass, routine, state: dict) -> dict:
    """Execute a loop-free body concretely; ``state`` maps attribute names to values."""
    env = {L.StateVar(CURRENT, a.name, CUR, a.type): state[a.name] for a in cls.attributes}
    if isinstance(routine, M.Query):
        env[L.AuxVar(RESULT, routine.result_type)] = False if routine.result_type == L.BOOLEAN else 0

    def exec_(stmts, extra):
        for s in stmts:
            if isinstance(s, M.Assign):
                value = L.evaluate(s.value, {**extra, **env})
                key = (L.AuxVar(RESULT, L.type_of(s.value)) if s.target == RESULT
                       else L.StateVar(CURRENT, s.target, CUR, L.type_of(s.value)))
                env[key] = value
            elif isinstance(s, M.If):
                for cond, body in s.branches:
                    if L.evaluate(cond, {**extra, **env}):
                        exec_(body, extra)
                        break
                else:
                    exec_(s.else_body or (), extra)
            elif isinstance(s, M.Check):
                pass
            else:
                raise UnsupportedConstruct(f"cannot execute {type(s).__name__}")

    extra = {k: v for k, v in state.items() if not isinstance(k, str)}
    exec_(routine.body, extra)
    out = {a.name: env[L.StateVar(CURRENT, a.name, CUR, a.type)] for a in cls.attributes}
    if isinstance(routine, M.Query):
        out[RESULT] = env[L.AuxVar(RESULT, routine.result_type)]
    return out


def _explain_impl(cls, routine, model: dict) -> str:
    pre = {a.name: model.get(L.StateVar(CURRENT, a.name, CUR, a.type),
                             False if a.type == L.BOOLEAN else 0)
           for a in cls.attributes}
    extra = {s: v for s, v in model.items() if not (isinstance(s, L.StateVar) and s.obj == CURRENT)}
    lines = ["  pre:"]
    lines += [f"    {k} = {_fmt(v)}" for k, v in pre.items()]
    try:
        post = run_body(cls, routine, {**pre, **extra})
    except (L.LogicError, UnsupportedConstruct) as exc:
        lines.append(f"  post: not computable ({exc})")
    else:
        lines.append("  post (by executing the body):")
        lines += [f"    {k} = {_fmt(v)}" for k, v in post.items()]
    aux = sorted((s for s in extra if getattr(s, "epoch", None) != OLD), key=lambda s: s.sort_key())
    if aux:
        lines.append("  auxiliary:")
        lines += [f"    {L.render_symbol(s)} = {_fmt(model[s])}" for s in aux]
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def verify_routine(cls: M.ContractedClass, routine, project: M.Project, *,
                   seed: int | None = None) -> list[VerificationOutcome]:
    owner = f"{cls.name}.{routine.name}"
    if routine.body is None:
        return [VerificationOutcome(routine.name, owner, routine.comment, Verdict.SKIPPED,
                                    reason="hidden implementation, assumed correct")]
    if not routine.postcondition:
        return [VerificationOutcome(routine.name, owner, routine.comment, Verdict.PROVED,
                                    notes=("empty postcondition",))]
    t0 = time.perf_counter()
    try:
        obligations = implementation_obligations(cls, routine, project)
    except (VcError, L.LogicError) as exc:
        return [VerificationOutcome(routine.name, owner, routine.comment, Verdict.UNSUPPORTED,
                                    reason=f"{getattr(exc, 'code', 'LogicError')}: {exc}",
                                    elapsed=time.perf_counter() - t0)]
    out = []
    for ob in obligations:
        t0 = time.perf_counter()
        v = check_valid(ob.formula, seed=seed)
        if v.status == Status.VALID:
            verdict, model, text, reason = Verdict.PROVED, None, "", ""
        elif v.status == Status.INVALID:
            if L.evaluate(ob.formula, v.model):
                raise AssertionError("counterexample does not falsify the obligation")
            verdict, model, reason = Verdict.FAILED, v.model, ""
            text = _explain_impl(cls, routine, v.model)
        else:
            verdict, model, text, reason = Verdict.UNSUPPORTED, None, "", v.reason
        out.append(VerificationOutcome(ob.name, owner, routine.comment, verdict, model, text, reason,
                                       ob.assumptions, clause=ob.clause,
                                       elapsed=time.perf_counter() - t0))
    return out


def verify_class(cls: M.ContractedClass | str, project: M.Project, *,
                 seed: int | None = None) -> list[VerificationOutcome]:
    """Check every command and query body against its own contract."""
    if isinstance(cls, str):
        cls = project.classes[cls]
    out = []
    for routine in (*cls.commands, *cls.queries):
        out.extend(verify_routine(cls, routine, project, seed=seed))
    return out

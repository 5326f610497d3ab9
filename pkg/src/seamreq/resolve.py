"""Name resolution and type checking: surface classes to the object model."""

from __future__ import annotations

import glob as _glob
import os
from dataclasses import dataclass, field

from . import logic as L
from . import model as M
from . import syntax as S
from .lexer import LexError
from .model import Diagnostic, ResolveError
from .parser import ParseError, parse_unit


class _Fail(Exception):
    def __init__(self, code: str, message: str, loc):
        super().__init__(message)
        self.diag = Diagnostic(code, message, loc)


@dataclass(frozen=True)
class _ObjRef:
    """An object-typed name; legal only as a feature target or query actual."""

    name: str
    cls: str
    epoch: object = L.CUR


@dataclass
class _Sig:
    name: str
    decl: S.ClassDecl
    attrs: dict = field(default_factory=dict)
    queries: dict = field(default_factory=dict)
    commands: dict = field(default_factory=dict)


@dataclass
class _Scope:
    kind: str  # "driver", "command" or "query"
    owner: str
    args: dict
    allow_old: bool = False
    result_type: str | None = None
    # names of features of the enclosing requirement class
    siblings: frozenset = frozenset()


class _Resolver:
    def __init__(self, units):
        self.decls: list[S.ClassDecl] = [c for unit in units for c in unit]
        self.diags: list[Diagnostic] = []
        self.sigs: dict[str, _Sig] = {}
        self.req_decls: dict[str, S.ClassDecl] = {}
        self.index: dict = {}

    def fail(self, code, message, loc):
        raise _Fail(code, message, loc)

    # -- pass 1: signatures -----------------------------------------------

    def collect(self):
        for c in self.decls:
            if c.name in self.sigs or c.name in self.req_decls:
                self.diags.append(Diagnostic("DuplicateName", f"class {c.name} declared twice", c.loc))
                continue
            self.index[c.name] = c.loc
            if c.deferred:
                self.req_decls[c.name] = c
                continue
            sig = _Sig(c.name, c)
            seen = set()
            for f in c.features:
                names = f.names if isinstance(f, S.AttributeDecl) else (f.name,)
                for n in names:
                    if n in seen:
                        self.diags.append(Diagnostic(
                            "DuplicateName", f"feature {c.name}.{n} declared twice", f.loc))
                        continue
                    seen.add(n)
                    self.index[f"{c.name}.{n}"] = f.loc
                    if isinstance(f, S.AttributeDecl):
                        sig.attrs[n] = f.type
                    elif f.result_type is not None:
                        sig.queries[n] = (tuple(f.params), f.result_type)
                    else:
                        sig.commands[n] = tuple(f.params)
            self.sigs[c.name] = sig

    def check_type(self, name: str, loc, allow_class=True):
        if name in L.PRIMITIVES:
            return
        if allow_class and name in self.sigs:
            return
        self.fail("UnknownName", f"unknown type {name}", loc)

    # -- expressions ------------------------------------------------------

    def expr(self, e, scope: _Scope, epoch=L.CUR):
        """Resolve ``e`` to a (logic node, type) pair."""
        if isinstance(e, S.IntLit):
            return L.IntLit(e.value), L.INTEGER
        if isinstance(e, S.BoolLit):
            return (L.TRUE if e.value else L.FALSE), L.BOOLEAN
        if isinstance(e, S.ResultRef):
            if scope.result_type is None:
                self.fail("TypeMismatch", "Result outside a query postcondition", e.loc)
            return L.AuxVar(L.RESULT, scope.result_type), scope.result_type
        if isinstance(e, S.CurrentRef):
            if scope.kind == "driver":
                self.fail("NonSelfContainedDriver", "driver refers to Current", e.loc)
            return _ObjRef(L.CURRENT, scope.owner, epoch), scope.owner
        if isinstance(e, S.Old):
            if not scope.allow_old:
                self.fail("IllegalOld", "old is only allowed in command and driver postconditions", e.loc)
            if epoch == L.OLD:
                self.fail("IllegalOld", "nested old", e.loc)
            return self.expr(e.expr, scope, L.OLD)
        if isinstance(e, S.Unary):
            node, t = self.expr(e.operand, scope, epoch)
            if e.op == "not":
                self.want(t, L.BOOLEAN, e)
                return L.Not(node), L.BOOLEAN
            self.want(t, L.INTEGER, e)
            if isinstance(node, L.IntLit):
                return L.IntLit(-node.value), L.INTEGER
            return L.Neg(node), L.INTEGER
        if isinstance(e, S.Binary):
            return self.binary(e, scope, epoch)
        if isinstance(e, S.Access):
            return self.access(e, scope, epoch)
        raise TypeError(f"unexpected expression {e!r}")

    def want(self, got, expected, e):
        if isinstance(got, str) and got == expected:
            return
        self.fail("TypeMismatch", f"expected {expected}, found {got} in {S.format_expr(e)}", e.loc)

    def value(self, e, scope, epoch=L.CUR):
        node, t = self.expr(e, scope, epoch)
        if isinstance(node, _ObjRef):
            self.fail("TypeMismatch", f"object {node.name} used as a value", e.loc)
        return node, t

    def formula(self, e, scope, epoch=L.CUR):
        node, t = self.value(e, scope, epoch)
        self.want(t, L.BOOLEAN, e)
        return node

    def binary(self, e: S.Binary, scope, epoch):
        left, lt = self.value(e.left, scope, epoch)
        right, rt = self.value(e.right, scope, epoch)
        op = e.op
        if op in ("and", "or", "implies"):
            self.want(lt, L.BOOLEAN, e.left)
            self.want(rt, L.BOOLEAN, e.right)
            if op == "and":
                return L.And((left, right)), L.BOOLEAN
            if op == "or":
                return L.Or((left, right)), L.BOOLEAN
            return L.Implies(left, right), L.BOOLEAN
        if op in ("+", "-"):
            self.want(lt, L.INTEGER, e.left)
            self.want(rt, L.INTEGER, e.right)
            return L.Sum(left, right if op == "+" else L.Neg(right)), L.INTEGER
        if op in ("=", "/="):
            if lt != rt:
                self.fail("TypeMismatch", f"cannot compare {lt} with {rt}", e.loc)
            return L.Cmp(op, left, right), L.BOOLEAN
        self.want(lt, L.INTEGER, e.left)
        self.want(rt, L.INTEGER, e.right)
        return L.Cmp(op, left, right), L.BOOLEAN

    def access(self, e: S.Access, scope: _Scope, epoch):
        if e.target is None:
            if e.name in scope.args:
                typ = scope.args[e.name]
                if e.args is not None:
                    self.fail("TypeMismatch", f"{e.name} is an argument, not a routine", e.loc)
                if typ in L.PRIMITIVES:
                    return L.AuxVar(e.name, typ), typ
                return _ObjRef(e.name, typ, epoch), typ
            if scope.kind == "driver":
                if e.name in scope.siblings:
                    self.fail("NonSelfContainedDriver",
                              f"driver refers to {e.name}, which is not one of its arguments", e.loc)
                self.fail("UnknownName", f"unknown name {e.name}", e.loc)
            target = _ObjRef(L.CURRENT, scope.owner, epoch)
        else:
            target, _ = self.expr(e.target, scope, epoch)
            if not isinstance(target, _ObjRef):
                self.fail("TypeMismatch", f"feature access {e.name} on a non-object", e.loc)
        sig = self.sigs[target.cls]
        if e.name in sig.attrs:
            if e.args is not None:
                self.fail("TypeMismatch", f"attribute {sig.name}.{e.name} takes no arguments", e.loc)
            typ = sig.attrs[e.name]
            return L.StateVar(target.name, e.name, epoch, typ), typ
        if e.name in sig.queries:
            params, rtype = sig.queries[e.name]
            actuals = e.args or ()
            if len(actuals) != len(params):
                self.fail("TypeMismatch",
                          f"{sig.name}.{e.name} expects {len(params)} arguments, got {len(actuals)}", e.loc)
            args = []
            for p, a in zip(params, actuals):
                node, t = self.expr(a, scope, epoch)
                if t != p.type:
                    self.fail("TypeMismatch", f"argument {p.name} expects {p.type}, found {t}", a.loc)
                if isinstance(node, _ObjRef):
                    args.append((node.name, node.epoch))
                elif isinstance(node, L.AuxVar) and node.name != L.RESULT:
                    args.append((node.name, None))
                else:
                    self.fail("UnsupportedConstruct", "query actuals must be argument names", a.loc)
            return L.QueryApp(target.name, e.name, tuple(args), epoch, rtype), rtype
        if e.name in sig.commands:
            self.fail("TypeMismatch", f"command {sig.name}.{e.name} used in an expression", e.loc)
        self.fail("UnknownName", f"{sig.name} has no feature {e.name}", e.loc)

    def clause(self, c: S.Clause, scope, epoch=L.CUR) -> M.Clause:
        return M.Clause(self.formula(c.expr, scope, epoch), c.label, S.format_expr(c.expr), c.loc)

    def clauses(self, items, scope, *, driver=False):
        out, modify = [], []
        for c in items:
            if isinstance(c, S.ModifyClause):
                if not driver:
                    self.fail("IllegalModify", "modify is only allowed in driver preconditions", c.loc)
                for n in c.names:
                    t = scope.args.get(n)
                    if t is None:
                        self.fail("UnknownName", f"unknown name {n} in modify clause", c.loc)
                    if t in L.PRIMITIVES:
                        self.fail("TypeMismatch", f"modify names an object argument, not {n}", c.loc)
                    modify.append(n)
            else:
                out.append(self.clause(c, scope))
        return tuple(out), frozenset(modify)

    # -- statements -------------------------------------------------------

    def stmts(self, body, scope):
        return tuple(self.stmt(s, scope) for s in body)

    def stmt(self, s, scope: _Scope):
        if isinstance(s, S.CheckStmt):
            if any(isinstance(c, S.ModifyClause) for c in s.clauses):
                self.fail("IllegalModify", "modify inside check", s.loc)
            return M.Check(tuple(self.clause(c, scope) for c in s.clauses), s.loc)
        if isinstance(s, S.IfStmt):
            branches = tuple((self.formula(c, scope), self.stmts(b, scope)) for c, b in s.branches)
            else_body = None if s.else_body is None else self.stmts(s.else_body, scope)
            return M.If(branches, else_body, s.loc)
        if isinstance(s, S.AssignStmt):
            if scope.kind == "driver":
                self.fail("UnsupportedConstruct", "assignment inside a specification driver", s.loc)
            if s.target == L.RESULT:
                if scope.kind != "query":
                    self.fail("TypeMismatch", "Result assigned outside a query", s.loc)
                typ = scope.result_type
            else:
                if scope.kind == "query":
                    self.fail("UnsupportedConstruct", f"query assigns attribute {s.target}", s.loc)
                typ = self.sigs[scope.owner].attrs.get(s.target)
                if typ is None:
                    self.fail("UnknownName", f"{scope.owner} has no attribute {s.target}", s.loc)
            value, vt = self.value(s.value, scope)
            if vt != typ:
                self.fail("TypeMismatch", f"cannot assign {vt} to {s.target}: {typ}", s.loc)
            return M.Assign(s.target, value, s.loc)
        if isinstance(s, S.CallStmt):
            return self.call(s, scope)
        raise TypeError(f"unexpected statement {s!r}")

    def call(self, s: S.CallStmt, scope: _Scope):
        e = s.call
        if e.target is None:
            if scope.kind == "driver":
                if e.name in scope.siblings:
                    self.fail("NonSelfContainedDriver", f"driver calls {e.name}", e.loc)
                self.fail("UnknownName", f"unknown name {e.name}", e.loc)
            target = _ObjRef(L.CURRENT, scope.owner)
        else:
            target, _ = self.expr(e.target, scope)
            if not isinstance(target, _ObjRef):
                self.fail("TypeMismatch", f"call of {e.name} on a non-object", e.loc)
        sig = self.sigs[target.cls]
        if e.name not in sig.commands:
            if e.name in sig.attrs or e.name in sig.queries:
                self.fail("TypeMismatch", f"{sig.name}.{e.name} is not a command", e.loc)
            self.fail("UnknownName", f"{sig.name} has no feature {e.name}", e.loc)
        params = sig.commands[e.name]
        actuals = e.args or ()
        if len(actuals) != len(params):
            self.fail("TypeMismatch",
                      f"{sig.name}.{e.name} expects {len(params)} arguments, got {len(actuals)}", e.loc)
        out = []
        for p, a in zip(params, actuals):
            node, t = self.expr(a, scope)
            if t != p.type:
                self.fail("TypeMismatch", f"argument {p.name} expects {p.type}, found {t}", a.loc)
            out.append(node.name if isinstance(node, _ObjRef) else node)
        return M.Call(target.name, e.name, tuple(out), s.loc)

    # -- declarations -----------------------------------------------------

    def params(self, params) -> tuple[M.Param, ...]:
        seen = set()
        out = []
        for p in params:
            if p.name in seen:
                self.fail("DuplicateName", f"argument {p.name} declared twice", p.loc)
            seen.add(p.name)
            self.check_type(p.type, p.loc)
            out.append(M.Param(p.name, p.type, p.loc))
        return tuple(out)

    def operational(self, c: S.ClassDecl) -> M.ContractedClass:
        if c.parent:
            self.diags.append(Diagnostic(
                "UnsupportedConstruct", "inheritance between operational classes", c.parent_loc))
        attrs, commands, queries = [], [], []
        for f in c.features:
            try:
                if isinstance(f, S.AttributeDecl):
                    if f.type not in L.PRIMITIVES:
                        self.check_type(f.type, f.loc)
                        self.fail("TypeMismatch", "attributes must be INTEGER or BOOLEAN", f.loc)
                    attrs.extend(M.Attribute(n, f.type, f.loc) for n in f.names)
                    continue
                if f.deferred:
                    self.fail("UnsupportedConstruct", f"deferred routine {f.name} in an effective class", f.loc)
                params = self.params(f.params)
                args = {p.name: p.type for p in params}
                if f.result_type is not None:
                    if f.result_type not in L.PRIMITIVES:
                        self.fail("TypeMismatch", "query results must be INTEGER or BOOLEAN", f.loc)
                    pre_scope = _Scope("query", c.name, args)
                    post_scope = _Scope("query", c.name, args, result_type=f.result_type)
                    pre, _ = self.clauses(f.require, pre_scope)
                    post, _ = self.clauses(f.ensure, post_scope)
                    body = None if f.body is None else self.stmts(f.body, post_scope)
                    queries.append(M.Query(f.name, f.result_type, params, pre, post, body, f.comment, f.loc))
                else:
                    pre, _ = self.clauses(f.require, _Scope("command", c.name, args))
                    post_scope = _Scope("command", c.name, args, allow_old=True)
                    post, _ = self.clauses(f.ensure, post_scope)
                    body = None if f.body is None else self.stmts(f.body, _Scope("command", c.name, args))
                    commands.append(M.Command(f.name, params, pre, post, body, f.comment, f.loc))
            except _Fail as exc:
                self.diags.append(exc.diag)
        return M.ContractedClass(c.name, c.frozen, tuple(attrs), tuple(commands), tuple(queries), c.loc)

    def requirements(self, c: S.ClassDecl) -> M.RequirementClass:
        siblings = frozenset(f.name for f in c.features if isinstance(f, S.RoutineDecl))
        drivers = []
        if c.parent is not None and c.parent not in self.req_decls:
            code = "TypeMismatch" if c.parent in self.sigs else "UnknownName"
            self.diags.append(Diagnostic(code, f"unknown requirement class {c.parent}", c.parent_loc))
        for f in c.features:
            try:
                if isinstance(f, S.AttributeDecl):
                    self.fail("UnsupportedConstruct",
                              "requirement classes declare only specification drivers", f.loc)
                if f.deferred or f.result_type is not None:
                    self.fail("UnsupportedConstruct",
                              f"{f.name} is not a specification driver (drivers are effective commands)", f.loc)
                params = self.params(f.params)
                args = {p.name: p.type for p in params}
                scope = _Scope("driver", c.name, args, siblings=siblings)
                pre, modify = self.clauses(f.require, scope, driver=True)
                for c2 in f.ensure:
                    if isinstance(c2, S.ModifyClause):
                        self.fail("IllegalModify", "modify is only allowed in driver preconditions", c2.loc)
                post, _ = self.clauses(f.ensure, _Scope("driver", c.name, args, allow_old=True,
                                                        siblings=siblings))
                body = self.stmts(f.body or (), scope)
                self.index[f"{c.name}.{f.name}"] = f.loc
                drivers.append(M.SpecificationDriver(
                    f.name, c.name, f.comment, f.header, params, modify, pre, body, post, f.loc))
            except _Fail as exc:
                self.diags.append(exc.diag)
        return M.RequirementClass(c.name, c.parent, c.header, c.description, tuple(drivers),
                                  tuple(c.notes), c.loc)

    def run(self) -> M.Project:
        self.collect()
        classes = {}
        reqs = {}
        for c in self.decls:
            if c.name in self.sigs and self.sigs[c.name].decl is c:
                classes[c.name] = self.operational(c)
            elif self.req_decls.get(c.name) is c:
                reqs[c.name] = self.requirements(c)
        project = M.Project(classes, reqs, dict(self.index))
        if not self.diags:
            for rc in reqs.values():
                try:
                    M.flatten_requirements(project, rc)
                except ResolveError as exc:
                    self.diags.extend(d for d in exc.diagnostics if d not in self.diags)
        if self.diags:
            raise ResolveError(self.diags)
        return project


def resolve(units) -> M.Project:
    """Resolve parsed units (lists of class declarations) into a project.

    Raises ResolveError carrying every diagnostic found, in source order of
    declarations, at most one per routine.
    """
    return _Resolver(list(units)).run()


def parse_sources(sources: dict[str, str]) -> M.Project:
    """Parse and resolve ``{path: text}``; lexing and parse errors become diagnostics."""
    units = []
    diags = []
    for path, text in sources.items():
        try:
            units.append(parse_unit(text, path))
        except (LexError, ParseError) as exc:
            diags.append(Diagnostic(exc.code, exc.message, exc.loc))
    if diags:
        raise ResolveError(diags)
    return resolve(units)


def expand_paths(patterns, base: str | None = None) -> list[str]:
    """Expand globs and directories to a sorted list of ``.sreq`` files."""
    out: list[str] = []
    for pat in patterns:
        full = pat if base is None or os.path.isabs(pat) else os.path.join(base, pat)
        if os.path.isdir(full):
            out.extend(sorted(_glob.glob(os.path.join(full, "*.sreq"))))
            continue
        matches = sorted(_glob.glob(full, recursive=True))
        if not matches:
            if _glob.has_magic(full):
                continue
            # let the open below raise a proper I/O error
            matches = [full]
        out.extend(matches)
    seen = set()
    return [p for p in out if not (p in seen or seen.add(p))]


def load_project(paths) -> M.Project:
    """Read, parse and resolve source files; OSError propagates."""
    sources = {}
    for p in expand_paths(paths):
        with open(p, encoding="utf-8") as fh:
            sources[p] = fh.read()
    return parse_sources(sources)

"""Surface syntax tree of the contract language and its pretty-printer.

Source locations are carried on every node but excluded from equality, so two
trees compare equal when they are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Location:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NOWHERE = Location("<unknown>", 0, 0)


def _loc():
    return field(default=NOWHERE, compare=False, repr=False)


# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: Location = _loc()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    loc: Location = _loc()


@dataclass(frozen=True)
class ResultRef:
    loc: Location = _loc()


@dataclass(frozen=True)
class CurrentRef:
    loc: Location = _loc()


@dataclass(frozen=True)
class Access:
    """``name``, ``name (args)``, ``target.name`` or ``target.name (args)``."""

    target: object
    name: str
    args: tuple | None = None
    loc: Location = _loc()


@dataclass(frozen=True)
class Old:
    expr: object
    loc: Location = _loc()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object
    loc: Location = _loc()


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    loc: Location = _loc()


# --------------------------------------------------------------------------
# Clauses and statements


@dataclass(frozen=True)
class Clause:
    expr: object
    label: str | None = None
    loc: Location = _loc()


@dataclass(frozen=True)
class ModifyClause:
    names: tuple[str, ...]
    loc: Location = _loc()


@dataclass(frozen=True)
class CallStmt:
    call: Access
    loc: Location = _loc()


@dataclass(frozen=True)
class AssignStmt:
    target: str
    value: object
    loc: Location = _loc()


@dataclass(frozen=True)
class IfStmt:
    branches: tuple[tuple[object, tuple], ...]
    else_body: tuple | None = None
    loc: Location = _loc()


@dataclass(frozen=True)
class CheckStmt:
    clauses: tuple[Clause, ...]
    loc: Location = _loc()


# --------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    loc: Location = _loc()


@dataclass(frozen=True)
class AttributeDecl:
    names: tuple[str, ...]
    type: str
    header: str = ""
    loc: Location = _loc()
    trivia: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class RoutineDecl:
    name: str
    params: tuple[Param, ...] = ()
    result_type: str | None = None
    comment: str = ""
    header: str = ""
    require: tuple = ()
    # None: hidden or deferred implementation
    body: tuple | None = ()
    ensure: tuple = ()
    deferred: bool = False
    loc: Location = _loc()
    trivia: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    deferred: bool = False
    frozen: bool = False
    parent: str | None = None
    notes: tuple[tuple[str, str], ...] = ()
    description: str = ""
    header: str = ""
    features: tuple = ()
    loc: Location = _loc()
    parent_loc: Location = _loc()
    trivia: tuple[str, ...] = field(default=(), compare=False)


# --------------------------------------------------------------------------
# Pretty-printing

_BIN_PREC = {
    "implies": 1,
    "or": 2,
    "and": 3,
    "=": 4, "/=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
}
_UNARY_PREC = 6
_ATOM_PREC = 7


def _prec(e) -> int:
    if isinstance(e, Binary):
        return _BIN_PREC[e.op]
    if isinstance(e, (Unary, Old)):
        return _UNARY_PREC
    return _ATOM_PREC


def format_expr(e) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ResultRef):
        return "Result"
    if isinstance(e, CurrentRef):
        return "Current"
    if isinstance(e, Access):
        text = e.name if e.target is None else f"{_wrap(e.target, _ATOM_PREC)}.{e.name}"
        if e.args is not None:
            text += " (" + ", ".join(format_expr(a) for a in e.args) + ")"
        return text
    if isinstance(e, Old):
        return "old " + _wrap(e.expr, _UNARY_PREC)
    if isinstance(e, Unary):
        sep = " " if e.op == "not" else ""
        return e.op + sep + _wrap(e.operand, _UNARY_PREC)
    if isinstance(e, Binary):
        p = _BIN_PREC[e.op]
        if e.op == "implies":
            # right-associative
            left, right = _wrap(e.left, p + 1), _wrap(e.right, p)
        elif p == 4:
            left, right = _wrap(e.left, p + 1), _wrap(e.right, p + 1)
        else:
            left, right = _wrap(e.left, p), _wrap(e.right, p + 1)
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e, min_prec: int) -> str:
    text = format_expr(e)
    return f"({text})" if _prec(e) < min_prec else text


def _comment_lines(text: str, indent: str, width: int = 72) -> list[str]:
    if not text:
        return []
    lines, cur = [], ""
    for word in text.split():
        if cur and len(cur) + 1 + len(word) > width:
            lines.append(cur)
            cur = word
        else:
            cur = f"{cur} {word}" if cur else word
    if cur:
        lines.append(cur)
    return [f"{indent}-- {line}" for line in lines]


def _format_clause(c, indent: str) -> str:
    if isinstance(c, ModifyClause):
        return f"{indent}modify ({', '.join(c.names)})"
    label = f"{c.label}: " if c.label else ""
    return f"{indent}{label}{format_expr(c.expr)}"


def _format_body(stmts, indent: str) -> list[str]:
    out = []
    for s in stmts:
        if isinstance(s, AssignStmt):
            out.append(f"{indent}{s.target} := {format_expr(s.value)}")
        elif isinstance(s, CallStmt):
            out.append(f"{indent}{format_expr(s.call)}")
        elif isinstance(s, CheckStmt):
            out.append(f"{indent}check")
            out.extend(_format_clause(c, indent + "  ") for c in s.clauses)
            out.append(f"{indent}end")
        elif isinstance(s, IfStmt):
            for i, (cond, body) in enumerate(s.branches):
                kw = "if" if i == 0 else "elseif"
                out.append(f"{indent}{kw} {format_expr(cond)} then")
                out.extend(_format_body(body, indent + "  "))
            if s.else_body is not None:
                out.append(f"{indent}else")
                out.extend(_format_body(s.else_body, indent + "  "))
            out.append(f"{indent}end")
        else:
            raise TypeError(f"not a statement: {s!r}")
    return out


def _format_params(params) -> str:
    if not params:
        return ""
    return " (" + "; ".join(f"{p.name}: {p.type}" for p in params) + ")"


def format_routine(r: RoutineDecl, indent: str = "  ") -> list[str]:
    sig = f"{indent}{r.name}{_format_params(r.params)}"
    if r.result_type:
        sig += f": {r.result_type}"
    out = [sig]
    inner = indent + "    "
    out.extend(_comment_lines(r.comment, inner))
    if r.require:
        out.append(f"{indent}  require")
        out.extend(_format_clause(c, inner) for c in r.require)
    if r.deferred:
        out.append(f"{indent}  deferred")
    else:
        out.append(f"{indent}  do")
        if r.body is None:
            out.append(f"{inner}-- Hidden implementation")
        else:
            out.extend(_format_body(r.body, inner))
    if r.ensure:
        out.append(f"{indent}  ensure")
        out.extend(_format_clause(c, inner) for c in r.ensure)
    out.append(f"{indent}  end")
    return out


def format_class(c: ClassDecl) -> str:
    """Source text that parses back to a structurally identical class."""
    out = []
    if c.notes:
        out.append("note")
        out.extend(f"  {k}: {v}" for k, v in c.notes)
    prefix = "deferred " if c.deferred else "frozen " if c.frozen else ""
    out.append(f"{prefix}class {c.name}")
    out.extend(_comment_lines(c.description, "  "))
    if c.parent:
        out.append(f"inherit {c.parent}")
    header = None
    for f in c.features:
        if f.header != header:
            header = f.header
            out.append("feature")
            out.extend(_comment_lines(header, "  "))
        if isinstance(f, AttributeDecl):
            out.append(f"  {', '.join(f.names)}: {f.type}")
        else:
            out.extend(format_routine(f))
    if header is None:
        out.append("feature")
    out.append("end")
    return "\n".join(out) + "\n"

"""Formula intermediate representation.

Terms are linear integer expressions over state variables, auxiliary
(primitive argument) variables and query applications.  Formulas are boolean
combinations of comparisons between terms and boolean-valued symbols.

State variables carry an *epoch*: ``OLD`` and ``CUR`` in resolved contracts,
integer snapshot indices once the verification-condition generator has
unfolded a routine body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

INTEGER = "INTEGER"
BOOLEAN = "BOOLEAN"
PRIMITIVES = (INTEGER, BOOLEAN)

OLD = "old"
CUR = "cur"

Epoch = Union[str, int]

CURRENT = "Current"
RESULT = "Result"


class LogicError(Exception):
    pass


class TypeMismatch(LogicError):
    pass


class UnboundSymbol(LogicError):
    pass


class NonLinearTerm(LogicError):
    pass


def _epoch_key(epoch: Epoch | None) -> str:
    if epoch is None:
        return ""
    if isinstance(epoch, int):
        return f"{epoch:06d}"
    return epoch


# --------------------------------------------------------------------------
# Symbols (leaves that a model assigns values to)


@dataclass(frozen=True)
class StateVar:
    obj: str
    attr: str
    epoch: Epoch = CUR
    type: str = INTEGER

    def sort_key(self) -> tuple:
        return (1, self.obj, self.attr, _epoch_key(self.epoch))


@dataclass(frozen=True)
class AuxVar:
    name: str
    type: str = INTEGER

    def sort_key(self) -> tuple:
        return (0, self.name, "", "")


@dataclass(frozen=True)
class QueryApp:
    """Application ``obj.query (args)`` evaluated in ``epoch``.

    ``args`` holds ``(name, epoch)`` pairs; primitive actuals have epoch None.
    """

    obj: str
    query: str
    args: tuple[tuple[str, Epoch | None], ...] = ()
    epoch: Epoch = CUR
    type: str = BOOLEAN

    def sort_key(self) -> tuple:
        args = ",".join(f"{n}{_epoch_key(e)}" for n, e in self.args)
        return (2, self.obj, self.query + "(" + args + ")", _epoch_key(self.epoch))


@dataclass(frozen=True)
class Zero:
    """Designated zero node anchoring unary bounds as differences."""

    type: str = INTEGER

    def sort_key(self) -> tuple:
        return (-1, "", "", "")


ZERO = Zero()

Symbol = Union[StateVar, AuxVar, QueryApp, Zero]
SYMBOL_TYPES = (StateVar, AuxVar, QueryApp, Zero)


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Neg:
    arg: "Term"


Term = Union[IntLit, Sum, Neg, StateVar, AuxVar, QueryApp, Zero]


# --------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class LinLe:
    """Normalized atom ``sum(coef * sym) <= bound``."""

    coeffs: tuple[tuple[Symbol, int], ...]
    bound: int

    def as_difference(self) -> tuple[Symbol, Symbol, int] | None:
        """Return ``(x, y, c)`` with ``x - y <= c``, or None outside the fragment."""
        if len(self.coeffs) == 1:
            sym, k = self.coeffs[0]
            if k == 1:
                return sym, ZERO, self.bound
            if k == -1:
                return ZERO, sym, self.bound
            return None
        if len(self.coeffs) == 2:
            (a, ka), (b, kb) = self.coeffs
            if ka == 1 and kb == -1:
                return a, b, self.bound
            if ka == -1 and kb == 1:
                return b, a, self.bound
        return None

    def negated(self) -> "LinLe":
        return LinLe(tuple((s, -k) for s, k in self.coeffs), -self.bound - 1)


Formula = Union[BoolConst, Cmp, Not, And, Or, Implies, LinLe, StateVar, AuxVar, QueryApp]

TRUE = BoolConst(True)
FALSE = BoolConst(False)

CMP_OPS = ("=", "/=", "<", "<=", ">", ">=")
NEGATED_CMP = {"=": "/=", "/=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def is_symbol(node) -> bool:
    return isinstance(node, SYMBOL_TYPES)


def conj(parts: Iterable) -> "Formula":
    """Flattening conjunction; drops ``true`` and collapses singletons."""
    out: list = []
    for p in parts:
        if isinstance(p, And):
            out.extend(p.args)
        elif p == TRUE:
            continue
        else:
            out.append(p)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(parts: Iterable) -> "Formula":
    out: list = []
    for p in parts:
        if isinstance(p, Or):
            out.extend(p.args)
        elif p == FALSE:
            continue
        else:
            out.append(p)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def implies(a, b) -> "Formula":
    if a == TRUE:
        return b
    return Implies(a, b)


def conjuncts(f) -> list:
    if isinstance(f, And):
        out = []
        for a in f.args:
            out.extend(conjuncts(a))
        return out
    if f == TRUE:
        return []
    return [f]


# --------------------------------------------------------------------------
# Typing


def type_of(node) -> str:
    if isinstance(node, (IntLit, Sum, Neg, Zero)):
        return INTEGER
    if is_symbol(node):
        return node.type
    return BOOLEAN


# --------------------------------------------------------------------------
# Traversal


def symbols(node) -> set:
    """All symbols occurring in a term or formula (ZERO excluded)."""
    out: set = set()
    for sub in walk(node):
        if is_symbol(sub) and not isinstance(sub, Zero):
            out.add(sub)
    return out


def walk(node) -> Iterator:
    yield node
    if isinstance(node, (Sum, Implies)):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Cmp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, (Neg, Not)):
        yield from walk(node.arg)
    elif isinstance(node, (And, Or)):
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, LinLe):
        for s, _ in node.coeffs:
            yield s


def atoms(f) -> list:
    """Atoms in left-to-right order (comparisons, boolean symbols, LinLe, constants)."""
    if isinstance(f, (And, Or)):
        out = []
        for a in f.args:
            out.extend(atoms(a))
        return out
    if isinstance(f, Not):
        return atoms(f.arg)
    if isinstance(f, Implies):
        return atoms(f.left) + atoms(f.right)
    if isinstance(f, Cmp) and type_of(f.left) == BOOLEAN:
        return atoms(f.left) + atoms(f.right)
    return [f]


def map_symbols(node, fn: Callable[[Symbol], object]):
    """Rebuild ``node`` with every symbol replaced by ``fn(symbol)``."""
    if is_symbol(node):
        return fn(node)
    if isinstance(node, (IntLit, BoolConst)):
        return node
    if isinstance(node, Sum):
        return Sum(map_symbols(node.left, fn), map_symbols(node.right, fn))
    if isinstance(node, Neg):
        return Neg(map_symbols(node.arg, fn))
    if isinstance(node, Cmp):
        return Cmp(node.op, map_symbols(node.left, fn), map_symbols(node.right, fn))
    if isinstance(node, Not):
        return Not(map_symbols(node.arg, fn))
    if isinstance(node, And):
        return And(tuple(map_symbols(a, fn) for a in node.args))
    if isinstance(node, Or):
        return Or(tuple(map_symbols(a, fn) for a in node.args))
    if isinstance(node, Implies):
        return Implies(map_symbols(node.left, fn), map_symbols(node.right, fn))
    if isinstance(node, LinLe):
        # symbols in a normalized atom must stay symbols
        return LinLe(tuple((fn(s), k) for s, k in node.coeffs), node.bound)
    raise LogicError(f"unexpected node {node!r}")


def rename_epochs(f, mapping: Mapping[Epoch, Epoch] | Callable[[str, Epoch], Epoch]):
    """Rewrite the epoch of every state variable and query application.

    ``mapping`` is either an epoch-to-epoch mapping, total over the epochs
    occurring in ``f``, or a callable ``(object, epoch) -> epoch`` for
    per-object renaming.
    """
    if callable(mapping):
        remap = mapping
    else:
        def remap(obj, epoch):
            return mapping[epoch]

    def fn(sym):
        if isinstance(sym, StateVar):
            return StateVar(sym.obj, sym.attr, remap(sym.obj, sym.epoch), sym.type)
        if isinstance(sym, QueryApp):
            args = tuple((n, None if e is None else remap(n, e)) for n, e in sym.args)
            return QueryApp(sym.obj, sym.query, args, remap(sym.obj, sym.epoch), sym.type)
        return sym

    return map_symbols(f, fn)


def substitute(f, var: Symbol, replacement):
    """Replace every occurrence of ``var`` by ``replacement``."""
    if type_of(replacement) != var.type:
        raise TypeMismatch(
            f"cannot substitute {render(replacement)} ({type_of(replacement)}) "
            f"for {render(var)} ({var.type})"
        )
    return map_symbols(f, lambda s: replacement if s == var else s)


def substitute_all(f, mapping: Mapping[Symbol, object]):
    """Simultaneous substitution."""
    for var, rep in mapping.items():
        if type_of(rep) != var.type:
            raise TypeMismatch(f"cannot substitute {render(rep)} for {render(var)}")
    return map_symbols(f, lambda s: mapping.get(s, s))


# --------------------------------------------------------------------------
# Evaluation


def evaluate(node, model: Mapping) -> bool | int:
    """Evaluate a term or formula; integers are unbounded."""
    if isinstance(node, Zero):
        return 0
    if is_symbol(node):
        try:
            return model[node]
        except KeyError:
            raise UnboundSymbol(f"no value for {render(node)}") from None
    if isinstance(node, IntLit):
        return node.value
    if isinstance(node, BoolConst):
        return node.value
    if isinstance(node, Sum):
        return evaluate(node.left, model) + evaluate(node.right, model)
    if isinstance(node, Neg):
        return -evaluate(node.arg, model)
    if isinstance(node, Cmp):
        a = evaluate(node.left, model)
        b = evaluate(node.right, model)
        op = node.op
        if op == "=":
            return a == b
        if op == "/=":
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        raise LogicError(f"unknown comparison {op}")
    if isinstance(node, Not):
        return not evaluate(node.arg, model)
    if isinstance(node, And):
        return all(evaluate(a, model) for a in node.args)
    if isinstance(node, Or):
        return any(evaluate(a, model) for a in node.args)
    if isinstance(node, Implies):
        return (not evaluate(node.left, model)) or bool(evaluate(node.right, model))
    if isinstance(node, LinLe):
        return sum(k * evaluate(s, model) for s, k in node.coeffs) <= node.bound
    raise LogicError(f"cannot evaluate {node!r}")


# --------------------------------------------------------------------------
# Normalization


def linearize(term) -> tuple[dict, int]:
    """Return ``(coeffs, constant)`` for a linear integer term."""
    coeffs: dict = {}
    const = 0

    def go(t, sign):
        nonlocal const
        if isinstance(t, IntLit):
            const += sign * t.value
        elif isinstance(t, Zero):
            pass
        elif is_symbol(t):
            if t.type != INTEGER:
                raise TypeMismatch(f"boolean {render(t)} in arithmetic")
            coeffs[t] = coeffs.get(t, 0) + sign
        elif isinstance(t, Sum):
            go(t.left, sign)
            go(t.right, sign)
        elif isinstance(t, Neg):
            go(t.arg, -sign)
        else:
            raise NonLinearTerm(f"not a linear term: {t!r}")

    go(term, 1)
    return {s: k for s, k in coeffs.items() if k != 0}, const


def _le(coeffs: dict, bound: int):
    if not coeffs:
        return BoolConst(0 <= bound)
    items = tuple(sorted(coeffs.items(), key=lambda kv: kv[0].sort_key()))
    return LinLe(items, bound)


def _neg_coeffs(coeffs: dict) -> dict:
    return {s: -k for s, k in coeffs.items()}


def _int_atom(op: str, left, right):
    # left - right == sum(coeffs) + k
    lc, lk = linearize(left)
    rc, rk = linearize(right)
    coeffs = dict(lc)
    for s, k in rc.items():
        coeffs[s] = coeffs.get(s, 0) - k
    coeffs = {s: k for s, k in coeffs.items() if k != 0}
    k = lk - rk
    if op == "<=":
        return _le(coeffs, -k)
    if op == "<":
        return _le(coeffs, -k - 1)
    if op == ">=":
        return _le(_neg_coeffs(coeffs), k)
    if op == ">":
        return _le(_neg_coeffs(coeffs), k - 1)
    if op == "=":
        return conj([_le(coeffs, -k), _le(_neg_coeffs(coeffs), k)])
    if op == "/=":
        return disj([_le(coeffs, -k - 1), _le(_neg_coeffs(coeffs), k - 1)])
    raise LogicError(f"unknown comparison {op}")


def _fold(f):
    if isinstance(f, And):
        parts = [_fold(a) for a in f.args]
        if FALSE in parts:
            return FALSE
        return conj(parts)
    if isinstance(f, Or):
        parts = [_fold(a) for a in f.args]
        if TRUE in parts:
            return TRUE
        return disj(parts)
    return f


def normalize(f):
    """Negation normal form over ``LinLe`` atoms and boolean literals.

    Strict comparisons are tightened over the integers, equalities become two
    inequalities and disequalities a disjunction.  Boolean literals are a
    boolean symbol or its negation.
    """
    return _fold(_nnf(f, True))


def _nnf(f, positive: bool):
    if isinstance(f, BoolConst):
        return f if positive else BoolConst(not f.value)
    if is_symbol(f):
        if f.type != BOOLEAN:
            raise TypeMismatch(f"integer {render(f)} used as a formula")
        return f if positive else Not(f)
    if isinstance(f, LinLe):
        return f if positive else f.negated()
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [_nnf(a, positive) for a in f.args]
        return conj(parts) if positive else disj(parts)
    if isinstance(f, Or):
        parts = [_nnf(a, positive) for a in f.args]
        return disj(parts) if positive else conj(parts)
    if isinstance(f, Implies):
        if positive:
            return disj([_nnf(f.left, False), _nnf(f.right, True)])
        return conj([_nnf(f.left, True), _nnf(f.right, False)])
    if isinstance(f, Cmp):
        if type_of(f.left) == BOOLEAN or type_of(f.right) == BOOLEAN:
            if type_of(f.left) != type_of(f.right):
                raise TypeMismatch(f"cannot compare {render(f.left)} with {render(f.right)}")
            if f.op not in ("=", "/="):
                raise TypeMismatch(f"ordering on booleans: {render(f)}")
            same = (f.op == "=") == positive
            a, b = f.left, f.right
            if same:
                return disj([conj([_nnf(a, True), _nnf(b, True)]),
                             conj([_nnf(a, False), _nnf(b, False)])])
            return disj([conj([_nnf(a, True), _nnf(b, False)]),
                         conj([_nnf(a, False), _nnf(b, True)])])
        op = f.op if positive else NEGATED_CMP[f.op]
        return _int_atom(op, f.left, f.right)
    raise NonLinearTerm(f"cannot normalize {f!r}")


def is_normalized(f) -> bool:
    for sub in walk(f):
        if isinstance(sub, (Cmp, Implies)):
            return False
        if isinstance(sub, Not) and not is_symbol(sub.arg):
            return False
    return True


# --------------------------------------------------------------------------
# Rendering

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_CMP = 4
_PREC_ADD = 5
_PREC_UNARY = 6
_PREC_ATOM = 7


def render_symbol(sym) -> str:
    if isinstance(sym, Zero):
        return "0"
    if isinstance(sym, AuxVar):
        return sym.name
    if isinstance(sym, StateVar):
        base = sym.attr if sym.obj == CURRENT else f"{sym.obj}.{sym.attr}"
    elif isinstance(sym, QueryApp):
        base = sym.query if sym.obj == CURRENT else f"{sym.obj}.{sym.query}"
        if sym.args:
            actuals = []
            for name, epoch in sym.args:
                actuals.append(name if epoch in (None, CUR, sym.epoch) else f"{name}@{epoch}")
            base += " (" + ", ".join(actuals) + ")"
    else:
        raise LogicError(f"not a symbol: {sym!r}")
    if sym.epoch == OLD:
        return "old " + base
    if isinstance(sym.epoch, int):
        return f"{base}@{sym.epoch}"
    return base


def _prec(node) -> int:
    if isinstance(node, Implies):
        return _PREC_IMPLIES
    if isinstance(node, Or):
        return _PREC_OR
    if isinstance(node, And):
        return _PREC_AND
    if isinstance(node, (Cmp, LinLe)):
        return _PREC_CMP
    if isinstance(node, Sum):
        return _PREC_ADD
    if isinstance(node, (Not, Neg)):
        return _PREC_UNARY
    if isinstance(node, IntLit) and node.value < 0:
        return _PREC_UNARY
    if is_symbol(node) and getattr(node, "epoch", None) == OLD:
        return _PREC_UNARY
    return _PREC_ATOM


def _wrap(node, min_prec: int) -> str:
    text = render(node)
    return f"({text})" if _prec(node) < min_prec else text


def render(node) -> str:
    """Canonical Eiffel-style text with minimal parentheses."""
    if is_symbol(node):
        return render_symbol(node)
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, BoolConst):
        return "true" if node.value else "false"
    if isinstance(node, Sum):
        left = _wrap(node.left, _PREC_ADD)
        right = node.right
        if isinstance(right, Neg):
            return f"{left} - {_wrap(right.arg, _PREC_ADD + 1)}"
        return f"{left} + {_wrap(right, _PREC_ADD + 1)}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _PREC_ATOM)
    if isinstance(node, Cmp):
        return f"{_wrap(node.left, _PREC_ADD)} {node.op} {_wrap(node.right, _PREC_ADD)}"
    if isinstance(node, Not):
        return "not " + _wrap(node.arg, _PREC_UNARY)
    if isinstance(node, And):
        return " and ".join(_wrap(a, _PREC_AND + 1) for a in node.args)
    if isinstance(node, Or):
        return " or ".join(_wrap(a, _PREC_OR + 1) for a in node.args)
    if isinstance(node, Implies):
        return f"{_wrap(node.left, _PREC_IMPLIES + 1)} implies {_wrap(node.right, _PREC_IMPLIES)}"
    if isinstance(node, LinLe):
        diff = node.as_difference()
        if diff is not None:
            x, y, c = diff
            return f"{render_symbol(x)} - {render_symbol(y)} <= {c}"
        parts = []
        for i, (s, k) in enumerate(node.coeffs):
            name = render_symbol(s)
            mag = "" if abs(k) == 1 else f"{abs(k)}*"
            if i == 0:
                parts.append(("-" if k < 0 else "") + mag + name)
            else:
                parts.append((" - " if k < 0 else " + ") + mag + name)
        return "".join(parts) + f" <= {node.bound}"
    raise LogicError(f"cannot render {node!r}")

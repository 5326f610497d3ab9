"""SMT-LIB 2 export of proof obligations.

The script asserts the normalized negation of the obligation, so an external
solver answering ``unsat`` confirms a PROVED verdict and ``sat`` a FAILED one.
"""

from __future__ import annotations

from . import logic as L


def _name(sym) -> str:
    text = L.render(sym).replace("|", "/").replace("\\", "/")
    return f"|{text}|"


def _int(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _term(coeffs) -> str:
    parts = []
    for sym, k in coeffs:
        if k == 1:
            parts.append(_name(sym))
        else:
            parts.append(f"(* {_int(k)} {_name(sym)})")
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def _atom(a: L.LinLe) -> str:
    diff = a.as_difference()
    if diff is not None:
        x, y, c = diff
        if y == L.ZERO:
            return f"(<= {_name(x)} {_int(c)})"
        if x == L.ZERO:
            return f"(>= {_name(y)} {_int(-c)})"
        return f"(<= (- {_name(x)} {_name(y)}) {_int(c)})"
    return f"(<= {_term(a.coeffs)} {_int(a.bound)})"


def _emit(f) -> str:
    if isinstance(f, L.BoolConst):
        return "true" if f.value else "false"
    if isinstance(f, L.LinLe):
        return _atom(f)
    if L.is_symbol(f):
        return _name(f)
    if isinstance(f, L.Not):
        return f"(not {_emit(f.arg)})"
    if isinstance(f, L.And):
        return "(and " + " ".join(_emit(a) for a in f.args) + ")"
    if isinstance(f, L.Or):
        return "(or " + " ".join(_emit(a) for a in f.args) + ")"
    raise L.LogicError(f"not normalized: {f!r}")


def export(formula, *, title: str = "", negate: bool = True) -> str:
    """Script checking satisfiability of ``not formula`` (or ``formula``)."""
    target = L.normalize(L.Not(formula) if negate else formula)
    syms = sorted(L.symbols(target) | L.symbols(formula), key=lambda s: s.sort_key())
    is_idl = all(a.as_difference() is not None for a in L.walk(target) if isinstance(a, L.LinLe))
    lines = []
    if title:
        lines.append(f"; {title}")
    if negate:
        lines.append("; sat: the obligation fails, unsat: it holds")
    lines.append(f"(set-logic {'QF_IDL' if is_idl else 'QF_LIA'})")
    for s in syms:
        sort = "Bool" if s.type == L.BOOLEAN else "Int"
        lines.append(f"(declare-fun {_name(s)} () {sort})")
    lines.append(f"(assert {_emit(target)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def export_obligation(ob) -> str:
    return export(ob.formula, title=f"obligation {ob.owner}")

"""Decision procedure for propositional integer difference logic.

The boolean skeleton of a normalized formula is searched with DPLL (unit
propagation, chronological backtracking); the difference atoms asserted on the
trail are checked for consistency after every propagation round by looking
for a negative cycle in the constraint graph (edge ``y -> x`` of weight ``c``
for ``x - y <= c``).  A negative cycle yields a learned blocking clause.
Models come from shortest-path potentials relative to the zero node.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from . import logic
from .logic import (
    BOOLEAN,
    INTEGER,
    ZERO,
    And,
    BoolConst,
    LinLe,
    Not,
    Or,
    evaluate,
    is_symbol,
    normalize,
    render,
    render_symbol,
)


class Status(str, Enum):
    VALID = "valid"
    INVALID = "invalid"
    SAT = "sat"
    UNSAT = "unsat"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class Verdict:
    status: Status
    model: dict | None = None
    # negative cycle of the last theory conflict, as asserted atoms
    cycle: tuple[LinLe, ...] | None = None
    reason: str = ""
    atom: object = None

    @property
    def ok(self) -> bool:
        return self.status in (Status.VALID, Status.UNSAT)


class SolverError(Exception):
    """Internal inconsistency, e.g. a model failing its self-check."""


class _Unsupported(Exception):
    def __init__(self, reason, atom):
        super().__init__(reason)
        self.reason = reason
        self.atom = atom


def _canonical(atom: LinLe) -> tuple[LinLe, bool]:
    """Pick one representative for an atom and its integer negation."""
    neg = atom.negated()
    return (atom, True) if atom.coeffs[0][1] > 0 else (neg, False)


class _Encoder:
    """Plaisted-Greenbaum clauses for an NNF formula."""

    def __init__(self):
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.theory: dict[int, LinLe] = {}
        self.bools: dict[int, object] = {}
        self._atom_var: dict = {}

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def atom_var(self, key, record) -> int:
        v = self._atom_var.get(key)
        if v is None:
            v = self.fresh()
            self._atom_var[key] = v
            record[v] = key
        return v

    def literal(self, f) -> int:
        if isinstance(f, LinLe):
            if f.as_difference() is None:
                raise _Unsupported(
                    f"atom outside the difference fragment: {render(f)}", f)
            rep, pos = _canonical(f)
            v = self.atom_var(rep, self.theory)
            return v if pos else -v
        if is_symbol(f):
            return self.atom_var(f, self.bools)
        if isinstance(f, Not) and is_symbol(f.arg):
            return -self.atom_var(f.arg, self.bools)
        if isinstance(f, And):
            v = self.fresh()
            for a in f.args:
                self.clauses.append([-v, self.literal(a)])
            return v
        if isinstance(f, Or):
            v = self.fresh()
            self.clauses.append([-v] + [self.literal(a) for a in f.args])
            return v
        if isinstance(f, BoolConst):
            v = self.fresh()
            self.clauses.append([v] if f.value else [-v])
            return v
        raise logic.LogicError(f"formula not normalized: {f!r}")


def _edges(asserted: list[tuple[int, LinLe]]):
    for lit, atom in asserted:
        x, y, c = atom.as_difference()
        yield y, x, c, lit


def negative_cycle(asserted: list[tuple[int, LinLe]]):
    """Bellman-Ford from a virtual source; returns (cycle literals, None) or (None, dist)."""
    edges = list(_edges(asserted))
    nodes = {ZERO}
    for u, v, _, _ in edges:
        nodes.add(u)
        nodes.add(v)
    dist = {n: 0 for n in nodes}
    pred: dict = {}
    changed_node = None
    for _ in range(len(nodes)):
        changed_node = None
        for u, v, w, lit in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = (u, lit)
                changed_node = v
        if changed_node is None:
            return None, dist
    # a relaxation in round |V| means a negative cycle reachable via pred
    node = changed_node
    for _ in range(len(nodes)):
        node = pred[node][0]
    cycle = []
    start = node
    while True:
        u, lit = pred[node]
        cycle.append(lit)
        node = u
        if node == start:
            break
    cycle.reverse()
    return cycle, None


class _Search:
    def __init__(self, enc: _Encoder, root: int, seed: int | None):
        self.enc = enc
        self.clauses = [list(c) for c in enc.clauses] + [[root]]
        self.assign: dict[int, bool] = {}
        # trail entries: (literal, is_decision)
        self.trail: list[tuple[int, bool]] = []
        self.rng = random.Random(seed) if seed is not None else None
        self.last_cycle: list[int] | None = None
        if self.rng is not None:
            self.rng.shuffle(self.clauses)

    def value(self, lit: int):
        v = self.assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def set(self, lit: int, decision: bool):
        self.assign[abs(lit)] = lit > 0
        self.trail.append((lit, decision))

    def propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        changed = True
        while changed:
            changed = False
            for clause in self.clauses:
                unassigned = None
                n_unassigned = 0
                satisfied = False
                for lit in clause:
                    val = self.value(lit)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        n_unassigned += 1
                        unassigned = lit
                if satisfied:
                    continue
                if n_unassigned == 0:
                    return clause
                if n_unassigned == 1:
                    self.set(unassigned, False)
                    changed = True
        return None

    def asserted_theory(self):
        out = []
        for var, atom in self.enc.theory.items():
            val = self.assign.get(var)
            if val is True:
                out.append((var, atom))
            elif val is False:
                out.append((-var, atom.negated()))
        return out

    def theory_conflict(self):
        cycle, _ = negative_cycle(self.asserted_theory())
        if cycle is None:
            return None
        self.last_cycle = cycle
        learned = [-lit for lit in cycle]
        self.clauses.append(learned)
        return learned

    def backtrack(self) -> bool:
        while self.trail:
            lit, decision = self.trail.pop()
            del self.assign[abs(lit)]
            if decision:
                self.set(-lit, False)
                return True
        return False

    def pick(self):
        for clause in self.clauses:
            if any(self.value(l) is True for l in clause):
                continue
            for lit in clause:
                if self.value(lit) is None:
                    return lit
        return None

    def run(self) -> bool:
        while True:
            conflict = self.propagate()
            if conflict is None:
                conflict = self.theory_conflict()
            if conflict is not None:
                if not self.backtrack():
                    return False
                continue
            lit = self.pick()
            if lit is None:
                return True
            self.set(lit, True)


def _model(search: _Search, wanted: set) -> dict:
    _, dist = negative_cycle(search.asserted_theory())
    base = dist.get(ZERO, 0)
    model: dict = {}
    for sym in sorted(wanted, key=lambda s: s.sort_key()):
        if sym.type == INTEGER:
            model[sym] = dist.get(sym, base) - base
    for var, sym in search.enc.bools.items():
        model[sym] = search.assign.get(var, False)
    for sym in wanted:
        if sym.type == BOOLEAN and sym not in model:
            model[sym] = False
    return model


def check_sat(f, *, seed: int | None = None) -> Verdict:
    """Satisfiability of ``f`` (normalized on entry if needed)."""
    wanted = logic.symbols(f)
    nf = normalize(f)
    if isinstance(nf, BoolConst):
        if not nf.value:
            return Verdict(Status.UNSAT)
        model = {s: (False if s.type == BOOLEAN else 0) for s in wanted}
        _self_check(f, nf, model, True)
        return Verdict(Status.SAT, model=model)
    enc = _Encoder()
    try:
        root = enc.literal(nf)
    except _Unsupported as exc:
        return Verdict(Status.UNSUPPORTED, reason=exc.reason, atom=exc.atom)
    search = _Search(enc, root, seed)
    if not search.run():
        cycle = None
        if search.last_cycle is not None:
            cycle = tuple(
                enc.theory[abs(l)] if l > 0 else enc.theory[abs(l)].negated()
                for l in search.last_cycle
            )
        return Verdict(Status.UNSAT, cycle=cycle)
    wanted |= logic.symbols(nf)
    model = _model(search, wanted)
    _self_check(f, nf, model, True)
    return Verdict(Status.SAT, model=model)


def _self_check(original, nf, model, expected: bool):
    if evaluate(nf, model) is not expected or bool(evaluate(original, model)) is not expected:
        raise SolverError(f"model self-check failed for {render(original)}")


def check_valid(f, *, seed: int | None = None) -> Verdict:
    """Validity of ``f``: valid iff ``not f`` is unsatisfiable."""
    v = check_sat(Not(f), seed=seed)
    if v.status == Status.UNSAT:
        return Verdict(Status.VALID, cycle=v.cycle)
    if v.status == Status.SAT:
        if evaluate(f, v.model):
            raise SolverError("counterexample does not falsify the formula")
        return Verdict(Status.INVALID, model=v.model)
    return v


# --------------------------------------------------------------------------
# Explanation


def epoch_label(epoch, final=None) -> str:
    if epoch == logic.OLD or epoch == 0:
        return "pre"
    if epoch == logic.CUR or (final is not None and epoch == final):
        return "post"
    return f"snapshot {epoch}"


def group_model(model: dict, final_epochs: dict | None = None) -> dict[str, dict[str, object]]:
    """Group model values by pre/post/auxiliary columns.

    ``final_epochs`` maps object names to the epoch holding their post-state.
    """
    final_epochs = final_epochs or {}
    groups: dict[str, dict[str, object]] = {}
    for sym in sorted(model, key=lambda s: s.sort_key()):
        val = model[sym]
        if isinstance(val, bool):
            val = "true" if val else "false"
        if isinstance(sym, logic.AuxVar):
            group = "auxiliary"
            name = sym.name
        elif isinstance(sym, (logic.StateVar, logic.QueryApp)):
            group = epoch_label(sym.epoch, final_epochs.get(sym.obj))
            plain = logic.rename_epochs(sym, lambda o, e: logic.CUR)
            name = render_symbol(plain)
        else:
            continue
        groups.setdefault(group, {})[name] = val
    order = ["pre"] + sorted(g for g in groups if g.startswith("snapshot")) + ["post", "auxiliary"]
    return {g: groups[g] for g in order if g in groups}


def explain(verdict: Verdict, final_epochs: dict | None = None) -> str:
    """Human-readable rendering of a counterexample or of an unsat cycle."""
    if verdict.status in (Status.INVALID, Status.SAT):
        lines = []
        for group, values in group_model(verdict.model, final_epochs).items():
            lines.append(f"  {group}:")
            for name, val in values.items():
                lines.append(f"    {name} = {val}")
        return "\n".join(lines)
    if verdict.status == Status.UNSAT and verdict.cycle:
        total = sum(a.as_difference()[2] for a in verdict.cycle)
        lines = ["  negative cycle (total weight %d):" % total]
        lines += [f"    {render(a)}" for a in verdict.cycle]
        return "\n".join(lines)
    if verdict.status == Status.UNSAT:
        return "  propositionally unsatisfiable"
    raise ValueError(f"nothing to explain for a {verdict.status.value} verdict")

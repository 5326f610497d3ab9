"""Independent oracles: numpy evaluation, brute-force enumeration, concrete execution.

None of this goes through the solver or the normalizer.
"""

from __future__ import annotations

import random

import numpy as np

from seamreq import logic as L
from seamreq import model as M

CURRENT = L.CURRENT


# -- vectorized evaluation ------------------------------------------------------


def np_eval(node, env):
    """Evaluate over numpy arrays; ``env`` maps symbols to broadcastable arrays."""
    if isinstance(node, L.Zero):
        return 0
    if L.is_symbol(node):
        return env[node]
    if isinstance(node, L.IntLit):
        return node.value
    if isinstance(node, L.BoolConst):
        return node.value
    if isinstance(node, L.Sum):
        return np_eval(node.left, env) + np_eval(node.right, env)
    if isinstance(node, L.Neg):
        return -np_eval(node.arg, env)
    if isinstance(node, L.Cmp):
        a, b = np_eval(node.left, env), np_eval(node.right, env)
        return {
            "=": np.equal, "/=": np.not_equal, "<": np.less, "<=": np.less_equal,
            ">": np.greater, ">=": np.greater_equal,
        }[node.op](a, b)
    if isinstance(node, L.Not):
        return np.logical_not(np_eval(node.arg, env))
    if isinstance(node, L.And):
        out = True
        for a in node.args:
            out = np.logical_and(out, np_eval(a, env))
        return out
    if isinstance(node, L.Or):
        out = False
        for a in node.args:
            out = np.logical_or(out, np_eval(a, env))
        return out
    if isinstance(node, L.Implies):
        return np.logical_or(np.logical_not(np_eval(node.left, env)), np_eval(node.right, env))
    if isinstance(node, L.LinLe):
        total = 0
        for s, k in node.coeffs:
            total = total + k * np_eval(s, env)
        return np.less_equal(total, node.bound)
    raise TypeError(node)


# -- random difference-logic formulas ----------------------------------------


def random_difference_formula(rng: random.Random, n_vars=4, max_const=8, max_atoms=12):
    """Random formula over difference atoms (unnormalized, mixed comparisons).

    At most ``max_atoms`` atoms; oversized draws are rejected and redrawn.
    """
    while True:
        f, xs = _draw_formula(rng, n_vars, max_const, max_atoms)
        if len(L.atoms(f)) <= max_atoms:
            return f, xs


def _draw_formula(rng, n_vars, max_const, max_atoms):
    n = rng.randint(1, n_vars)
    xs = [L.AuxVar(f"x{i}") for i in range(n)]
    budget = [rng.randint(2, max_atoms)]

    def atom():
        budget[0] -= 1
        c = L.IntLit(rng.randint(-max_const, max_const))
        op = rng.choice(L.CMP_OPS)
        x = rng.choice(xs)
        shape = rng.random()
        if shape < 0.3 or n == 1:
            return L.Cmp(op, x, c)
        y = rng.choice([v for v in xs if v != x])
        if shape < 0.65:
            return L.Cmp(op, L.Sum(x, L.Neg(y)), c)
        return L.Cmp(op, x, L.Sum(y, c))

    def formula(depth):
        if budget[0] <= 1 or depth > 3 or (depth > 0 and rng.random() < 0.3):
            return atom()
        kind = rng.choices(["and", "or", "not", "implies"], [6, 2, 1, 1])[0]
        if kind == "not":
            return L.Not(formula(depth + 1))
        if kind == "implies":
            return L.Implies(formula(depth + 1), formula(depth + 1))
        parts = [formula(depth + 1) for _ in range(rng.randint(2, 4)) if budget[0] > 0]
        if len(parts) < 2:
            parts.append(atom())
        return L.And(tuple(parts)) if kind == "and" else L.Or(tuple(parts))

    return formula(0), xs


def small_model_bound(n_vars: int, max_const: int) -> int:
    return (n_vars + 1) * (max_const + 1)


def _constants(f):
    out = [0]
    for sub in L.walk(f):
        if isinstance(sub, L.IntLit):
            out.append(abs(sub.value))
    return max(out)


def brute_force_sat(f, xs, values=None) -> dict | None:
    """Search ``values^n`` exhaustively (chunked on the first variable).

    ``values`` defaults to ``[-B, B]`` with B the small-model bound.
    """
    if values is None:
        B = small_model_bound(len(xs), _constants(f))
        values = np.arange(-B, B + 1, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    rest = xs[1:]
    shape = [len(values)] * len(rest)
    grids = {}
    for i, x in enumerate(rest):
        s = [1] * len(rest)
        s[i] = len(values)
        grids[x] = values.reshape(s)
    for v0 in values:
        env = dict(grids)
        env[xs[0]] = v0
        res = np.broadcast_to(np.asarray(np_eval(f, env), dtype=bool), shape)
        if res.any():
            idx = np.unravel_index(int(np.argmax(res)), shape) if shape else ()
            model = {xs[0]: int(v0)}
            for x, j in zip(rest, idx):
                model[x] = int(values[j])
            return model
    return None


# -- random loop-free command bodies --------------------------------------------

ATTRS = ("a", "b", "c")


def cur(name):
    return L.StateVar(CURRENT, name, L.CUR)


def old(name):
    return L.StateVar(CURRENT, name, L.OLD)


def _rand_term(rng):
    k = rng.randint(0, 60)
    r = rng.random()
    if r < 0.25:
        return L.IntLit(k)
    x = cur(rng.choice(ATTRS))
    if r < 0.5:
        return x
    if r < 0.75:
        return L.Sum(x, L.IntLit(rng.randint(0, 60)))
    return L.Sum(x, L.Neg(L.IntLit(rng.randint(0, 60))))


def _rand_cond(rng):
    op = rng.choice(L.CMP_OPS)
    x = cur(rng.choice(ATTRS))
    if rng.random() < 0.5:
        return L.Cmp(op, x, L.IntLit(rng.randint(0, 60)))
    return L.Cmp(op, x, _rand_term(rng))


def random_body(rng: random.Random, depth=0, max_len=4):
    out = []
    for _ in range(rng.randint(1, max_len)):
        r = rng.random()
        if r < 0.6 or depth >= 2:
            out.append(M.Assign(rng.choice(ATTRS), _rand_term(rng)))
        elif r < 0.9:
            branches = [(_rand_cond(rng), random_body(rng, depth + 1, 3))]
            if rng.random() < 0.3:
                branches.append((_rand_cond(rng), random_body(rng, depth + 1, 2)))
            else_body = random_body(rng, depth + 1, 3) if rng.random() < 0.6 else None
            out.append(M.If(tuple(branches), else_body))
        else:
            out.append(M.Check((M.Clause(_rand_cond(rng)),)))
    return tuple(out)


def random_post(rng: random.Random, n_atoms=None):
    """Two-state postcondition clauses over difference atoms."""
    clauses = []
    for _ in range(n_atoms or rng.randint(1, 3)):
        x = cur(rng.choice(ATTRS))
        op = rng.choice(L.CMP_OPS)
        r = rng.random()
        if r < 0.3:
            atom = L.Cmp(op, x, L.IntLit(rng.randint(0, 120)))
        elif r < 0.7:
            atom = L.Cmp(op, x, L.Sum(old(rng.choice(ATTRS)), L.IntLit(rng.randint(-60, 60))))
        else:
            atom = L.Cmp(op, x, L.Sum(cur(rng.choice(ATTRS)), L.IntLit(rng.randint(-60, 60))))
        if rng.random() < 0.5:
            guard = L.Cmp(rng.choice(L.CMP_OPS), old(rng.choice(ATTRS)), L.IntLit(rng.randint(0, 60)))
            atom = L.Implies(guard, atom)
        clauses.append(M.Clause(atom, None, L.render(atom)))
    return tuple(clauses)


def box_precondition(lo=0, hi=60):
    out = []
    for a in ATTRS:
        out.append(M.Clause(L.Cmp(">=", cur(a), L.IntLit(lo))))
        out.append(M.Clause(L.Cmp("<=", cur(a), L.IntLit(hi))))
    return tuple(out)


def box_class(body, post):
    cmd = M.Command("step", (), box_precondition(), post, body)
    return M.ContractedClass("BOX", False, tuple(M.Attribute(a, L.INTEGER) for a in ATTRS), (cmd,))


def np_execute(body, state: dict) -> dict:
    """Run a body on arrays of pre-states; Check statements are ignored."""
    state = dict(state)

    def env():
        return {cur(a): state[a] for a in ATTRS}

    def run(stmts, mask):
        for s in stmts:
            if isinstance(s, M.Assign):
                value = np.broadcast_to(np_eval(s.value, env()), mask.shape)
                state[s.target] = np.where(mask, value, state[s.target])
            elif isinstance(s, M.If):
                remaining = mask
                for cond, branch in s.branches:
                    c = np.logical_and(remaining, np_eval(cond, env()))
                    remaining = np.logical_and(remaining, np.logical_not(np_eval(cond, env())))
                    run(branch, c)
                if s.else_body:
                    run(s.else_body, remaining)

    some = next(iter(state.values()))
    run(body, np.ones(np.shape(some), dtype=bool))
    return state


def check_clauses_hold(body, grid: dict) -> np.ndarray:
    """Per pre-state: do all Check assertions hold when reached?"""
    state = dict(grid)
    ok = np.ones(np.shape(grid[ATTRS[0]]), dtype=bool)

    def env():
        return {cur(a): state[a] for a in ATTRS}

    def run(stmts, mask):
        nonlocal ok
        for s in stmts:
            if isinstance(s, M.Assign):
                state[s.target] = np.where(mask, np_eval(s.value, env()), state[s.target])
            elif isinstance(s, M.Check):
                for c in s.clauses:
                    ok = np.logical_and(ok, np.logical_or(~mask, np_eval(c.formula, env())))
            elif isinstance(s, M.If):
                remaining = mask
                for cond, branch in s.branches:
                    cv = np_eval(cond, env())
                    c = np.logical_and(remaining, cv)
                    remaining = np.logical_and(remaining, np.logical_not(cv))
                    run(branch, c)
                if s.else_body:
                    run(s.else_body, remaining)

    run(body, np.ones_like(ok))
    return ok


def clause_holds_after(body, clause, grid: dict) -> np.ndarray:
    """Truth of ``clause`` after running ``body`` from every grid pre-state."""
    post = np_execute(body, grid)
    env = {cur(a): np.broadcast_to(post[a], grid[a].shape) for a in ATTRS}
    env.update({old(a): grid[a] for a in ATTRS})
    return np.broadcast_to(np_eval(clause.formula, env), grid[ATTRS[0]].shape)


def pre_state_grid(lo=0, hi=60) -> dict:
    v = np.arange(lo, hi + 1, dtype=np.int64)
    a, b, c = np.meshgrid(v, v, v, indexing="ij")
    return {"a": a.ravel(), "b": b.ravel(), "c": c.ravel()}

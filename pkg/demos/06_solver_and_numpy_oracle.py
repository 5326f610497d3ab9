"""
The decision procedure, checked against brute force
===================================================

Obligations land in integer difference logic.  Small formulas have small
models, so a numpy grid search over [-B, B]^n is a complete oracle.
"""

import random
import time

import numpy as np

from seamreq import logic as L
from seamreq import solver as S
from seamreq import smtlib

x, y, z = (L.AuxVar(n) for n in "xyz")

# A negative cycle: x < y and y < x.
v = S.check_sat(L.And((L.Cmp("<", x, y), L.Cmp("<", y, x))))
print(v.status.value)
print(S.explain(v))

# Normalization tightens strict bounds and splits equalities.
f = L.Cmp("=", x, L.Sum(y, L.IntLit(1)))
print(L.render(f), "->", L.render(L.normalize(f)))

# Random formulas over three variables, checked on a numpy grid.
rng = random.Random(1)


def random_formula():
    atoms = []
    for _ in range(rng.randint(2, 6)):
        a, b = rng.sample([x, y, z], 2)
        atoms.append(L.Cmp(rng.choice(L.CMP_OPS), L.Sum(a, L.Neg(b)), L.IntLit(rng.randint(-4, 4))))
    return L.Or(tuple(L.And(tuple(atoms[i::2])) for i in range(2)))


def grid_sat(f, bound=20):
    v = np.arange(-bound, bound + 1)
    gx, gy, gz = np.meshgrid(v, v, v, indexing="ij")
    env = {x: gx, y: gy, z: gz}

    def ev(n):
        if isinstance(n, L.AuxVar):
            return env[n]
        if isinstance(n, L.IntLit):
            return n.value
        if isinstance(n, L.Sum):
            return ev(n.left) + ev(n.right)
        if isinstance(n, L.Neg):
            return -ev(n.arg)
        if isinstance(n, L.And):
            return np.logical_and.reduce([ev(a) for a in n.args])
        if isinstance(n, L.Or):
            return np.logical_or.reduce([ev(a) for a in n.args])
        ops = {"=": np.equal, "/=": np.not_equal, "<": np.less, "<=": np.less_equal,
               ">": np.greater, ">=": np.greater_equal}
        return ops[n.op](ev(n.left), ev(n.right))

    return bool(np.any(ev(f)))


t0 = time.perf_counter()
agree = sum((S.check_sat(f).status == S.Status.SAT) == grid_sat(f) for f in (random_formula() for _ in range(200)))
print(f"{agree}/200 agree with the grid search ({time.perf_counter() - t0:.2f} s)")

# Anything can also go out to an external solver.
print(smtlib.export(L.Implies(L.Cmp("<=", x, L.IntLit(58)), L.Cmp("=", x, L.IntLit(0))), title="example"))

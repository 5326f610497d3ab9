import random

import numpy as np
import pytest

from seamreq import logic as L
from seamreq import solver as S
from seamreq import trace, vcgen

from oracles import brute_force_sat, np_eval, random_difference_formula

x, y, z, c = (L.AuxVar(n) for n in "xyzc")


def le(t, k):
    return L.Cmp("<=", t, L.IntLit(k))


def diff(a, b):
    return L.Sum(a, L.Neg(b))


def test_negative_cycle_is_unsat():
    v = S.check_sat(L.And((le(diff(x, y), -1), le(diff(y, x), -1))))
    assert v.status == S.Status.UNSAT
    assert sum(a.as_difference()[2] for a in v.cycle) == -2


def test_satisfiable_difference_pair():
    f = L.And((le(diff(x, y), -1), le(diff(y, x), 2)))
    v = S.check_sat(f)
    assert v.status == S.Status.SAT
    assert L.evaluate(f, v.model) is True


def test_tight_cycle_of_weight_minus_one_is_unsat():
    # x - y <= -1 and y - x <= 0 leaves no integer room (cycle weight -1)
    assert S.check_sat(L.And((le(diff(x, y), -1), le(diff(y, x), 0)))).status == S.Status.UNSAT


def test_validity_examples():
    f = L.Implies(L.And((L.Cmp("=", x, c), le(x, 58))), L.Cmp("=", L.Sum(x, L.IntLit(1)), L.Sum(c, L.IntLit(1))))
    assert S.check_valid(f).status == S.Status.VALID
    g = L.Implies(le(x, 58), L.Cmp("=", x, L.IntLit(0)))
    v = S.check_valid(g)
    assert v.status == S.Status.INVALID
    assert L.evaluate(g, v.model) is False


def test_unsupported_atoms_are_named():
    v = S.check_sat(le(L.Sum(diff(x, y), L.Neg(z)), 3))
    assert v.status == S.Status.UNSUPPORTED
    assert v.atom is not None and v.reason
    assert S.check_sat(le(L.Sum(x, y), 3)).status == S.Status.UNSUPPORTED


def test_boolean_atoms():
    p = L.AuxVar("p", L.BOOLEAN)
    assert S.check_sat(L.And((p, L.Not(p)))).status == S.Status.UNSAT
    v = S.check_sat(L.Or((p, le(x, 0))))
    assert v.status == S.Status.SAT and L.evaluate(L.Or((p, le(x, 0))), v.model)


def test_explain_requires_a_failure():
    v = S.check_valid(L.TRUE)
    assert v.status == S.Status.VALID
    with pytest.raises(ValueError):
        S.explain(v)


def test_explain_lists_negative_cycle():
    v = S.check_sat(L.And((le(diff(x, y), -1), le(diff(y, x), -1), le(x, 5))))
    text = S.explain(v)
    assert "total weight -2" in text
    assert "x - y <= -1" in text and "y - x <= -1" in text


def test_req_8_counterexample(clock_project):
    d = trace.find_driver(clock_project, "req_8")
    ob = vcgen.driver_obligation(d, clock_project)
    sat = S.check_sat(L.Not(ob.formula))
    assert sat.status == S.Status.SAT
    v = S.check_valid(ob.formula)
    assert v.status == S.Status.INVALID
    env = {s: np.int64(k) for s, k in v.model.items()}
    assert not bool(np_eval(ob.formula, env))
    groups = S.group_model(v.model, dict(ob.final_epochs))
    assert set(groups) == {"pre", "post", "auxiliary"}
    assert "current_hour" in groups["auxiliary"]
    assert {"clock.hour", "clock.second"} <= set(groups["pre"]) & set(groups["post"])


def test_req_8_falsifiable_by_enumeration(clock_project):
    # independent search over a coarse grid of attribute values in [-1, 60]
    d = trace.find_driver(clock_project, "req_8")
    f = vcgen.driver_obligation(d, clock_project).formula
    syms = sorted(L.symbols(f), key=lambda s: s.sort_key())
    model = brute_force_sat(L.Not(f), syms, [-1, 0, 1, 22, 23, 58, 59, 60])
    assert model is not None
    assert L.evaluate(f, model) is False


def test_req_1_obligation_valid(clock_project):
    d = trace.find_driver(clock_project, "req_1")
    assert S.check_valid(vcgen.driver_obligation(d, clock_project).formula).status == S.Status.VALID


def test_deterministic_under_fixed_seed():
    rng = random.Random(5)
    for _ in range(50):
        f, _ = random_difference_formula(rng)
        a, b = S.check_sat(f, seed=9), S.check_sat(f, seed=9)
        assert a == b


def test_monotonicity_spot_check():
    rng = random.Random(17)
    checked = 0
    while checked < 40:
        a, _ = random_difference_formula(rng)
        if S.check_sat(a).status != S.Status.UNSAT:
            continue
        b, _ = random_difference_formula(rng)
        assert S.check_sat(L.And((a, b))).status == S.Status.UNSAT
        checked += 1


def test_agreement_with_enumeration_small_sample():
    rng = random.Random(99)
    for _ in range(100):
        f, xs = random_difference_formula(rng)
        v = S.check_sat(f)
        expected = brute_force_sat(f, xs) is not None
        assert (v.status == S.Status.SAT) == expected
        if expected:
            assert L.evaluate(f, v.model) is True

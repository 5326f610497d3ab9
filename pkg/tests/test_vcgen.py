import dataclasses
import itertools

import pytest

from seamreq import logic as L
from seamreq import model as M
from seamreq import trace, vcgen
from seamreq.resolve import parse_sources
from seamreq.vcgen import Verdict

from conftest import BASE, EXTENDED, load

x = L.StateVar(L.CURRENT, "x")


def verdicts(outcomes):
    return {o.name: o.verdict for o in outcomes}


def replace_routine(project, cls_name, name, **changes):
    cls = project.classes[cls_name]
    commands = tuple(dataclasses.replace(c, **changes) if c.name == name else c for c in cls.commands)
    classes = dict(project.classes)
    classes[cls_name] = dataclasses.replace(cls, commands=commands)
    return dataclasses.replace(project, classes=classes)


def test_req_1_obligation_shape(clock_project):
    ob = vcgen.driver_obligation(trace.find_driver(clock_project, "req_1"), clock_project)
    hyp = L.render(ob.hypothesis)
    assert hyp.startswith("clock.second@0 < 59 and clock.second@0 = current_second and ")
    assert L.render(ob.goal) == "clock.second@1 = current_second + 1"
    assert ob.snapshots == (0, 1)
    assert dict(ob.final_epochs) == {"clock": 1}


def test_clock_requirements_against_closed_contract(clock_project):
    out = vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", clock_project)
    assert [o.name for o in out] == [f"req_{i}" for i in range(1, 9)]
    assert [o.verdict for o in out] == [Verdict.PROVED] * 7 + [Verdict.FAILED]
    failed = out[-1]
    ob = vcgen.driver_obligation(trace.find_driver(clock_project, "req_8"), clock_project)
    assert L.evaluate(ob.formula, failed.counterexample) is False
    assert "pre:" in failed.explanation and "post:" in failed.explanation


def test_req_8_against_inferred_contract(inferred_project):
    out = vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", inferred_project)
    assert all(o.verdict == Verdict.PROVED for o in out)


def test_train_drivers_use_query_axioms(train_project):
    out = vcgen.verify_requirement_class("TRAIN_REQUIREMENTS", train_project)
    assert [o.verdict for o in out] == [Verdict.PROVED, Verdict.PROVED]
    assert any("distinct" in a for a in out[0].assumptions)


def test_query_axiom_instance(train_project):
    qa = L.QueryApp("tr", "on", (("s", 0),), 0)
    types = {"tr": "TRAIN", "s": "TRACK_SEGMENT"}
    ax = vcgen.query_axioms(qa, train_project, types)
    assert L.render(ax) == "tr.on (s)@0 implies tr.speed@0 <= s.speed_limit@0"
    assert vcgen.query_axioms(L.And((qa, L.Not(qa))), train_project, types) == ax
    assert vcgen.query_axioms(L.Cmp("<", x, L.IntLit(3)), train_project, types) == L.TRUE


def test_query_without_contract_fails_drivers():
    weak = load("train_weak.sreq", "train_requirements.sreq")
    out = vcgen.verify_requirement_class("TRAIN_REQUIREMENTS", weak)
    assert [o.verdict for o in out] == [Verdict.FAILED, Verdict.FAILED]


def test_empty_requirement_class():
    p = parse_sources({"e.sreq": "deferred class EMPTY\nfeature\nend\n"})
    assert vcgen.verify_requirement_class("EMPTY", p) == []


def test_increment_1_contract():
    p = load(*EXTENDED, "clock_increment1_contract.sreq")
    got = verdicts(vcgen.verify_requirement_class("EXTENDED_CLOCK_REQUIREMENTS", p))
    assert got["req_9"] == Verdict.PROVED
    assert got["req_10"] == Verdict.FAILED and got["req_11"] == Verdict.FAILED
    impl = vcgen.verify_class("CLOCK", p)
    failed = [o for o in impl if o.verdict == Verdict.FAILED]
    assert failed
    cex = {L.render_symbol(s): v for s, v in failed[0].counterexample.items()}
    assert (cex["old second"], cex["old minute"], cex["old hour"]) == (59, 59, 23)


def test_wp_examples():
    assert L.render(vcgen.wp((M.Assign("x", L.IntLit(0)),), L.Cmp("=", x, L.IntLit(0)))) == "0 = 0"
    body = (M.If(((L.Cmp("<", x, L.IntLit(5)), (M.Assign("x", L.Sum(x, L.IntLit(1))),)),),
                 (M.Assign("x", L.IntLit(0)),)),)
    post = L.Cmp("<=", x, L.IntLit(5))
    w = vcgen.wp(body, post)
    # path enumeration over x in [-2, 8]
    for v in range(-2, 9):
        after = v + 1 if v < 5 else 0
        assert L.evaluate(w, {x: v}) == (after <= 5)


def test_wp_check_statement():
    body = (M.Check((M.Clause(L.Cmp(">=", x, L.IntLit(0))),)), M.Assign("x", L.Sum(x, L.IntLit(1))))
    w = vcgen.wp(body, L.Cmp(">", x, L.IntLit(0)))
    assert [L.evaluate(w, {x: v}) for v in (-1, 0, 3)] == [False, True, True]


def test_wp_keeps_old_symbols():
    old_x = L.StateVar(L.CURRENT, "x", L.OLD)
    w = vcgen.wp((M.Assign("x", L.IntLit(7)),), L.Cmp("=", x, L.Sum(old_x, L.IntLit(1))))
    assert L.render(w) == "7 = old x + 1"


def test_wp_rejects_calls():
    with pytest.raises(vcgen.UnsupportedConstruct):
        vcgen.wp((M.Call("Current", "tick", ()),), L.TRUE)


def test_reference_body_proves(inferred_project):
    out = vcgen.verify_class("CLOCK", inferred_project)
    assert len(out) == 8
    assert all(o.verdict == Verdict.PROVED for o in out)
    assert out[0].name == "tick: clause 1"


def test_blank_clock_is_vacuously_proved():
    out = vcgen.verify_class("CLOCK", load("clock_blank.sreq"))
    assert [o.verdict for o in out] == [Verdict.PROVED]
    assert "empty postcondition" in out[0].notes


def test_hidden_body_skipped(clock_project):
    out = vcgen.verify_class("CLOCK", clock_project)
    assert [o.verdict for o in out] == [Verdict.SKIPPED]


def test_call_in_command_body_unsupported(inferred_project):
    tick = inferred_project.classes["CLOCK"].command("tick")
    p = replace_routine(inferred_project, "CLOCK", "tick", body=(M.Call("Current", "tick", ()),) + tick.body)
    out = vcgen.verify_class("CLOCK", p)
    assert {o.verdict for o in out} == {Verdict.UNSUPPORTED}


def test_modularity_driver_verdicts_ignore_bodies(inferred_project):
    before = vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", inferred_project)
    bodies = [(M.Assign("second", L.IntLit(0)),), (), None]
    for body in bodies:
        p = replace_routine(inferred_project, "CLOCK", "tick", body=body)
        assert vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", p) == before


def test_strengthening_postcondition_is_monotone(clock_project, inferred_project):
    base = verdicts(vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", clock_project))
    tick = clock_project.classes["CLOCK"].command("tick")
    extra = inferred_project.classes["CLOCK"].command("tick").postcondition
    for clause in extra:
        p = replace_routine(clock_project, "CLOCK", "tick", postcondition=tick.postcondition + (clause,))
        after = verdicts(vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", p))
        for name, v in base.items():
            if v == Verdict.PROVED:
                assert after[name] == Verdict.PROVED


COUNTERS = """
class COUNTER
feature
  n, m: INTEGER
  bump
    do
    ensure
      n = old n + 1
    end
end
deferred class FRAMES
feature
  other_unchanged (c: COUNTER; d: COUNTER)
      -- leaves the other counter alone.
    require
      modify (c)
    do
      c.bump
    ensure
      d.n = old d.n
      d.m = old d.m
    end
  sloppy (c: COUNTER; d: COUNTER)
      -- bumps the counter it was not allowed to touch.
    require
      modify (c)
    do
      d.bump
    ensure
      c.n = old c.n
    end
  unconstrained (c: COUNTER)
      -- second attribute is havocked by the call.
    require
      modify (c)
    do
      c.bump
    ensure
      c.m = old c.m
    end
end
"""


def test_frame_soundness():
    p = parse_sources({"frames.sreq": COUNTERS})
    got = verdicts(vcgen.verify_requirement_class("FRAMES", p))
    assert got["other_unchanged"] == Verdict.PROVED
    # calling into an object outside the modify set violates the frame
    assert got["sloppy"] == Verdict.FAILED
    assert got["unconstrained"] == Verdict.FAILED


def test_failed_counterexamples_falsify_obligations():
    for names, rc in [((*BASE, "clock_existing.sreq"), "CLOCK_REQUIREMENTS"),
                      ((*EXTENDED, "clock_increment1_contract.sreq"), "EXTENDED_CLOCK_REQUIREMENTS"),
                      (("train_weak.sreq", "train_requirements.sreq"), "TRAIN_REQUIREMENTS")]:
        p = load(*names)
        for d, o in zip(p.flatten(rc), vcgen.verify_requirement_class(rc, p)):
            if o.verdict == Verdict.FAILED:
                ob = vcgen.driver_obligation(d, p)
                assert L.evaluate(ob.formula, o.counterexample) is False


def test_parallel_batch_matches_serial(extended_project):
    serial = vcgen.verify_requirement_class("EXTENDED_CLOCK_REQUIREMENTS", extended_project, jobs=1)
    parallel = vcgen.verify_requirement_class("EXTENDED_CLOCK_REQUIREMENTS", extended_project, jobs=3)
    assert serial == parallel


def test_unsatisfiable_precondition_noted():
    text = COUNTERS.replace("    require\n      modify (c)\n    do\n      c.bump\n    ensure\n      c.m",
                            "    require\n      modify (c)\n      c.n < 0\n      c.n > 0\n"
                            "    do\n      c.bump\n    ensure\n      c.m")
    p = parse_sources({"frames.sreq": text})
    out = {o.name: o for o in vcgen.verify_requirement_class("FRAMES", p)}
    assert out["unconstrained"].verdict == Verdict.PROVED
    assert any("precondition" in n for n in out["unconstrained"].notes)


@pytest.mark.parametrize("lo,hi", list(itertools.combinations([0, 30, 59], 2)))
def test_run_body_agrees_with_contract(inferred_project, lo, hi):
    cls = inferred_project.classes["CLOCK"]
    tick = cls.command("tick")
    for s, m, h in itertools.product((lo, hi), (lo, hi), (0, 22, 23)):
        after = vcgen.run_body(cls, tick, {"second": s, "minute": m, "hour": h})
        total = (h * 3600 + m * 60 + s + 1) % 86400
        if s <= 59 and m <= 59:
            assert (after["hour"], after["minute"], after["second"]) == (total // 3600, total // 60 % 60, total % 60)

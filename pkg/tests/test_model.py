import pytest

from seamreq import corpus_path
from seamreq import logic as L
from seamreq import model as M
from seamreq.resolve import load_project, parse_sources

from conftest import EXTENDED, load

COUNTER = """
class COUNTER
feature
  n: INTEGER
  bump
    do
      n := n + 1
    ensure
      n = old n + 1
    end
  reset
    do
      n := 0
    ensure
      n = 0
    end
end
"""


def reqs(body: str, name="R", parent="") -> str:
    inherit = f"inherit {parent}\n" if parent else ""
    return f"deferred class {name}\n{inherit}feature\n{body}\nend\n"


BUMP = """
  bumps (c: COUNTER; k: INTEGER)
      -- bumps the counter.
    require
      modify (c)
      c.n = k
    do
      c.bump
    ensure
      c.n = k + 1
    end
"""


def project(*texts):
    return parse_sources({f"unit{i}.sreq": t for i, t in enumerate(texts)})


def codes(exc):
    return [d.code for d in exc.value.diagnostics]


def test_clock_project_shape(clock_project):
    assert list(clock_project.classes) == ["CLOCK"]
    assert [d.name for d in clock_project.drivers()] == [f"req_{i}" for i in range(1, 9)]
    clock = clock_project.classes["CLOCK"]
    assert clock.frozen
    assert [a.name for a in clock.attributes] == ["second", "minute", "hour"]


def test_empty_project():
    p = parse_sources({})
    assert p.classes == {} and p.requirement_classes == {}
    assert p.drivers() == []


def test_unknown_day_reported_at_feature_token():
    with pytest.raises(M.ResolveError) as exc:
        load(*EXTENDED, "clock_existing.sreq")
    first = exc.value.diagnostics[0]
    assert first.code == "UnknownName"
    assert first.loc.file.endswith("extended_clock_requirements.sreq")
    assert (first.loc.line, first.loc.column) == (16, 13)
    assert "day" in first.message


def test_duplicate_name():
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, COUNTER)
    assert "DuplicateName" in codes(exc)


def test_type_mismatch():
    bad = BUMP.replace("c.n = k\n", "c.n = k\n      k\n")
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(bad))
    assert "TypeMismatch" in codes(exc)


def test_non_self_contained_driver():
    bad = BUMP.replace("c.n = k + 1", "c.n = k + 1\n      bumps")
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(bad))
    assert "NonSelfContainedDriver" in codes(exc)


def test_old_not_allowed_in_precondition():
    bad = BUMP.replace("c.n = k\n", "old c.n = k\n")
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(bad))
    assert "IllegalOld" in codes(exc)


def test_modify_only_in_driver_preconditions():
    bad = BUMP.replace("c.n = k + 1", "modify (c)")
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(bad))
    assert "IllegalModify" in codes(exc)


def test_modify_set_lifted():
    p = project(COUNTER, reqs(BUMP))
    d = p.drivers()[0]
    assert set(d.modify_set) == {"c"}
    assert len(d.precondition) == 1


def test_flatten_extended(extended_project):
    names = [d.name for d in extended_project.flatten("EXTENDED_CLOCK_REQUIREMENTS")]
    assert names == [f"req_{i}" for i in range(1, 12)]


def test_flatten_without_parent(clock_project):
    rc = clock_project.requirement_classes["CLOCK_REQUIREMENTS"]
    assert clock_project.flatten("CLOCK_REQUIREMENTS") == list(rc.drivers)


def test_inheritance_cycle():
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(BUMP, "A", "B"), reqs("", "B", "A"))
    assert "InheritanceCycle" in codes(exc)


def test_duplicate_driver_across_chain():
    with pytest.raises(M.ResolveError) as exc:
        project(COUNTER, reqs(BUMP, "A"), reqs(BUMP, "B", "A"))
    assert "DuplicateDriverName" in codes(exc)


def test_flatten_idempotent(extended_project):
    flat = extended_project.flatten("EXTENDED_CLOCK_REQUIREMENTS")
    wrapper = M.RequirementClass("FLAT", None, "", "", tuple(flat))
    p = M.Project(extended_project.classes, {**extended_project.requirement_classes, "FLAT": wrapper})
    assert p.flatten("FLAT") == flat


def test_classify_req_1_and_req_7(clock_project):
    drivers = {d.name: d for d in clock_project.drivers()}
    p1 = M.classify_driver(drivers["req_1"], clock_project)
    assert p1.matches and p1.object_arg == "clock" and p1.command == "tick"
    assert tuple(p1.auxiliary) == ("current_second",)
    p7 = M.classify_driver(drivers["req_7"], clock_project)
    assert p7.matches and p7.auxiliary == ()


def test_classify_two_calls():
    twice = BUMP.replace("c.bump\n", "c.bump\n      c.bump\n").replace("k + 1", "k + 2")
    p = project(COUNTER, reqs(twice))
    pattern = M.classify_driver(p.drivers()[0], p)
    assert not pattern.matches
    assert "multiple feature calls" in pattern.reasons


def test_classify_train_drivers(train_project):
    for d in train_project.drivers():
        pattern = M.classify_driver(d, train_project)
        assert not pattern.matches
        assert "no feature call" in pattern.reasons


def test_notes_stored_and_ignored(clock_project):
    rc = clock_project.requirement_classes["CLOCK_REQUIREMENTS"]
    assert any("explicit" in n for n in rc.notes)


def test_driver_symbols_reachable_from_arguments(extended_project):
    for d in extended_project.drivers():
        names = {p.name for p in d.args}
        formulas = [c.formula for c in (*d.precondition, *d.postcondition)]
        for f in formulas:
            for s in L.symbols(f):
                owner = s.name if isinstance(s, L.AuxVar) else s.obj
                assert owner in names


def test_resolve_deterministic():
    paths = [corpus_path(n) for n in (*EXTENDED, "clock_increment3.sreq")]
    assert load_project(paths) == load_project(paths)
    with pytest.raises(M.ResolveError) as a:
        load_project([corpus_path(n) for n in (*EXTENDED, "clock_existing.sreq")])
    with pytest.raises(M.ResolveError) as b:
        load_project([corpus_path(n) for n in (*EXTENDED, "clock_existing.sreq")])
    assert a.value.diagnostics == b.value.diagnostics

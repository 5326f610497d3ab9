"""
From requirements to a contract and a body
==========================================

Each clock driver makes exactly one call to ``tick``, so a postcondition can
be read off the drivers mechanically.  A body is then checked clause by
clause against it.
"""

import dataclasses

from seamreq import corpus_path, inference, vcgen
from seamreq.resolve import load_project
from seamreq.report import outcome_table

reqs = corpus_path("clock_requirements.sreq")
blank = load_project([reqs, corpus_path("clock_blank.sreq")])

result = inference.infer_contract("CLOCK_REQUIREMENTS", "tick", blank)
for a in result.assertions:
    print(f"{a.driver:>6}: {a.text}")

# Install the inferred postcondition; every driver now proves.
contracted = inference.with_postcondition(blank, "CLOCK", "tick", result.assertions)
print(outcome_table(vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", contracted)))

# A matching implementation lives in clock_increment0.sreq.
project = load_project([reqs, corpus_path("clock_increment0.sreq")])
clock = project.classes["CLOCK"]
print(outcome_table(vcgen.verify_class(clock, project)))

# Break it: forget to roll the hour over.  Only the hour clauses notice.
from seamreq import logic as L
from seamreq import model as M


def without_hour(stmts):
    out = []
    for s in stmts:
        if isinstance(s, M.If):
            if any(getattr(v, "attr", None) == "hour" for v in L.symbols(s.branches[0][0])):
                continue
            s = M.If(tuple((c, without_hour(b)) for c, b in s.branches),
                     without_hour(s.else_body or ()), s.loc)
        out.append(s)
    return tuple(out)


tick = clock.command("tick")
broken = dataclasses.replace(clock, commands=(dataclasses.replace(tick, body=without_hour(tick.body)),))
print(outcome_table(vcgen.verify_class(broken, project)))

"""
Adding a day counter, one requirement at a time
===============================================

The extended requirements inherit the first eight and add three about the
day of week (0 is Monday, 6 is Sunday).  Each step below is one source
file; the verdicts show where the work still is.
"""

from seamreq import corpus_path, vcgen
from seamreq.model import ResolveError
from seamreq.resolve import load_project

REQS = [corpus_path("clock_requirements.sreq"), corpus_path("extended_clock_requirements.sreq")]

# Before the clock has a day attribute the requirements do not even resolve.
try:
    load_project(REQS + [corpus_path("clock_existing.sreq")])
except ResolveError as exc:
    print(exc.diagnostics[0])

steps = [
    ("day declared, no contract", "clock_day_declared.sreq"),
    ("assertion for req_9", "clock_increment1_contract.sreq"),
    ("body updates the day", "clock_increment1.sreq"),
    ("assertion for req_10 and else branch", "clock_increment2.sreq"),
    ("assertion for req_11", "clock_increment3.sreq"),
]

for title, source in steps:
    project = load_project(REQS + [corpus_path(source)])
    drivers = vcgen.verify_requirement_class("EXTENDED_CLOCK_REQUIREMENTS", project)
    impl = vcgen.verify_class("CLOCK", project)
    new = " ".join(f"{o.name}={o.verdict.value}" for o in drivers[8:])
    body = "PROVED" if all(o.proved for o in impl) else "FAILED"
    print(f"{title:<40} {new}  implementation={body}")

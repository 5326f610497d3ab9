"""
Tracing and documenting
=======================

Drivers reference features through their contracts and bodies; that is
enough to navigate both ways.  The comments double as the customer-facing
requirements document.
"""

from seamreq import corpus_path, docgen, trace, vcgen
from seamreq.resolve import load_project

project = load_project([
    corpus_path("clock_requirements.sreq"),
    corpus_path("extended_clock_requirements.sreq"),
    corpus_path("clock_increment1_contract.sreq"),
])
matrix = trace.build_matrix(project)

print("req_9 touches:", ", ".join(sorted(matrix.down["EXTENDED_CLOCK_REQUIREMENTS.req_9"])))
print("CLOCK.tick is constrained by", len(matrix.up["CLOCK.tick"]), "drivers")

# Which requirements are affected if CLOCK.day changes, and where do they stand?
outcomes = vcgen.verify_requirement_class("EXTENDED_CLOCK_REQUIREMENTS", project)
verdicts = {o.owner: o.verdict.value for o in outcomes}
for ref, verdict in trace.impact(project, "CLOCK.day", verdicts).items():
    print(f"  {ref}: {verdict}")

print()
print(docgen.generate("EXTENDED_CLOCK_REQUIREMENTS", project, verdicts=verdicts))

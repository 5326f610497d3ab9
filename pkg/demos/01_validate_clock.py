"""
Validating a closed clock against its requirements
==================================================

The clock ships with a contract for ``tick`` but no visible body.  The eight
requirements are specification drivers; each one is checked using the
contract alone.
"""

from seamreq import corpus_path, vcgen
from seamreq.resolve import load_project
from seamreq.report import outcome_table

project = load_project([corpus_path("clock_requirements.sreq"), corpus_path("clock_existing.sreq")])
print(f"{len(project.drivers())} drivers, classes: {', '.join(project.classes)}")

# Verify every driver; the last one fails because the contract never says
# what happens to the hour while the seconds are still counting.
outcomes = vcgen.verify_requirement_class("CLOCK_REQUIREMENTS", project)
print(outcome_table(outcomes))

# The counterexample is an ordinary model; plug it back into the obligation.
from seamreq import logic as L
from seamreq import trace

req_8 = trace.find_driver(project, "req_8")
ob = vcgen.driver_obligation(req_8, project)
print("hypothesis:", L.render(ob.hypothesis))
print("goal:      ", L.render(ob.goal))
print("holds under the counterexample?", L.evaluate(ob.formula, outcomes[-1].counterexample))

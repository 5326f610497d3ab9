"""
Requirements as goals
=====================

A train must stay below the speed limit of the segment it is on.  The
requirement is written twice: as an empty-bodied driver with a contract, and
as a contract-free driver that checks the property inline.  Both depend on
the postcondition of the query ``on``.
"""

from seamreq import corpus_path, vcgen
from seamreq.resolve import load_project

for source in ("train.sreq", "train_weak.sreq"):
    project = load_project([corpus_path(source), corpus_path("train_requirements.sreq")])
    print(source)
    for o in vcgen.verify_requirement_class("TRAIN_REQUIREMENTS", project):
        print(f"  {o.verdict.value:<7} {o.name}")
        if o.explanation:
            print(o.explanation)

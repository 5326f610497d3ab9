import warnings

import pytest

from seamreq import docgen
from seamreq.resolve import parse_sources

from test_trace import COMMENT_EDITED

NATURAL = [
    "Increments current second if it is smaller than 59.",
    "Resets current second to 0 if it equals 59.",
    "Increments current minute if the time is HH:MM:59 for MM smaller than 59.",
    "Resets current minute to 0 if it equals 59 and current second equals 59.",
    "Keeps current minute if current second is smaller than 59.",
    "Increments current hour if the time is HH:59:59 for HH smaller than 23.",
    "Resets current hour to 0 if the time is 23:59:59.",
    "Keeps current hour if current second is smaller than 59.",
]


def test_clock_requirements_document(clock_project):
    doc = docgen.build("CLOCK_REQUIREMENTS", clock_project)
    assert doc.header == "A clock tick:"
    assert [it.label for it in doc.items] == [f"REQ{i}" for i in range(1, 9)]
    assert [" ".join(it.text.split()) for it in doc.items] == NATURAL


def test_text_rendering(clock_project):
    text = docgen.generate("CLOCK_REQUIREMENTS", clock_project)
    lines = text.splitlines()
    assert lines[:4] == ["CLOCK_REQUIREMENTS", "=" * 18, "", "A clock tick:"]
    assert lines[4] == "  (REQ1) " + NATURAL[0]
    assert len(lines) == 12 and text.endswith("\n")


def test_extended_document_inherited_first(extended_project):
    doc = docgen.build("EXTENDED_CLOCK_REQUIREMENTS", extended_project)
    assert len(doc.items) == 11
    assert [it.driver for it in doc.items] == [f"req_{i}" for i in range(1, 12)]
    assert doc.header == "A clock tick:"


def test_verdict_badges(clock_project):
    text = docgen.generate("CLOCK_REQUIREMENTS", clock_project, verdicts={"req_8": "FAILED",
                                                                          "CLOCK_REQUIREMENTS.req_1": "PROVED"})
    assert "(REQ1) " + NATURAL[0] + " [PROVED]" in text
    assert "(REQ8) " + NATURAL[7] + " [FAILED]" in text
    assert "(REQ2) " + NATURAL[1] + "\n" in text


def test_markdown(clock_project):
    md = docgen.generate("CLOCK_REQUIREMENTS", clock_project, "markdown")
    assert md.startswith("# CLOCK_REQUIREMENTS\n\nA clock tick:\n\n")
    assert "1. **(REQ3)** `req_3`: " + NATURAL[2] in md


def test_unknown_format(clock_project):
    with pytest.raises(ValueError):
        docgen.generate("CLOCK_REQUIREMENTS", clock_project, "pdf")


def test_zero_drivers_header_only():
    p = parse_sources({"r.sreq": "deferred class R\nfeature\n  -- Nothing yet:\nend\n"})
    doc = docgen.build("R", p)
    assert doc.items == ()
    assert docgen.render(doc).splitlines()[-1] == doc.header or docgen.render(doc).count("(REQ") == 0


def test_missing_comment_placeholder():
    src = COMMENT_EDITED.replace("      -- bumps the counter.\n", "")
    p = parse_sources({"c.sreq": src})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        doc = docgen.build("R", p)
    assert doc.items[0].text == docgen.PLACEHOLDER
    assert caught


def test_comment_words_preserved(extended_project):
    doc = docgen.build("EXTENDED_CLOCK_REQUIREMENTS", extended_project)
    for d, item in zip(extended_project.flatten("EXTENDED_CLOCK_REQUIREMENTS"), doc.items):
        words = d.comment.split()
        got = item.text.split()
        assert got[1:-1] == words[1:-1]
        assert got[0].lower() == words[0].lower()


def test_pure(clock_project):
    a = docgen.generate("CLOCK_REQUIREMENTS", clock_project, "text", {"req_2": "PROVED"})
    b = docgen.generate("CLOCK_REQUIREMENTS", clock_project, "text", {"req_2": "PROVED"})
    assert a == b

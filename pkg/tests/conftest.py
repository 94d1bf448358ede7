import re

import pytest

from coref_semscore.ingest import document_from_record
from coref_semscore.inventory import CategoryInventory

# News-wire fixture: one person entity referenced by name and pronoun, one
# place entity referenced twice.  The two "Mr. <name>" mentions are exactly
# covered by PER tagger spans; the pronouns overlap nothing.
NEWS_TOKENS = (
    "While all this is going on , Mr. Clinton is overseas . "
    "President Clinton was in Northern Ireland when he heard the Supreme Court decision . "
    "He talked to Al Gore on the phone from Belfast . "
    "This is Mr. Clinton 's third visit to Northern Ireland"
).split()

NEWS_RECORD = {
    "doc_id": "news0",
    "tokens": NEWS_TOKENS,
    "sentence_boundaries": [0, 12, 26, 37],
    "gold_clusters": [
        [[7, 9], [12, 14], [19, 20], [26, 27], [39, 41]],
        [[16, 18], [45, 47]],
    ],
    "cner": [
        [7, 9, "PER"],
        [12, 14, "PER"],
        [16, 18, "LOC"],
        [22, 24, "ORG"],
        [24, 25, "EVENT"],
        [29, 31, "PER"],
        [33, 34, "ARTIFACT"],
        [35, 36, "LOC"],
        [39, 41, "PER"],
        [42, 43, "MEASURE"],
        [43, 44, "EVENT"],
        [45, 47, "LOC"],
    ],
}

# Coordination fixture: two singleton person entities plus a composite
# plural entity whose second mention is the bare plural "both".  The
# tagger spans cover the individual names and the whole coordination.
COMPOSITE_TOKENS = (
    "Tomorrow 's summit meeting will bring Ehud Barak and Yasser Arafat "
    "to the resort city of Sharm El - Sheikh . "
    "Getting both to attend was not an easy task ."
).split()

COMPOSITE_RECORD = {
    "doc_id": "summit0",
    "tokens": COMPOSITE_TOKENS,
    "sentence_boundaries": [0, 21],
    "gold_clusters": [
        [[6, 8]],
        [[9, 11]],
        [[6, 11], [22, 23]],
    ],
    "cner": [
        [0, 1, "DATETIME"],
        [2, 3, "EVENT"],
        [3, 4, "EVENT"],
        [6, 8, "PER"],
        [6, 11, "PER"],
        [9, 11, "PER"],
        [13, 15, "STRUCT"],
        [16, 20, "LOC"],
    ],
}


@pytest.fixture
def inventory():
    return CategoryInventory.default()


@pytest.fixture
def news_doc(inventory):
    return document_from_record(NEWS_RECORD, inventory)


@pytest.fixture
def composite_doc(inventory):
    return document_from_record(COMPOSITE_RECORD, inventory)


# ---------------------------------------------------------------------------
# Acceptance summary: one pass/fail line per criterion.

_ACCEPTANCE_RE = re.compile(r"test_acceptance\.py::test_a(\d+)_([a-z0-9_]+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _ACCEPTANCE_RE.search(getattr(report, "nodeid", ""))
            if not match:
                continue
            key = (int(match.group(1)), match.group(2).replace("_", " "))
            if status == "passed":
                outcomes.setdefault(key, "PASS")
            else:
                outcomes[key] = "FAIL"
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for (number, title), result in sorted(outcomes.items()):
        terminalreporter.write_line(f"A{number} {title}: {result}")

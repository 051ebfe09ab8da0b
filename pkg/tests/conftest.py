import functools
import json
import os

import pytest

# property test name -> number of examples that ran to completion
HYPOTHESIS_COUNTS: dict[str, int] = {}
HYPOTHESIS_FAILED: set[str] = set()
# acceptance criterion -> (passed, detail)
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def _counting(name, inner):
    @functools.wraps(inner)
    def wrapper(*args, **kwargs):
        result = inner(*args, **kwargs)
        HYPOTHESIS_COUNTS[name] = HYPOTHESIS_COUNTS.get(name, 0) + 1
        return result
    return wrapper


def pytest_collection_modifyitems(session, config, items):
    seen = set()
    for item in items:
        fn = getattr(item, "obj", None)
        handle = getattr(fn, "hypothesis", None)
        if handle is not None and id(fn) not in seen:
            seen.add(id(fn))
            handle.inner_test = _counting(item.originalname or item.name, handle.inner_test)
    # acceptance runs last so it can read the property counts
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


def pytest_runtest_logreport(report):
    if report.when == "call" and report.failed:
        HYPOTHESIS_FAILED.add(report.nodeid.split("::")[-1].split("[")[0])


def pytest_sessionfinish(session, exitstatus):
    path = os.environ.get("PAINLEVE_VE_COUNTS")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"counts": HYPOTHESIS_COUNTS, "failed": sorted(HYPOTHESIS_FAILED)}, fh)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n[2:].split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


@pytest.fixture
def record_criterion():
    def record(name, ok, detail=""):
        ACCEPTANCE[name] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        return ok
    return record

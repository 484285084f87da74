import pytest

from adaptest.bank import BankFile, ItemRecord
from adaptest.irt import ItemParameters
from adaptest.reference import reference_bank

_acceptance_outcomes: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def ref_bank() -> BankFile:
    return reference_bank()


def make_item(
    item_id: str,
    a: float = 1.0,
    b: float = 0.0,
    c: float = 0.0,
    level: int = 3,
    active: bool = True,
    scale: float = 1.7,
) -> ItemRecord:
    """A minimal valid item for in-memory banks used by tests."""
    return ItemRecord(
        id=item_id,
        stem=f"Stem for {item_id}",
        options=("Option A", "Option B", "Option C", "Option D"),
        correct_options=frozenset({0}),
        difficulty_level=level,
        topic="testing",
        params=ItemParameters(a=a, b=b, c=c, scale=scale),
        c_overridden=True,
        active=active,
    )


def make_bank(specs) -> BankFile:
    """Bank from (id, a, b, c, level) tuples."""
    return BankFile(items=[make_item(*spec) for spec in specs])


@pytest.fixture
def five_level_bank() -> BankFile:
    """Smallest bank that can run a session: one item per level."""
    levels_b = {1: -3.0, 2: -1.5, 3: 0.0, 4: 1.5, 5: 3.0}
    return make_bank(
        [(f"lvl{level}", 1.0, b, 0.2, level) for level, b in levels_b.items()]
    )


# One line per acceptance criterion is printed after the run; see
# tests/test_acceptance.py for the criteria themselves.


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or item.fspath.basename != "test_acceptance.py":
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _acceptance_outcomes.append((doc, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _acceptance_outcomes:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}")

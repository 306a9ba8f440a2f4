import pytest

from discparse.corpus import default_lexicon
from discparse.pipeline import train_all
from discparse.synthetic import generate_corpus, split_corpus


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def synthetic_split():
    return split_corpus(generate_corpus())


@pytest.fixture(scope="session")
def trained(synthetic_split, lexicon):
    train, _ = synthetic_split
    return train_all(train, lexicon=lexicon)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion; ``None`` marks a skipped check."""

    def record(name: str, passed: bool | None, detail: str = "") -> bool | None:
        request.config.stash[_ACCEPTANCE].append((name, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in rows:
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}" + (f"  ({detail})" if detail else ""))

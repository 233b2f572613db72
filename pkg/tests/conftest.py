import pytest

from parodist.phonetics import default_dictionary, default_frequencies

_ACCEPTANCE_RESULTS = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE_RESULTS.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {status}  {name}")
from parodist.rhyme import build_rhyme_dictionary, default_similarity_table
from parodist.lm.ngram import train_ngram
from parodist.runtime import bundled_corpus_text


@pytest.fixture(scope="session")
def dictionary():
    return default_dictionary()


@pytest.fixture(scope="session")
def frequencies():
    return default_frequencies()


@pytest.fixture(scope="session")
def table():
    return default_similarity_table()


@pytest.fixture(scope="session")
def rdict(dictionary, frequencies, table):
    return build_rhyme_dictionary(dictionary, frequencies, table=table)


@pytest.fixture(scope="session")
def corpus_text():
    return bundled_corpus_text()


@pytest.fixture(scope="session")
def model(corpus_text):
    return train_ngram(corpus_text, order=2, smoothing_k=0.01)


WEIRD_SCIENCE_SCHEME = (
    "line: (7, 1)\n"
    "line: (7, 1)\n"
    'line: (4, None) (4, "ooh, weird science")\n'
)

WEIRD_SCIENCE_PROMPT = "I've created a monster."


@pytest.fixture(scope="session")
def weird_science_scheme_text():
    return WEIRD_SCIENCE_SCHEME

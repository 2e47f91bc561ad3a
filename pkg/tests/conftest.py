import json

import pytest

from narrative_net.taxonomy import CharacterNetwork, parse_record

# the worked example shipped inside the annotation prompt
DON_QUIXOTE = [
    ("Sancho Panza", "Don Quixote", "neutral", "professional", "employer"),
    ("Rocinante", "Don Quixote", "positive", "professional", "friend"),
    ("Dulcinea del Toboso", "Don Quixote", "neutral", "social", "unrequited love interest"),
    ("Cervantes", "Cide Hamete Benengeli", "positive", "professional", "colleague"),
    ("The Duke and Duchess", "Don Quixote", "neutral", "social", "enemy"),
    ("The Duke and Duchess", "Sancho Panza", "neutral", "social", "enemy"),
    ("Don Quixote", "Altisidora", "negative", "social", "lovers"),
    ("Altisidora", "The Duke and Duchess", "neutral", "professional", "employee"),
    ("The priest", "Don Quixote", "positive", "social", "friend"),
    ("Sampson Carrasco", "Don Quixote", "negative", "social", "enemy"),
    ("Sancho Panza", "Dapple", "neutral", "social", "friend"),
    ("The barber", "Don Quixote", "positive", "social", "friend"),
]

FIELDS = ("character_1", "character_2", "affinity", "coarse_category", "fine_category")


def raw(c1, c2, affinity="positive", coarse="social", fine="friend"):
    return dict(zip(FIELDS, (c1, c2, affinity, coarse, fine)))


def rec(*args, **kwargs):
    return parse_record(raw(*args, **kwargs))


def net(volume_id, *records):
    return CharacterNetwork(volume_id, tuple(records))


@pytest.fixture
def don_quixote_raw():
    return [dict(zip(FIELDS, row)) for row in DON_QUIXOTE]


@pytest.fixture
def don_quixote(don_quixote_raw):
    return CharacterNetwork("don-quixote", tuple(parse_record(r) for r in don_quixote_raw))


# one PASS/FAIL line per acceptance criterion in the terminal summary

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = "PASS" if report.passed else "FAIL"
    elif "test_acceptance.py" in report.nodeid and report.failed:
        _acceptance[report.nodeid.split("::")[-1]] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance.items():
        terminalreporter.write_line(f"{status}  {name}")


def planted_validation(agree_affinity=81, agree_fine=74, agree_coarse=55, n=100):
    """Gold/pred networks over the same n pairs with planted per-attribute agreement counts."""
    gold, pred = [], []
    for i in range(n):
        a, b = f"Person {i}", f"Other {i}"
        gold.append(rec(a, b, "positive", "social", "friend"))
        pred.append(rec(b.upper(), a.lower(),
                        "positive" if i < agree_affinity else "negative",
                        "social" if i < agree_coarse else "professional",
                        "friend" if i < agree_fine else "enemy"))
    return net("v", *gold), net("v", *pred)


def write_pipeline_fixture(root):
    """Five volumes scripted for the mock backend: two clean, one content-filtered,
    one truncated mid-array, one with a malformed and a coarse-inconsistent record."""
    corpus = root / "corpus"
    corpus.mkdir()
    for i in range(1, 6):
        (corpus / f"vol{i}.txt").write_text(f"Volume {i} text about some people.\n", encoding="utf-8")
    truncated = (
        '[{"character_1": "Ann", "character_2": "Bob", "affinity": "positive", '
        '"coarse_category": "familial", "fine_category": "sister"}, '
        '{"character_1": "Ann", "character_2": "Cy", "affin'
    )
    scripts = {
        "vol1": {"response": [raw("Emma", "Mr Knightley", fine="husband", coarse="familial"),
                              raw("Emma", "Harriet"),
                              raw("Harriet", "Mr Knightley", affinity="neutral")]},
        "vol2": {"text": "", "finish_reason": "content-filter"},
        "vol3": {"text": truncated, "finish_reason": "output-limit"},
        "vol4": {"response": [raw("Pip", "Joe", fine="in-law relation", coarse="social"),
                              {"character_1": "Pip", "character_2": "Estella", "affinity": "smitten",
                               "coarse_category": "social", "fine_category": "lovers"},
                              raw("Pip", "Estella", fine="unrequited love interest")]},
        "vol5": {"response": [raw("Jane", "Rochester", fine="lovers"),
                              raw("Jane", "St John", fine="cousin", coarse="familial"),
                              raw("St John", "Jane", fine="cousin", coarse="familial")]},
    }
    fixtures = root / "mock.json"
    fixtures.write_text(json.dumps(scripts), encoding="utf-8")
    meta = root / "meta.csv"
    meta.write_text("volume_id,title,author,year,is_fiction\n"
                    "vol1,Emma,Austen,1815,true\n"
                    "vol3,Siblings,Anon,1850,false\n"
                    "vol4,Great Expectations,Dickens,1861,true\n"
                    "vol5,Jane Eyre,Bronte,1847,false\n", encoding="utf-8")
    return corpus, fixtures, meta

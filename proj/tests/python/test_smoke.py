"""End-to-end smoke tests for the python package."""

import math

import pytest

import mnemo

CAREER_LINES = [
    ("s1", "[2024-03-01 10:00:00] James: I work as a Software Engineer."),
    ("s2", "[2024-06-01 10:00:00] James: I work as a Senior Engineer now."),
    ("s3", "[2024-09-01 10:00:00] James: I work as a Tech Lead."),
]


def build_career_engine(config=None):
    eng = mnemo.Engine(config=config)
    for session, line in CAREER_LINES:
        ids = eng.ingest("james", session, [line])
        assert len(ids) == 1
        result = eng.process("james")
        assert not result["errors"]
    return eng


def test_metric_fixtures():
    assert mnemo.token_f1("a shell necklace", "shell necklace") == pytest.approx(0.8)
    assert mnemo.bleu1("shell necklace", "a shell necklace") == pytest.approx(
        math.exp(-0.5)
    )
    metrics = mnemo.rank_metrics(["x", "gold", "y", "z"], ["gold"], k=5)
    assert metrics["hit_at_k"] == pytest.approx(1.0)
    assert metrics["mrr"] == pytest.approx(0.5)
    assert metrics["ndcg"] == pytest.approx(0.6309297535714575)
    assert metrics["precision_at_k"] == pytest.approx(0.2)
    assert metrics["recall_at_k"] == pytest.approx(1.0)
    assert metrics["f1_at_k"] == pytest.approx(1.0 / 3.0)


def test_analyze_query():
    plain = mnemo.analyze_query("what is my job")
    assert plain["temporal_intent"] is False
    assert plain["include_historical"] is False

    yesterday = mnemo.analyze_query(
        "what did I do yesterday", now="2024-05-10T12:00:00Z"
    )
    assert yesterday["temporal_intent"] is True
    assert yesterday["reference_date"] == "2024-05-09"
    assert yesterday["window_days"] == pytest.approx(2.0)
    assert yesterday["temporal_class"] == "day_relative"

    story = mnemo.analyze_query("how has my job changed over time")
    assert story["include_historical"] is True


def test_engine_version_chain():
    eng = build_career_engine()
    assert eng.pending_count("james") == 0
    assert "james" in eng.owners()
    assert len(eng.memories("james")) == 3

    current = eng.search("james", "What is James's job?", k=5)
    assert current["analysis"]["include_historical"] is False
    assert len(current["hits"]) == 1
    assert current["hits"][0]["content"] == "James works as Tech Lead"

    story = eng.search("james", "How has James's job changed over time?", k=5)
    assert story["analysis"]["include_historical"] is True
    contents = [h["content"] for h in story["hits"]]
    assert contents == [
        "James works as Software Engineer",
        "James works as Senior Engineer now",
        "James works as Tech Lead",
    ]
    assert [h["version"] for h in story["hits"]] == [1, 2, 3]
    assert story["hits"][0]["replaces_id"] is None
    assert story["hits"][1]["replaces_id"] == story["hits"][0]["memory_id"]
    assert story["hits"][2]["replaces_id"] == story["hits"][1]["memory_id"]

    chain = eng.history("james", story["hits"][0]["memory_id"])
    assert [rec["version"] for rec in chain] == [1, 2, 3]
    assert chain[-1]["is_current"] is True
    assert chain[-1]["status"] == "active"
    assert {rec["status"] for rec in chain[:-1]} == {"historical"}


def test_historical_override_flag():
    eng = build_career_engine()
    forced = eng.search("james", "What is James's job?", k=5, historical=True)
    assert forced["analysis"]["include_historical"] is True
    assert len(forced["hits"]) == 3
    suppressed = eng.search(
        "james", "How has James's job changed over time?", k=5, historical=False
    )
    assert len(suppressed["hits"]) == 1


def test_persistence_roundtrip(tmp_path):
    data_dir = str(tmp_path / "store")
    eng = build_career_engine(config={"data_dir": data_dir})
    eng.snapshot()
    del eng

    reopened = mnemo.Engine(config={"data_dir": data_dir})
    assert len(reopened.memories("james")) == 3
    current = reopened.search("james", "What is James's job?", k=5)
    assert current["hits"][0]["content"] == "James works as Tech Lead"


def test_immediate_recall_and_errors():
    eng = mnemo.Engine()
    eng.ingest("ana", "s1", ["[2024-03-01 09:00:00] Ana: The otter wore a tiny hat."])
    recalled = eng.immediate_recall("ana", "otter tiny hat", k=3)
    assert recalled and "otter" in recalled[0]["text"]

    with pytest.raises(mnemo.NotFoundError):
        eng.history("ana", "mem-does-not-exist")

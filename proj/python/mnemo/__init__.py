"""Conversational memory engine: hybrid retrieval over extracted facts.

The heavy lifting happens in the C++ extension; this wrapper turns its
JSON-string returns into plain dicts and lists.
"""

import json as _json

from ._mnemo import Error, NotFoundError, bleu1, token_f1
from ._mnemo import Engine as _Engine
from ._mnemo import analyze_query_json as _analyze_query_json
from ._mnemo import rank_metrics_json as _rank_metrics_json

__all__ = [
    "Engine",
    "Error",
    "NotFoundError",
    "analyze_query",
    "bleu1",
    "rank_metrics",
    "token_f1",
]


class Engine:
    """In-process memory engine.

    config mirrors the service config file schema, e.g.
    ``Engine(config={"data_dir": "/tmp/store"})``. Omit it for an
    ephemeral store with the built-in deterministic embedder.
    """

    def __init__(self, config=None):
        self._impl = _Engine(_json.dumps(config) if config else "")

    def ingest(self, owner, session, lines):
        """Store transcript lines; returns the new message ids."""
        return self._impl.ingest(owner, session, list(lines))

    def process(self, owner, now=None):
        """Extract memories from pending messages; returns op counts."""
        return _json.loads(self._impl.process_json(owner, now or ""))

    def search(self, owner, query, k=5, historical=None, now=None, include_timings=False):
        """Ranked hybrid search; returns {hits, analysis, reranker_degraded}."""
        flag = -1 if historical is None else int(bool(historical))
        return _json.loads(
            self._impl.search_json(owner, query, k, flag, now or "", include_timings)
        )

    def history(self, owner, memory_id):
        """Version chain containing memory_id, oldest first."""
        return _json.loads(self._impl.history_json(owner, memory_id))

    def immediate_recall(self, owner, query, k=5):
        """Similarity search over raw (unextracted) messages."""
        return _json.loads(self._impl.immediate_recall_json(owner, query, k))

    def memories(self, owner):
        return _json.loads(self._impl.memories_json(owner))

    def messages(self, owner):
        return _json.loads(self._impl.messages_json(owner))

    def pending_count(self, owner):
        return self._impl.pending_count(owner)

    def owners(self):
        return self._impl.owners()

    def snapshot(self):
        self._impl.snapshot()


def analyze_query(query, now=None):
    """Temporal/history intent analysis for a query string."""
    return _json.loads(_analyze_query_json(query, now or ""))


def rank_metrics(retrieved, relevant, k=5):
    """Binary-relevance metrics for a ranked id list."""
    return _json.loads(_rank_metrics_json(list(retrieved), list(relevant), k))

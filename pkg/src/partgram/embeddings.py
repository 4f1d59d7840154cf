"""Precomputed text-embedding lookup (JSONL: one {"text", "vector"} per line).

The toolkit never runs a neural encoder; anything that needs text vectors
(semantic clustering features, embedding-cosine scoring) reads them from a
table keyed by the exact text string.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class MissingEmbeddingError(KeyError):
    def __init__(self, text: str):
        self.text = text
        super().__init__(f"no embedding for text {text!r}")


class EmbeddingTable:
    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ValueError("embedding table is empty")
        dims = {v.shape for v in vectors.values()}
        if len(dims) != 1 or next(iter(dims))[0] < 1:
            raise ValueError(f"embedding vectors must share one dimension >= 1, got {dims}")
        self._vectors = vectors
        self.dim = next(iter(dims))[0]

    @classmethod
    def from_pairs(cls, pairs) -> EmbeddingTable:
        return cls({text: np.asarray(vec, dtype=np.float64).reshape(-1) for text, vec in pairs})

    @classmethod
    def load_jsonl(cls, path: str | Path) -> EmbeddingTable:
        vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    vectors[rec["text"]] = np.asarray(rec["vector"], dtype=np.float64).reshape(-1)
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ValueError(f"{path}:{line_no}: bad embedding record ({exc})") from None
        return cls(vectors)

    def __contains__(self, text: str) -> bool:
        return text in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def lookup(self, text: str) -> np.ndarray:
        try:
            return self._vectors[text]
        except KeyError:
            raise MissingEmbeddingError(text) from None

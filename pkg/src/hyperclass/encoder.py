"""Desk-scale trainable text encoder: whitespace tokenizer, trainable
token-embedding table, mean pooling, and a tanh MLP layer.

The downstream loss only needs a differentiable text -> fixed-dim map;
this is the minimal trainable one.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

UNK = 0
PAD = 1


@dataclass
class Vocabulary:
    """Token -> dense index map with UNK (0) and PAD (1) reserved."""

    token_to_index: dict[str, int]

    @classmethod
    def build(cls, texts: list[str], min_freq: int = 2) -> "Vocabulary":
        counts: dict[str, int] = {}
        for text in texts:
            for token in _split(text):
                counts[token] = counts.get(token, 0) + 1
        mapping = {"<unk>": UNK, "<pad>": PAD}
        for token in sorted(counts):
            if counts[token] >= min_freq and token not in mapping:
                mapping[token] = len(mapping)
        return cls(mapping)

    def __len__(self) -> int:
        return len(self.token_to_index)

    def lookup(self, token: str) -> int:
        return self.token_to_index.get(token, UNK)


def _split(text: str) -> list[str]:
    out = []
    for raw in text.lower().split():
        token = raw.strip(string.punctuation)
        if token:
            out.append(token)
    return out


def tokenize(vocab: Vocabulary, text: str) -> list[int]:
    """Lowercase, split on whitespace, strip edge punctuation, map OOV to UNK.

    Empty input yields a single PAD token so every sample has at least one
    index to pool over.
    """
    tokens = [vocab.lookup(t) for t in _split(text)]
    return tokens if tokens else [PAD]


@dataclass
class EncoderModel:
    """Mean-pooled token embeddings followed by one tanh layer.

    embedding: (|V|, d_tok), w1: (d_tok, d_e), b1: (d_e,).
    """

    vocab: Vocabulary
    embedding: np.ndarray
    w1: np.ndarray
    b1: np.ndarray

    @classmethod
    def init(
        cls,
        vocab: Vocabulary,
        d_tok: int,
        d_e: int,
        rng: np.random.Generator,
        scale: float = 0.05,
    ) -> "EncoderModel":
        return cls(
            vocab=vocab,
            embedding=rng.uniform(-scale, scale, size=(len(vocab), d_tok)),
            w1=rng.uniform(-scale, scale, size=(d_tok, d_e)),
            b1=rng.uniform(-scale, scale, size=d_e),
        )

    @property
    def d_e(self) -> int:
        return self.w1.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {"embedding": self.embedding, "w1": self.w1, "b1": self.b1}


def encode(model: EncoderModel, tokens: list[int]) -> np.ndarray:
    """h = tanh(meanpool(embedding[tokens]) @ w1 + b1)."""
    pooled = model.embedding[tokens].mean(axis=0)
    return np.tanh(pooled @ model.w1 + model.b1)


def encode_backward(
    model: EncoderModel, tokens: list[int], upstream_grad: np.ndarray
) -> dict[str, np.ndarray]:
    """Gradients of (upstream_grad . h) w.r.t. the encoder parameters.

    Returns dense arrays shaped like the parameters; embedding rows see the
    1/len(tokens) factor of mean pooling, duplicated tokens accumulate.
    """
    pooled = model.embedding[tokens].mean(axis=0)
    h = np.tanh(pooled @ model.w1 + model.b1)
    dpre = upstream_grad * (1.0 - h * h)
    grads = {
        "w1": np.outer(pooled, dpre),
        "b1": dpre,
        "embedding": np.zeros_like(model.embedding),
    }
    dpooled = model.w1 @ dpre
    np.add.at(grads["embedding"], tokens, dpooled / len(tokens))
    return grads

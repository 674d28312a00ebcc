"""Autoregressive sequence models and structurally constrained decoding.

Models map a prefix of token ids plus the pending position (token kind and
root-to-parent path) to a distribution over the vocabulary.  Decoding is
driven by the FIFO builder: each step masks the model's distribution down to
tokens the builder would accept, renormalizes, samples (or takes the argmax),
and feeds the token back.  A sequence is complete exactly when the builder's
queue empties; EOS is never required to stop.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .graphs import padded_size
from .sequence import (BOS, DIAGONAL, EOS, IncrementalBuilder, Token, TokenSequence,
                       Vocabulary, child_orders, element_rules, encode_ids,
                       region_origin)


class GenerationError(RuntimeError):
    """Base class for decoding-time failures."""


class MaxLengthExceededError(GenerationError):
    """The tree did not complete within the configured token budget."""


class ZeroMassError(GenerationError):
    """The model put no probability mass on any admissible token."""


class SamplerModel(Protocol):
    vocab: Vocabulary

    def __call__(self, prefix: Sequence[int], kind: str,
                 path: tuple[tuple[int, int], ...]) -> np.ndarray: ...


@dataclass(frozen=True)
class GenerationConfig:
    """Decoding parameters.

    Sizes come either from ``padded_n`` (with ``original_n`` defaulting to it)
    or, when ``padded_n`` is None, from ``sizes``: an empirical multiset of
    ``(padded_n, original_n)`` pairs sampled per sequence.
    """

    k: int
    max_tokens: int = 4096
    seed: int = 0
    padded_n: int | None = None
    original_n: int | None = None
    sizes: tuple[tuple[int, int], ...] | None = None
    greedy: bool = False
    featured: bool = False
    node_vocab: int = 0
    edge_vocab: int = 0

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.padded_n is None and not self.sizes:
            raise ValueError("either padded_n or a non-empty sizes multiset is required")


def _mask_for_rules(vocab: Vocabulary, kind: str,
                    rules: tuple[frozenset[int], ...]) -> np.ndarray:
    """Boolean mask over all vocabulary ids for one pending sibling group."""
    mask = np.zeros(vocab.size, dtype=bool)
    arity = len(rules)
    for token_id in range(3, vocab.size):
        token = vocab.decode(token_id)
        if token.kind != kind or len(token.values) != arity:
            continue
        if any(v not in allowed for v, allowed in zip(token.values, rules)):
            continue
        if all(v == 0 for v in token.values):
            continue
        mask[token_id] = True
    return mask


def valid_token_mask(kind: str, depth: int, parent_attr: int, featured: bool,
                     vocab: Vocabulary, *, padded_n: int,
                     original_n: int | None = None,
                     path: tuple[tuple[int, int], ...] | None = None,
                     node_vocab: int = 0, edge_vocab: int = 0) -> np.ndarray:
    """Admissible-token mask for a sibling group at ``depth`` (root children
    are at depth 1).

    Reserved ids and all-zero groups are always excluded; so are tokens that
    could not appear in any valid encoding at the position: wrong kind or
    arity, values at slots whose sub-block is forced zero (padding regions,
    single diagonal cells of a plain tree), and non-label values at featured
    cells.  ``path`` locates the parent; it is required whenever
    ``original_n < padded_n``, otherwise position does not matter beyond kind
    and depth and a canonical path of the right kind is assumed.
    """
    k = vocab.k
    if parent_attr == 0:
        return np.zeros(vocab.size, dtype=bool)
    if padded_n != padded_size(padded_n, k):
        raise ValueError(f"padded size {padded_n} is not a power of {k}")
    levels, size = 0, padded_n
    while size > 1:
        size //= k
        levels += 1
    if not 1 <= depth <= levels:
        raise ValueError(f"depth {depth} outside [1, {levels}]")
    original_n = padded_n if original_n is None else original_n
    if path is None:
        if original_n != padded_n:
            raise ValueError("path is required when the matrix is padded")
        block = padded_n // k ** (depth - 1)
        r0, c0 = (0, 0) if kind == DIAGONAL else (block, 0)
    else:
        if len(path) != depth - 1:
            raise ValueError(f"path length {len(path)} does not match depth {depth}")
        r0, c0, block = region_origin(path, k, padded_n)
    rules = element_rules(k, original_n, featured, node_vocab, edge_vocab,
                          kind == DIAGONAL, r0, c0, block)
    return _mask_for_rules(vocab, kind, rules)


def builder_mask(builder: IncrementalBuilder, vocab: Vocabulary) -> np.ndarray:
    """Mask for the builder's pending position; all False when complete."""
    if builder.complete:
        return np.zeros(vocab.size, dtype=bool)
    return _mask_for_rules(vocab, builder.next_kind, builder.next_rules())


class UniformModel:
    """Uniform scores over the whole vocabulary; masking does the rest."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab

    def __call__(self, prefix, kind, path) -> np.ndarray:
        return np.full(self.vocab.size, 1.0 / self.vocab.size)


def uniform_model(vocab: Vocabulary) -> UniformModel:
    return UniformModel(vocab)


class NGramModel:
    """Add-one-smoothed n-gram over token ids.

    Sequences are framed as ``(n-1) * BOS, tokens..., EOS`` for counting.  An
    unseen context falls back to the smoothed unigram distribution.
    """

    def __init__(self, vocab: Vocabulary, n: int):
        if n < 1:
            raise ValueError("n-gram order must be >= 1")
        self.vocab = vocab
        self.n = n
        self._context_counts: Counter = Counter()
        self._next_counts: Counter = Counter()
        self._unigram = Counter()
        self._total = 0

    def train(self, sequences: list[TokenSequence]) -> "NGramModel":
        for s in sequences:
            ids = [BOS] * (self.n - 1) + encode_ids(s, self.vocab) + [EOS]
            for pos in range(self.n - 1, len(ids)):
                ctx = tuple(ids[pos - self.n + 1:pos])
                nxt = ids[pos]
                self._context_counts[ctx] += 1
                self._next_counts[ctx + (nxt,)] += 1
                self._unigram[nxt] += 1
                self._total += 1
        return self

    def _context(self, prefix: Sequence[int]) -> tuple[int, ...]:
        if self.n == 1:
            return ()
        padded = [BOS] * (self.n - 1) + list(prefix)
        return tuple(padded[-(self.n - 1):])

    def __call__(self, prefix, kind, path) -> np.ndarray:
        size = self.vocab.size
        ctx = self._context(prefix)
        if self.n > 1 and self._context_counts[ctx] > 0:
            denom = self._context_counts[ctx] + size
            probs = np.array([(self._next_counts[ctx + (i,)] + 1) / denom
                              for i in range(size)])
        else:
            denom = self._total + size
            probs = np.array([(self._unigram[i] + 1) / denom for i in range(size)])
        return probs


def ngram_model(corpus: list[TokenSequence], n: int,
                vocab: Vocabulary | None = None) -> NGramModel:
    """Train an n-gram model on encoded sequences; the vocabulary is derived
    from the corpus (including any featured tokens) unless given."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    if vocab is None:
        vocab = Vocabulary.from_corpus(corpus[0].k, corpus)
    return NGramModel(vocab, n).train(corpus)


def empirical_sizes(corpus: list[TokenSequence]) -> tuple[tuple[int, int], ...]:
    """(padded_n, original_n) multiset of a corpus, for the size policy."""
    return tuple((s.padded_n, s.original_n) for s in corpus)


def sample_sequence(model: SamplerModel, config: GenerationConfig) -> TokenSequence:
    """Decode one sequence; deterministic given the config seed.

    Structural completion is authoritative: decoding stops when the builder's
    queue empties.  Running past ``max_tokens`` raises
    :class:`MaxLengthExceededError`; a model that puts zero mass on every
    admissible token raises :class:`ZeroMassError`.
    """
    vocab = model.vocab
    if vocab.k != config.k:
        raise ValueError(f"model vocabulary has k={vocab.k}, config has k={config.k}")
    rng = np.random.default_rng(config.seed)
    if config.padded_n is not None:
        padded_n = config.padded_n
        original_n = config.original_n if config.original_n is not None else padded_n
    else:
        padded_n, original_n = config.sizes[rng.integers(len(config.sizes))]
    builder = IncrementalBuilder(config.k, padded_n, original_n, config.featured,
                                 config.node_vocab, config.edge_vocab)
    ids = [BOS]
    tokens: list[Token] = []
    while not builder.complete:
        if len(tokens) >= config.max_tokens:
            raise MaxLengthExceededError(
                f"tree incomplete after {config.max_tokens} tokens")
        mask = builder_mask(builder, vocab)
        scores = np.asarray(model(tuple(ids), builder.next_kind, builder.next_path),
                            dtype=float)
        if scores.shape != (vocab.size,):
            raise GenerationError(
                f"model returned shape {scores.shape}, expected ({vocab.size},)")
        masked = np.where(mask, scores, 0.0)
        total = masked.sum()
        if total <= 0.0:
            raise ZeroMassError("no probability mass on admissible tokens")
        if config.greedy:
            token_id = int(masked.argmax())
        else:
            token_id = int(rng.choice(vocab.size, p=masked / total))
        token = vocab.decode(token_id)
        builder.step(token)
        tokens.append(token)
        ids.append(token_id)
    return TokenSequence(k=config.k, padded_n=padded_n, original_n=original_n,
                         featured=config.featured, node_vocab=config.node_vocab,
                         edge_vocab=config.edge_vocab, tokens=tuple(tokens))

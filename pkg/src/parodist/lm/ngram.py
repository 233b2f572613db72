"""Deterministic n-gram reference backend with add-k smoothing.

Logits are natural-log probabilities.  Unseen or too-short contexts back
off directly to the unigram distribution.  Both forward and reversed
count tables are kept, so the model also serves mask infilling by
summing the forward score from the prefix side with the backward score
from the suffix side.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .base import Capabilities, LanguageModel, TokenDistribution, word_tokenize

_UNIGRAM_KEY: Tuple[str, ...] = ()


class NGramModel(LanguageModel):
    def __init__(
        self,
        order: int,
        vocabulary: Tuple[str, ...],
        forward_counts: Dict[Tuple[str, ...], Counter],
        backward_counts: Dict[Tuple[str, ...], Counter],
        unigram_counts: Counter,
        smoothing_k: float,
    ):
        self.order = order
        self.vocabulary = vocabulary
        self.smoothing_k = smoothing_k
        self._index = {tok: i for i, tok in enumerate(vocabulary)}
        self._forward = forward_counts
        self._backward = backward_counts
        self._unigram = unigram_counts
        self._cache: Dict[Tuple[str, Tuple[str, ...]], np.ndarray] = {}

    @property
    def capabilities(self) -> Capabilities:
        return Capabilities(forward=True, infill=True)

    # -- distribution internals -------------------------------------------

    def _smoothed_log_probs(self, side: str, key: Tuple[str, ...]) -> np.ndarray:
        cached = self._cache.get((side, key))
        if cached is not None:
            return cached
        if key == _UNIGRAM_KEY:
            counts = self._unigram
        else:
            counts = (self._forward if side == "f" else self._backward)[key]
        vec = np.full(len(self.vocabulary), self.smoothing_k, dtype=np.float64)
        for tok, count in counts.items():
            vec[self._index[tok]] += count
        with np.errstate(divide="ignore"):
            log_probs = np.log(vec) - np.log(vec.sum())
        self._cache[(side, key)] = log_probs
        return log_probs

    def _context_key(self, side: str, context: Sequence[str]) -> Tuple[str, ...]:
        """Last (order-1) tokens, or the unigram key when unseen/too short."""
        if len(context) < self.order - 1:
            return _UNIGRAM_KEY
        key = tuple(context[-(self.order - 1) :])
        table = self._forward if side == "f" else self._backward
        return key if key in table else _UNIGRAM_KEY

    def _forward_log_probs(self, context: Sequence[str]) -> np.ndarray:
        return self._smoothed_log_probs("f", self._context_key("f", context))

    def _distribution_from(self, log_probs: np.ndarray, top_k: Optional[int]) -> TokenDistribution:
        order = np.argsort(-log_probs, kind="stable")
        if top_k is not None:
            order = order[:top_k]
        return TokenDistribution(
            tuple((self.vocabulary[i], float(log_probs[i])) for i in order)
        )

    # -- LanguageModel interface ------------------------------------------

    def next_token_distribution(
        self, context: Sequence[str], top_k: int
    ) -> TokenDistribution:
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        return self._distribution_from(self._forward_log_probs(context), top_k)

    def full_forward_distribution(self, context: Sequence[str]) -> TokenDistribution:
        return self._distribution_from(self._forward_log_probs(context), None)

    def infill_distribution(
        self,
        prefix: Sequence[str],
        slots: int,
        slot_index: int,
        filled: Mapping[int, str],
        suffix: Sequence[str],
        top_k: Optional[int] = None,
    ) -> TokenDistribution:
        if not 0 <= slot_index < slots:
            raise ValueError(f"slot_index {slot_index} out of range for {slots} slots")
        if slot_index in filled:
            raise ValueError(f"slot {slot_index} is already filled")
        for slot in filled:
            if not 0 <= slot < slots:
                raise ValueError(f"filled slot {slot} out of range")

        # Contiguous known tokens to the left of the slot; the prefix only
        # helps when no unfilled slot separates it from the target slot.
        left: List[str] = []
        j = slot_index - 1
        while j >= 0 and j in filled:
            left.append(filled[j])
            j -= 1
        left.reverse()
        if j < 0:
            left = list(prefix) + left

        right: List[str] = []
        j = slot_index + 1
        while j < slots and j in filled:
            right.append(filled[j])
            j += 1
        if j >= slots:
            right = right + list(suffix)

        fwd = self._smoothed_log_probs("f", self._context_key("f", left))
        bwd = self._smoothed_log_probs("b", self._context_key("b", list(reversed(right))))
        combined = fwd + bwd
        # renormalize so logits stay log-probabilities
        peak = combined.max()
        combined = combined - (peak + np.log(np.exp(combined - peak).sum()))
        return self._distribution_from(combined, top_k)

    def sequence_log_likelihood(
        self, context: Sequence[str], text: Sequence[str]
    ) -> float:
        if not text:
            raise ValueError("text must be non-empty")
        running = list(context)
        total = 0.0
        for token in text:
            log_probs = self._forward_log_probs(running)
            idx = self._index.get(token)
            # out-of-vocabulary tokens score at the distribution floor
            total += float(log_probs[idx]) if idx is not None else float(log_probs.min())
            running.append(token)
        return total


def train_ngram(corpus: str, order: int = 2, smoothing_k: float = 0.01) -> NGramModel:
    """Count forward and reversed n-grams over the tokenized corpus."""
    if order < 2:
        raise ValueError("order must be >= 2")
    if smoothing_k < 0:
        raise ValueError("smoothing_k must be >= 0")
    tokens = word_tokenize(corpus)
    if len(tokens) < order:
        raise ValueError(
            f"corpus too small: {len(tokens)} tokens for order {order}"
        )
    vocabulary = tuple(sorted(set(tokens)))

    def count(stream: List[str]) -> Dict[Tuple[str, ...], Counter]:
        table: Dict[Tuple[str, ...], Counter] = {}
        for i in range(len(stream) - order + 1):
            key = tuple(stream[i : i + order - 1])
            table.setdefault(key, Counter())[stream[i + order - 1]] += 1
        return table

    return NGramModel(
        order=order,
        vocabulary=vocabulary,
        forward_counts=count(tokens),
        backward_counts=count(list(reversed(tokens))),
        unigram_counts=Counter(tokens),
        smoothing_k=smoothing_k,
    )

"""Backend-agnostic language-model interface and token plumbing."""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple


class TransportError(RuntimeError):
    """A backend was unreachable or broke the wire protocol."""


# Words keep interior apostrophes ("don't"); every other punctuation mark
# becomes its own token so sentence structure stays visible to backends.
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*|[^\sa-z0-9]")


def word_tokenize(text: str) -> List[str]:
    """Lowercase and split text into word and punctuation tokens."""
    return _TOKEN_RE.findall(text.lower())


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens with spaces, attaching punctuation to the left."""
    parts: List[str] = []
    for tok in tokens:
        if parts and len(tok) == 1 and not tok.isalnum():
            parts[-1] += tok
        else:
            parts.append(tok)
    return " ".join(parts)


@dataclass(frozen=True)
class TokenDistribution:
    """Tokens with logits, ordered by logit descending, ties by token text."""

    entries: Tuple[Tuple[str, float], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("distribution must contain at least one entry")
        tokens = [tok for tok, _ in self.entries]
        if len(set(tokens)) != len(tokens):
            raise ValueError("distribution contains duplicate tokens")
        keys = [(-logit, tok) for tok, logit in self.entries]
        if keys != sorted(keys):
            raise ValueError("distribution entries are not in canonical order")

    @classmethod
    def from_scores(cls, scores: Mapping[str, float]) -> "TokenDistribution":
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(ordered))

    @property
    def tokens(self) -> Tuple[str, ...]:
        return tuple(tok for tok, _ in self.entries)

    @property
    def logits(self) -> Tuple[float, ...]:
        return tuple(logit for _, logit in self.entries)

    def top(self, k: int) -> "TokenDistribution":
        if k < 1:
            raise ValueError("top_k must be >= 1")
        return TokenDistribution(self.entries[:k])

    def logit_of(self, token: str) -> Optional[float]:
        for tok, logit in self.entries:
            if tok == token:
                return logit
        return None

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Capabilities:
    forward: bool
    infill: bool


class LanguageModel(ABC):
    """A backend supplying token distributions and sequence scores.

    Implementations must be deterministic: identical queries against the
    same backend state return identical distributions.
    """

    @property
    @abstractmethod
    def capabilities(self) -> Capabilities:
        ...

    @abstractmethod
    def next_token_distribution(
        self, context: Sequence[str], top_k: int
    ) -> TokenDistribution:
        """The top_k most likely continuations of ``context``."""

    def full_forward_distribution(
        self, context: Sequence[str]
    ) -> Optional[TokenDistribution]:
        """The untruncated forward distribution, if the backend exposes it."""
        return None

    def infill_distribution(
        self,
        prefix: Sequence[str],
        slots: int,
        slot_index: int,
        filled: Mapping[int, str],
        suffix: Sequence[str],
        top_k: Optional[int] = None,
    ) -> TokenDistribution:
        """Distribution for one mask slot between ``prefix`` and ``suffix``."""
        raise TransportError("backend does not support infill")

    @abstractmethod
    def sequence_log_likelihood(
        self, context: Sequence[str], text: Sequence[str]
    ) -> float:
        """Sum of per-token log-probabilities of ``text`` given ``context``."""

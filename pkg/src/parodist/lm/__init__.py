"""Language-model backends: a deterministic n-gram reference model and a
client for external model processes speaking the JSON wire protocol."""

from .base import (
    Capabilities,
    LanguageModel,
    TokenDistribution,
    TransportError,
    detokenize,
    word_tokenize,
)
from .ngram import NGramModel, train_ngram
from .external import ExternalLanguageModel, handle_request, serve_stdio

__all__ = [
    "Capabilities",
    "LanguageModel",
    "TokenDistribution",
    "TransportError",
    "word_tokenize",
    "detokenize",
    "NGramModel",
    "train_ngram",
    "ExternalLanguageModel",
    "handle_request",
    "serve_stdio",
]

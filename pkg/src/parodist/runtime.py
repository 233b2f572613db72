"""Assembly of engine resources from files or the bundled defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Optional

from .lm.base import LanguageModel
from .lm.external import ExternalLanguageModel
from .lm.ngram import train_ngram
from .phonetics import (
    PhoneticDictionary,
    WordFrequencyList,
    default_dictionary,
    default_frequencies,
    load_pronunciation_dictionary,
    load_word_frequencies,
)
from .rhyme import (
    PhonemeSimilarityTable,
    RhymeDictionary,
    build_rhyme_dictionary,
    default_similarity_table,
)

LM_ENDPOINT_ENV = "PARODY_LM_ENDPOINT"


@dataclass
class EngineResources:
    model: LanguageModel
    dictionary: PhoneticDictionary
    frequencies: WordFrequencyList
    table: PhonemeSimilarityTable
    rdict: RhymeDictionary


def bundled_corpus_text() -> str:
    ref = importlib_resources.files("parodist.data").joinpath("training_corpus.txt")
    return ref.read_text(encoding="utf-8")


def load_resources(
    lm_backend: str = "ngram",
    lm_endpoint: Optional[str] = None,
    corpus_path: Optional[Path] = None,
    dictionary_path: Optional[Path] = None,
    frequencies_path: Optional[Path] = None,
    similarity_path: Optional[Path] = None,
    ngram_order: int = 2,
    smoothing_k: float = 0.01,
    vocabulary_limit: int = 20000,
) -> EngineResources:
    """Build the model, dictionaries and rhyme classes the engine needs.

    ``PARODY_LM_ENDPOINT`` overrides the external backend address.
    """
    if dictionary_path:
        with open(dictionary_path, "r", encoding="utf-8") as fh:
            dictionary = load_pronunciation_dictionary(fh)
    else:
        dictionary = default_dictionary()
    if frequencies_path:
        with open(frequencies_path, "r", encoding="utf-8") as fh:
            frequencies = load_word_frequencies(fh)
    else:
        frequencies = default_frequencies()
    if similarity_path:
        with open(similarity_path, "r", encoding="utf-8") as fh:
            table = PhonemeSimilarityTable.load(fh)
    else:
        table = default_similarity_table()
    rdict = build_rhyme_dictionary(
        dictionary, frequencies, limit=vocabulary_limit, table=table
    )

    if lm_backend == "ngram":
        if corpus_path:
            with open(corpus_path, "r", encoding="utf-8") as fh:
                corpus = fh.read()
        else:
            corpus = bundled_corpus_text()
        model: LanguageModel = train_ngram(
            corpus, order=ngram_order, smoothing_k=smoothing_k
        )
    elif lm_backend == "external":
        endpoint = os.environ.get(LM_ENDPOINT_ENV) or lm_endpoint
        if not endpoint:
            raise ValueError(
                "external backend needs --lm-endpoint or PARODY_LM_ENDPOINT"
            )
        model = ExternalLanguageModel.from_endpoint(endpoint)
    else:
        raise ValueError(f"unknown lm backend: {lm_backend!r}")
    return EngineResources(
        model=model,
        dictionary=dictionary,
        frequencies=frequencies,
        table=table,
        rdict=rdict,
    )

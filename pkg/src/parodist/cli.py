"""Command-line interface: batch generation, interactive co-writing,
rhyme/syllable queries, karaoke output, and the HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from .generation import (
    GenerationConfig,
    GenerationError,
    GenerationSession,
)
from .karaoke import KaraokeError, bind_timings, emit_lrc, parse_timing
from .phonetics import syllable_count_text
from .rhyme import RhymeError, rhyming_candidates
from .runtime import load_resources
from .scheme import SchemeError, parse_scheme, seed_rhyme_map, validate_scheme


def _backend_options(fn):
    fn = click.option("--lm-backend", default="ngram", show_default=True,
                      type=click.Choice(["ngram", "external"]))(fn)
    fn = click.option("--lm-endpoint", default=None,
                      help="external backend: URL or command line")(fn)
    fn = click.option("--corpus", "corpus_path", type=click.Path(exists=True, path_type=Path),
                      default=None, help="n-gram training corpus (default: bundled)")(fn)
    fn = click.option("--dict", "dictionary_path", type=click.Path(exists=True, path_type=Path),
                      default=None, help="pronunciation dictionary file")(fn)
    fn = click.option("--freq", "frequencies_path", type=click.Path(exists=True, path_type=Path),
                      default=None, help="word frequency list file")(fn)
    fn = click.option("--similarity", "similarity_path", type=click.Path(exists=True, path_type=Path),
                      default=None, help="phoneme similarity table file")(fn)
    fn = click.option("--order", "ngram_order", default=2, show_default=True)(fn)
    fn = click.option("--smoothing", "smoothing_k", default=0.01, show_default=True)(fn)
    return fn


def _resources(kwargs):
    return load_resources(
        lm_backend=kwargs.pop("lm_backend"),
        lm_endpoint=kwargs.pop("lm_endpoint"),
        corpus_path=kwargs.pop("corpus_path"),
        dictionary_path=kwargs.pop("dictionary_path"),
        frequencies_path=kwargs.pop("frequencies_path"),
        similarity_path=kwargs.pop("similarity_path"),
        ngram_order=kwargs.pop("ngram_order"),
        smoothing_k=kwargs.pop("smoothing_k"),
    )


def _load_config(config_path: Optional[Path], seed: Optional[int]) -> GenerationConfig:
    if config_path is not None:
        config = GenerationConfig.from_key_value_text(
            Path(config_path).read_text(encoding="utf-8")
        )
    else:
        config = GenerationConfig()
    if seed is not None:
        config.seed = seed
    return config


def _build_session(resources, prompt, scheme_path, config) -> GenerationSession:
    try:
        scheme = parse_scheme(Path(scheme_path).read_text(encoding="utf-8"))
    except SchemeError as exc:
        raise click.ClickException(f"bad scheme: {exc}")
    violations = validate_scheme(scheme, resources.dictionary)
    if violations:
        raise click.ClickException(
            "invalid scheme:\n" + "\n".join(f"  {v}" for v in violations)
        )
    seeds = seed_rhyme_map(scheme.seeds, resources.dictionary)
    return GenerationSession(
        resources.model, prompt, scheme, seeds, config,
        resources.dictionary, resources.rdict,
    )


@click.group()
def main() -> None:
    """Lyric parody generation under syllable and rhyme constraints."""


@main.command()
@click.option("--prompt", required=True)
@click.option("--scheme", "scheme_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="key=value generation config file")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--meta", "meta_path", type=click.Path(path_type=Path), default=None,
              help="write the full result record as JSON")
@_backend_options
def generate(prompt, scheme_path, seed, config_path, out_path, meta_path, **backend):
    """Generate lyrics for a scheme in one shot."""
    resources = _resources(backend)
    config = _load_config(config_path, seed)
    session = _build_session(resources, prompt, scheme_path, config)
    try:
        result = session.run_auto()
    except GenerationError as exc:
        raise click.ClickException(str(exc))
    text = "\n".join(result.lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    if meta_path:
        Path(meta_path).write_text(
            json.dumps(result.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )
    if result.degraded:
        click.echo("note: degraded generation was used", err=True)


@main.command()
@click.option("--prompt", required=True)
@click.option("--scheme", "scheme_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              default=None)
@_backend_options
def interactive(prompt, scheme_path, seed, config_path, **backend):
    """Pick each line from the candidates by hand (Enter accepts the
    engine's own sampled pick)."""
    resources = _resources(backend)
    config = _load_config(config_path, seed)
    session = _build_session(resources, prompt, scheme_path, config)
    try:
        session.step()
        while session.status == "awaiting_choice":
            line, segment = session.cursor
            click.echo(f"\nline {line + 1}, segment {segment + 1}:")
            for i, candidate in enumerate(session.pending):
                marker = "*" if i == session.sampled_index else " "
                click.echo(
                    f" {marker} [{i}] {candidate.text!r}"
                    f"  (score {candidate.score:.3f}, {candidate.origin})"
                )
            raw = click.prompt(
                "choice", default=str(session.sampled_index), show_default=True
            )
            session.choose(int(raw))
    except GenerationError as exc:
        raise click.ClickException(str(exc))
    assert session.result is not None
    click.echo("\n".join(session.result.lines))


@main.command()
@click.argument("word")
@_backend_options
def rhymes(word, **backend):
    """List near-rhymes of WORD from the rhyme dictionary."""
    resources = _resources(backend)
    try:
        found = sorted(rhyming_candidates(resources.rdict, word))
    except RhymeError as exc:
        raise click.ClickException(str(exc))
    click.echo("\n".join(found) if found else f"(no rhymes for {word!r})")


@main.command()
@click.argument("text", nargs=-1, required=True)
@_backend_options
def syllables(text, **backend):
    """Count syllables in TEXT."""
    resources = _resources(backend)
    joined = " ".join(text)
    click.echo(str(syllable_count_text(resources.dictionary, joined)))


@main.command()
@click.option("--lyrics", "lyrics_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="text file, one lyric line per line")
@click.option("--timing", "timing_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="TSV file: start<TAB>end<TAB>original text")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def karaoke(lyrics_path, timing_path, out_path):
    """Bind lyrics to a timing track and write an LRC file."""
    lines = Path(lyrics_path).read_text(encoding="utf-8").splitlines()
    lines = [line for line in lines if line.strip()]
    try:
        with open(timing_path, "r", encoding="utf-8") as fh:
            track = parse_timing(fh)
        lrc = emit_lrc(bind_timings(lines, track))
    except KaraokeError as exc:
        raise click.ClickException(str(exc))
    Path(out_path).write_text(lrc, encoding="utf-8")
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--addr", default="127.0.0.1:8080", show_default=True)
@click.option("--session-store", "session_store", type=click.Path(path_type=Path),
              default=None, help="JSON file for session snapshots")
@_backend_options
def serve(addr, session_store, **backend):
    """Run the HTTP service for the web studio."""
    import uvicorn

    from .service import create_app

    resources = _resources(backend)
    host, _, port = addr.rpartition(":")
    app = create_app(resources, session_store=session_store)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()

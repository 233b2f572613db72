"""Parodist: lyric parody generation under syllable and rhyme constraints."""

__version__ = "0.1.0"

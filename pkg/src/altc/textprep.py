"""Deterministic text normalization and tokenization.

The cleaning pipeline applies, in this order: URL removal, user-mention
removal, digit removal, special-character removal (each such character is
replaced by one space), and case folding; runs of whitespace then collapse
to a single space and the ends are trimmed.  URLs go first because they
contain digits and punctuation that would otherwise leak fragments into
the text.

"Special character" means any character that is neither a Unicode letter
nor whitespace, which keeps the rule valid across Latin, German, and
Urdu (Arabic-script) text alike.  Case folding is Unicode *simple*
folding: one character in, one character out, so German ß survives as-is.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, asdict
from functools import lru_cache

TOKENIZERS = ("unicode_words", "whitespace")

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_DIGIT_RE = re.compile(r"\d+")
_ASCII_SPECIAL_RE = re.compile(r"[^a-zA-Z\s]")
_WS_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"\w+")


@dataclass(frozen=True)
class PrepConfig:
    """Switches for the normalization pipeline; everything defaults to on."""

    lowercase: bool = True
    strip_mentions: bool = True
    strip_urls: bool = True
    strip_digits: bool = True
    strip_special: bool = True
    tokenizer: str = "unicode_words"

    def __post_init__(self):
        if self.tokenizer not in TOKENIZERS:
            raise ValueError(f"tokenizer must be one of {TOKENIZERS}, "
                             f"got {self.tokenizer!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PrepConfig":
        return cls(**d)


@lru_cache(maxsize=None)
def _fold_char(c: str) -> str:
    """Unicode simple case folding for one character.

    str.casefold() implements full folding (ß -> ss); where the full
    mapping expands to several characters we fall back to the single-char
    lowercase mapping, or keep the character unchanged, which is exactly
    the simple (C+S) folding behaviour.
    """
    folded = c.casefold()
    if len(folded) == 1:
        return folded
    lowered = c.lower()
    if len(lowered) == 1:
        return lowered
    return c


def _simple_fold(text: str) -> str:
    if text.isascii():
        return text.lower()
    return "".join(_fold_char(c) for c in text)


def _strip_special(text: str) -> str:
    """Replace every character that is neither a letter nor whitespace.

    Implemented as a character walk rather than a regex class: \\w would
    wrongly spare non-letter word characters such as number forms (¼, Ⅻ).
    """
    if text.isascii():
        return _ASCII_SPECIAL_RE.sub(" ", text)
    return "".join(c if (c.isalpha() or c.isspace()) else " " for c in text)


def normalize(text: str, cfg: PrepConfig = PrepConfig()) -> str:
    """Normalize raw text; a total function over valid UTF-8 strings."""
    if cfg.strip_urls:
        text = _URL_RE.sub("", text)
    if cfg.strip_mentions:
        text = _MENTION_RE.sub("", text)
    if cfg.strip_digits:
        text = _DIGIT_RE.sub("", text)
    if cfg.strip_special:
        text = _strip_special(text)
    if cfg.lowercase:
        text = _simple_fold(text)
    return _WS_RE.sub(" ", text).strip()


def tokenize(text: str, cfg: PrepConfig = PrepConfig()) -> list[str]:
    """Split normalized text into tokens; never yields an empty token.

    ``unicode_words`` segments on word-character boundaries, which handles
    non-Latin scripts such as Urdu; ``whitespace`` splits on spaces only.
    """
    if cfg.tokenizer == "whitespace":
        return text.split()
    return _WORD_RE.findall(text)

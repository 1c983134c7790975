"""Text ingestion: FASTA cleanup, sentinel termination, alphabet facts.

The indexing layers operate on a byte string that ends with a unique
terminator smaller than every other symbol.  Byte value 0 plays that role;
reports render it as ``$``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SENTINEL = 0
SENTINEL_GLYPH = "$"


class TextError(ValueError):
    """Raised for malformed or unusable input text."""


def preprocess_fasta(raw: bytes) -> bytes:
    """Strip FASTA headers and line breaks, uppercase the sequence.

    Header lines start with ``>`` and are dropped entirely.  CR/LF bytes are
    removed so multi-line records collapse into one contiguous sequence.
    Idempotent: running it on already-clean output changes nothing.
    """
    out = bytearray()
    for line in raw.split(b"\n"):
        line = line.strip(b"\r")
        if line.startswith(b">"):
            continue
        out += line.upper()
    if not out:
        raise TextError("empty sequence")
    return bytes(out)


@dataclass(frozen=True)
class Text:
    """Sentinel-terminated text.

    ``data`` holds the n content symbols followed by the sentinel byte, so
    ``len(data) == n + 1``.  Suffix indices used throughout the package are
    0-based positions into ``data``.
    """

    data: bytes
    n: int

    def __post_init__(self) -> None:
        if self.n != len(self.data) - 1:
            raise TextError("length bookkeeping mismatch")
        if self.data[-1] != SENTINEL:
            raise TextError("text must end with the sentinel byte")

    @property
    def content(self) -> bytes:
        """The text without its sentinel."""
        return self.data[: self.n]

    def render(self) -> str:
        """Human-readable form with the sentinel shown as '$'."""
        return self.content.decode("latin-1") + SENTINEL_GLYPH


def with_sentinel(content: bytes) -> Text:
    """Terminate ``content`` with a symbol smaller than all of its symbols.

    Byte 0 is appended.  If the content already uses byte 0 there is no
    available value that is both unused and smaller than every symbol, so the
    text cannot be terminated.
    """
    if not content:
        raise TextError("empty sequence")
    if SENTINEL in content:
        raise TextError("alphabet exhausted: no unused symbol below the alphabet")
    return Text(data=content + bytes([SENTINEL]), n=len(content))


@dataclass(frozen=True)
class Alphabet:
    """Distinct symbols of a text, sentinel tracked separately."""

    symbols: tuple[int, ...]  # ascending, sentinel excluded
    size: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "size", len(self.symbols))

    @property
    def size_with_sentinel(self) -> int:
        return self.size + 1


def alphabet(text: Text) -> Alphabet:
    """Distinct content symbols of ``text`` in ascending byte order."""
    return Alphabet(symbols=tuple(sorted(set(text.content))))

"""Text encodings for strands: digit strings and the 4-letter nucleotide alias.

digits: symbol s is the character str(s); only defined for r <= 10.
acgt:   A=0 C=1 G=2 T=3; only defined for r = 4.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import InvalidParams, SymbolOutOfRange

_ACGT = "ACGT"
_ACGT_INDEX = {c: i for i, c in enumerate(_ACGT)}

FORMATS = ("digits", "acgt")


def check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise InvalidParams(f"unknown strand format {fmt!r}; expected one of {FORMATS}")
    return fmt


def detect_format(text: str) -> str:
    """Best-effort format of a single encoded word."""
    if all(c.isdigit() for c in text):
        return "digits"
    if all(c.upper() in _ACGT_INDEX for c in text):
        return "acgt"
    raise InvalidParams(f"cannot parse {text!r} as digits or ACGT")


def decode_word(text: str, fmt: str, r: int | None = None) -> tuple[int, ...]:
    """Parse one encoded word; validates every symbol against r when given."""
    check_format(fmt)
    text = text.strip()
    if fmt == "acgt":
        if r is not None and r != 4:
            raise InvalidParams(f"acgt format requires r = 4, got r = {r}")
        out = []
        for c in text:
            idx = _ACGT_INDEX.get(c.upper())
            if idx is None:
                raise InvalidParams(f"character {c!r} is not one of ACGT")
            out.append(idx)
        return tuple(out)
    if r is not None and r > 10:
        raise InvalidParams(f"digits format supports r <= 10, got r = {r}")
    out = []
    for c in text:
        if not c.isdigit():
            raise InvalidParams(f"character {c!r} is not a digit")
        s = int(c)
        if r is not None and s >= r:
            raise SymbolOutOfRange(f"symbol {s} outside alphabet of size {r}")
        out.append(s)
    return tuple(out)


def encode_word(word: Sequence[int], fmt: str) -> str:
    check_format(fmt)
    if fmt == "acgt":
        for s in word:
            if not 0 <= s < 4:
                raise SymbolOutOfRange(f"symbol {s} not encodable as ACGT")
        return "".join(_ACGT[s] for s in word)
    for s in word:
        if not 0 <= s < 10:
            raise SymbolOutOfRange(f"symbol {s} not encodable as a single digit")
    return "".join(str(s) for s in word)


def decode_lines(lines: Iterable[str], fmt: str, r: int | None = None) -> list[tuple[int, ...]]:
    """One strand per line; blank lines are skipped."""
    strands = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            strands.append(decode_word(stripped, fmt, r))
        except (InvalidParams, SymbolOutOfRange) as exc:
            raise InvalidParams(f"line {lineno}: {exc}") from exc
    return strands


def encode_lines(strands: Iterable[Sequence[int]], fmt: str) -> str:
    return "\n".join(encode_word(w, fmt) for w in strands) + "\n"

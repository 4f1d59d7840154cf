"""Tokenizer, parser, and serializer for box-token planning programs.

A program is a flat token sequence mixing free text, 8-token box groups
(``<boxs>`` + six ``<coord_k>`` tokens + ``<boxe>``), and bracketed edit
statements (``<adds>/<adde>``, ``<dels>/<dele>``, ``<mods>/<mode>``).

Statement boundaries are recovered from tokens alone, so programs are kept in
a canonical form: between program start, edit statements, and program end,
each non-edit region is exactly one of

* nothing,
* a single text statement (:class:`OverallText`),
* a single text-with-embedded-boxes statement (:class:`GroundedText`), or
* a run of box-led statements (:class:`BoxOnly` / :class:`BoxWithText`).

``parse_program`` always returns canonical programs and
``serialize_program`` refuses non-canonical ones, which is what makes
``parse(serialize(p)) == p`` hold exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

from .geometry import AABB, NUM_BINS, QuantBox


class TokenKind(Enum):
    BOX_START = "<boxs>"
    BOX_END = "<boxe>"
    ADD_START = "<adds>"
    ADD_END = "<adde>"
    DEL_START = "<dels>"
    DEL_END = "<dele>"
    MOD_START = "<mods>"
    MOD_END = "<mode>"
    COORD = "coord"
    WORD = "word"


_BRACKET_KINDS = (
    TokenKind.BOX_START,
    TokenKind.BOX_END,
    TokenKind.ADD_START,
    TokenKind.ADD_END,
    TokenKind.DEL_START,
    TokenKind.DEL_END,
    TokenKind.MOD_START,
    TokenKind.MOD_END,
)
_SURFACE_TO_KIND = {k.value: k for k in _BRACKET_KINDS}

EDIT_STARTS = frozenset({TokenKind.ADD_START, TokenKind.DEL_START, TokenKind.MOD_START})
EDIT_ENDS = frozenset({TokenKind.ADD_END, TokenKind.DEL_END, TokenKind.MOD_END})
_EDIT_END_OF = {
    TokenKind.ADD_START: TokenKind.ADD_END,
    TokenKind.DEL_START: TokenKind.DEL_END,
    TokenKind.MOD_START: TokenKind.MOD_END,
}

RESERVED_SURFACES = tuple(k.value for k in _BRACKET_KINDS)
_RESERVED_RE = re.compile(r"<(?:boxs|boxe|adds|adde|dels|dele|mods|mode|coord_(\d+))>")
_COORD_SURFACE_RE = re.compile(r"<coord_\d+>")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    value: int | str | None = None

    @property
    def surface(self) -> str:
        if self.kind is TokenKind.COORD:
            return f"<coord_{self.value}>"
        if self.kind is TokenKind.WORD:
            return str(self.value)
        return self.kind.value


def coord(bin_index: int) -> Token:
    if not 0 <= int(bin_index) <= NUM_BINS - 1:
        raise CoordOutOfRangeError(None, f"coordinate bin {bin_index!r} outside [0, {NUM_BINS - 1}]")
    return Token(TokenKind.COORD, int(bin_index))


def word(text: str) -> Token:
    _check_word(text)
    return Token(TokenKind.WORD, text)


def words(text: str) -> list[Token]:
    """Split free text on whitespace into word tokens."""
    return [word(w) for w in text.split()]


def _check_word(text: str) -> None:
    if not text or text != text.strip() or any(ch.isspace() for ch in text):
        raise ReservedWordError(None, f"word {text!r} must be nonempty and whitespace-free")
    for surface in RESERVED_SURFACES:
        if surface in text:
            raise ReservedWordError(None, f"word {text!r} contains reserved token {surface!r}")
    if _COORD_SURFACE_RE.search(text):
        raise ReservedWordError(None, f"word {text!r} contains a reserved coordinate token")


# ---------------------------------------------------------------------------
# Errors


class GrammarError(ValueError):
    """Base for lexing/rendering/parsing failures; ``offset`` is a token index."""

    def __init__(self, offset: int | None, message: str):
        self.offset = offset
        super().__init__(message if offset is None else f"token {offset}: {message}")


class CoordOutOfRangeError(GrammarError):
    pass


class ReservedWordError(GrammarError):
    pass


class UnbalancedBracketError(GrammarError):
    def __init__(self, offset: int, expected: str, found: str):
        self.expected = expected
        self.found = found
        super().__init__(offset, f"expected {expected}, found {found}")


class WrongCoordCountError(GrammarError):
    def __init__(self, offset: int, found: int):
        self.found = found
        super().__init__(offset, f"box holds {found} coordinate tokens, expected 6")


class NestedEditError(GrammarError):
    def __init__(self, offset: int):
        super().__init__(offset, "edit statements may not nest")


class TrailingGarbageError(GrammarError):
    def __init__(self, offset: int, found: str):
        super().__init__(offset, f"unexpected {found} with no open bracket")


class InvalidBoxError(GrammarError):
    def __init__(self, offset: int, message: str):
        super().__init__(offset, message)


@dataclass(frozen=True)
class ParseDiagnostic:
    offset: int
    error: str
    message: str


# ---------------------------------------------------------------------------
# Statements and programs


@dataclass(frozen=True)
class BoxOnly:
    box: QuantBox


@dataclass(frozen=True)
class BoxWithText:
    box: QuantBox
    text: str


@dataclass(frozen=True)
class GroundedText:
    """Free text with boxes embedded at reference points.

    ``segments`` interleaves nonempty text strings and boxes; the first
    segment is text (a box-led sequence is represented with
    :class:`BoxOnly`/:class:`BoxWithText` instead) and no two text segments
    are adjacent.
    """

    segments: tuple[Union[str, QuantBox], ...]


@dataclass(frozen=True)
class EditAdd:
    box: QuantBox
    text: str


@dataclass(frozen=True)
class EditDelete:
    boxes: tuple[QuantBox, ...]


@dataclass(frozen=True)
class EditModify:
    box: QuantBox
    text: str


@dataclass(frozen=True)
class OverallText:
    text: str


Statement = Union[BoxOnly, BoxWithText, GroundedText, EditAdd, EditDelete, EditModify, OverallText]

_EDIT_TYPES = (EditAdd, EditDelete, EditModify)
_TEXT_LED_TYPES = (OverallText, GroundedText)
_BOX_LED_TYPES = (BoxOnly, BoxWithText)


@dataclass(frozen=True)
class PlanProgram:
    statements: tuple[Statement, ...] = field(default_factory=tuple)

    def boxes(self) -> list[QuantBox]:
        """All embedded boxes in emission order."""
        out: list[QuantBox] = []
        for stmt in self.statements:
            if isinstance(stmt, (BoxOnly,)):
                out.append(stmt.box)
            elif isinstance(stmt, (BoxWithText, EditAdd, EditModify)):
                out.append(stmt.box)
            elif isinstance(stmt, EditDelete):
                out.extend(stmt.boxes)
            elif isinstance(stmt, GroundedText):
                out.extend(s for s in stmt.segments if isinstance(s, QuantBox))
        return out

    def validate(self) -> None:
        """Raise GrammarError unless the program is canonical (see module docs)."""
        prev_kind = "edit"  # program start behaves like an edit boundary
        for stmt in self.statements:
            if isinstance(stmt, _EDIT_TYPES):
                _validate_edit(stmt)
                prev_kind = "edit"
                continue
            if isinstance(stmt, _TEXT_LED_TYPES):
                if prev_kind != "edit":
                    raise GrammarError(
                        None,
                        f"{type(stmt).__name__} must open the program or follow an edit statement",
                    )
                _validate_text_led(stmt)
                prev_kind = "text"
            elif isinstance(stmt, _BOX_LED_TYPES):
                if prev_kind == "text":
                    raise GrammarError(
                        None, f"{type(stmt).__name__} cannot follow a text-led statement"
                    )
                if isinstance(stmt, BoxWithText):
                    _require_text(stmt.text, allow_empty=False)
                prev_kind = "box"
            else:
                raise GrammarError(None, f"unknown statement type {type(stmt).__name__}")


def _require_text(text: str, allow_empty: bool) -> None:
    if text == "":
        if allow_empty:
            return
        raise GrammarError(None, "statement text must be nonempty")
    if text != " ".join(text.split()):
        raise GrammarError(None, f"text {text!r} is not single-space normalized")
    for piece in text.split():
        _check_word(piece)


def _validate_edit(stmt: Statement) -> None:
    if isinstance(stmt, EditDelete):
        if len(stmt.boxes) < 1:
            raise GrammarError(None, "delete statement requires at least one box")
    else:
        _require_text(stmt.text, allow_empty=True)


def _validate_text_led(stmt: Statement) -> None:
    if isinstance(stmt, OverallText):
        _require_text(stmt.text, allow_empty=False)
        return
    segs = stmt.segments
    if len(segs) < 2 or not isinstance(segs[0], str):
        raise GrammarError(None, "grounded text must start with a text segment and embed a box")
    if not any(isinstance(s, QuantBox) for s in segs):
        raise GrammarError(None, "grounded text must embed at least one box")
    for i, seg in enumerate(segs):
        if isinstance(seg, str):
            _require_text(seg, allow_empty=False)
            if i + 1 < len(segs) and isinstance(segs[i + 1], str):
                raise GrammarError(None, "grounded text segments must alternate with boxes")
        elif not isinstance(seg, QuantBox):
            raise GrammarError(None, f"invalid grounded segment {seg!r}")


def grounded_statements(segments: Iterable[Union[str, QuantBox]]) -> list[Statement]:
    """Canonical statements for interleaved text/box segments.

    Adjacent text pieces are merged and empties dropped; a leading box makes
    the result a box-led run instead of a single GroundedText.
    """
    merged: list[Union[str, QuantBox]] = []
    for seg in segments:
        if isinstance(seg, QuantBox):
            merged.append(seg)
            continue
        text = " ".join(str(seg).split())
        if not text:
            continue
        if merged and isinstance(merged[-1], str):
            merged[-1] = f"{merged[-1]} {text}"
        else:
            merged.append(text)
    if not merged:
        raise GrammarError(None, "no content in grounded segments")
    if isinstance(merged[0], str):
        if len(merged) == 1:
            return [OverallText(merged[0])]
        return [GroundedText(tuple(merged))]
    # box-led: pair each box with its trailing text
    out: list[Statement] = []
    i = 0
    while i < len(merged):
        box = merged[i]
        if i + 1 < len(merged) and isinstance(merged[i + 1], str):
            out.append(BoxWithText(box, merged[i + 1]))
            i += 2
        else:
            out.append(BoxOnly(box))
            i += 1
    return out


# ---------------------------------------------------------------------------
# Lexing and rendering


def lex(text: str) -> list[Token]:
    """Token list for canonical token text; inverse of :func:`render_tokens`.

    Raises CoordOutOfRangeError (with the token offset) for ``<coord_k>``
    surfaces with k > 127; unknown angle-bracket runs are plain words.
    """
    tokens: list[Token] = []
    reserved = list(_RESERVED_RE.finditer(text))
    ri = 0
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        while ri < len(reserved) and reserved[ri].start() < pos:
            ri += 1
        if ri < len(reserved) and reserved[ri].start() == pos:
            match = reserved[ri]
            digits = match.group(1)
            if digits is None:
                tokens.append(Token(_SURFACE_TO_KIND[match.group(0)]))
            else:
                value = int(digits)
                if value > NUM_BINS - 1:
                    raise CoordOutOfRangeError(
                        len(tokens), f"coordinate bin {value} outside [0, {NUM_BINS - 1}]"
                    )
                tokens.append(Token(TokenKind.COORD, value))
            pos = match.end()
            ri += 1
            continue
        limit = reserved[ri].start() if ri < len(reserved) else n
        end = pos
        while end < limit and not text[end].isspace():
            end += 1
        tokens.append(Token(TokenKind.WORD, text[pos:end]))
        pos = end
    return tokens


def render_tokens(tokens: Sequence[Token]) -> str:
    """Canonical text: bracket/coord surfaces back to back, words space-separated."""
    parts: list[str] = []
    prev_word = False
    for offset, tok in enumerate(tokens):
        if tok.kind is TokenKind.WORD:
            try:
                _check_word(str(tok.value))
            except ReservedWordError as exc:
                raise ReservedWordError(offset, str(exc)) from None
            if prev_word:
                parts.append(" ")
            parts.append(str(tok.value))
            prev_word = True
        else:
            if tok.kind is TokenKind.COORD and not 0 <= int(tok.value) <= NUM_BINS - 1:
                raise CoordOutOfRangeError(offset, f"coordinate bin {tok.value!r} out of range")
            parts.append(tok.surface)
            prev_word = False
    return "".join(parts)


# ---------------------------------------------------------------------------
# Serialization


def serialize_box(box: AABB | QuantBox) -> list[Token]:
    """8 tokens: <boxs>, six coords (x_min,y_min,z_min,x_max,y_max,z_max), <boxe>."""
    qbox = box.quantize() if isinstance(box, AABB) else box
    return [
        Token(TokenKind.BOX_START),
        *(Token(TokenKind.COORD, b) for b in qbox.bins),
        Token(TokenKind.BOX_END),
    ]


def sort_parts(boxes: Sequence[QuantBox]) -> list[QuantBox]:
    """Stable lexicographic order on (z_min, y_min, x_min) bins."""
    return sorted(boxes, key=lambda b: b.sort_key)


def serialize_program(program: PlanProgram) -> list[Token]:
    program.validate()
    tokens: list[Token] = []
    for stmt in program.statements:
        if isinstance(stmt, BoxOnly):
            tokens += serialize_box(stmt.box)
        elif isinstance(stmt, BoxWithText):
            tokens += serialize_box(stmt.box) + words(stmt.text)
        elif isinstance(stmt, OverallText):
            tokens += words(stmt.text)
        elif isinstance(stmt, GroundedText):
            for seg in stmt.segments:
                tokens += serialize_box(seg) if isinstance(seg, QuantBox) else words(seg)
        elif isinstance(stmt, EditAdd):
            tokens += [Token(TokenKind.ADD_START), *serialize_box(stmt.box), *words(stmt.text)]
            tokens.append(Token(TokenKind.ADD_END))
        elif isinstance(stmt, EditModify):
            tokens += [Token(TokenKind.MOD_START), *serialize_box(stmt.box), *words(stmt.text)]
            tokens.append(Token(TokenKind.MOD_END))
        elif isinstance(stmt, EditDelete):
            tokens.append(Token(TokenKind.DEL_START))
            for box in stmt.boxes:
                tokens += serialize_box(box)
            tokens.append(Token(TokenKind.DEL_END))
    return tokens


def render_program(program: PlanProgram) -> str:
    return render_tokens(serialize_program(program))


# ---------------------------------------------------------------------------
# Parsing


def parse_program(tokens: Sequence[Token]) -> PlanProgram:
    """Strict parse; raises the first GrammarError with its token offset."""
    statements, _ = _parse(tokens, lenient=False)
    return PlanProgram(tuple(statements))


def parse_program_lenient(
    tokens: Sequence[Token],
) -> tuple[PlanProgram, list[ParseDiagnostic]]:
    """Skip malformed statements and report them.

    The recovered program may not be canonical; it is a best-effort salvage
    for diagnostics, not a serialization source.
    """
    statements, diags = _parse(tokens, lenient=True)
    return PlanProgram(tuple(statements)), diags


def parse_text(text: str) -> PlanProgram:
    return parse_program(lex(text))


_STATEMENT_STARTS = frozenset(
    {TokenKind.WORD, TokenKind.BOX_START, TokenKind.ADD_START, TokenKind.DEL_START, TokenKind.MOD_START}
)


def _parse(tokens: Sequence[Token], lenient: bool) -> tuple[list[Statement], list[ParseDiagnostic]]:
    statements: list[Statement] = []
    diagnostics: list[ParseDiagnostic] = []
    i = 0
    n = len(tokens)
    while i < n:
        try:
            stmt_list, i = _parse_statement(tokens, i)
            statements.extend(stmt_list)
        except GrammarError as exc:
            if not lenient:
                raise
            diagnostics.append(
                ParseDiagnostic(offset=exc.offset if exc.offset is not None else i,
                                error=type(exc).__name__, message=str(exc))
            )
            i = max(i, exc.offset if exc.offset is not None else i) + 1
            while i < n and tokens[i].kind not in _STATEMENT_STARTS:
                i += 1
    return statements, diagnostics


def _parse_statement(tokens: Sequence[Token], i: int) -> tuple[list[Statement], int]:
    kind = tokens[i].kind
    if kind in EDIT_STARTS:
        stmt, i = _parse_edit(tokens, i)
        return [stmt], i
    if kind is TokenKind.BOX_START:
        box, i = _parse_box(tokens, i)
        text_words, i = _collect_words(tokens, i)
        if text_words:
            return [BoxWithText(box, " ".join(text_words))], i
        return [BoxOnly(box)], i
    if kind is TokenKind.WORD:
        segments: list[Union[str, QuantBox]] = []
        text_words, i = _collect_words(tokens, i)
        segments.append(" ".join(text_words))
        saw_box = False
        while i < len(tokens) and tokens[i].kind is TokenKind.BOX_START:
            box, i = _parse_box(tokens, i)
            segments.append(box)
            saw_box = True
            text_words, i = _collect_words(tokens, i)
            if text_words:
                segments.append(" ".join(text_words))
        if saw_box:
            return [GroundedText(tuple(segments))], i
        return [OverallText(segments[0])], i
    if kind is TokenKind.COORD:
        raise UnbalancedBracketError(i, "<boxs>", tokens[i].surface)
    raise TrailingGarbageError(i, tokens[i].surface)


def _collect_words(tokens: Sequence[Token], i: int) -> tuple[list[str], int]:
    out: list[str] = []
    while i < len(tokens) and tokens[i].kind is TokenKind.WORD:
        out.append(str(tokens[i].value))
        i += 1
    return out, i


def _parse_box(tokens: Sequence[Token], i: int) -> tuple[QuantBox, int]:
    start = i
    j = i + 1
    bins: list[int] = []
    while j < len(tokens) and tokens[j].kind is TokenKind.COORD:
        bins.append(int(tokens[j].value))
        j += 1
    if j >= len(tokens):
        raise UnbalancedBracketError(len(tokens), "<boxe>", "end of input")
    if tokens[j].kind is not TokenKind.BOX_END:
        raise UnbalancedBracketError(j, "<coord_k> or <boxe>", tokens[j].surface)
    if len(bins) != 6:
        raise WrongCoordCountError(j, len(bins))
    try:
        box = QuantBox(tuple(bins))
    except ValueError as exc:
        raise InvalidBoxError(start, str(exc)) from None
    return box, j + 1


def _parse_edit(tokens: Sequence[Token], i: int) -> tuple[Statement, int]:
    start_kind = tokens[i].kind
    end_kind = _EDIT_END_OF[start_kind]
    j = i + 1
    if start_kind is TokenKind.DEL_START:
        boxes: list[QuantBox] = []
        while j < len(tokens) and tokens[j].kind is TokenKind.BOX_START:
            box, j = _parse_box(tokens, j)
            boxes.append(box)
        if j >= len(tokens):
            raise UnbalancedBracketError(len(tokens), end_kind.value, "end of input")
        if tokens[j].kind in EDIT_STARTS:
            raise NestedEditError(j)
        if tokens[j].kind is not end_kind:
            raise UnbalancedBracketError(j, f"<boxs> or {end_kind.value}", tokens[j].surface)
        if not boxes:
            raise UnbalancedBracketError(j, "<boxs>", tokens[j].surface)
        return EditDelete(tuple(boxes)), j + 1
    # add / modify: one box then free text
    if j < len(tokens) and tokens[j].kind in EDIT_STARTS:
        raise NestedEditError(j)
    if j >= len(tokens) or tokens[j].kind is not TokenKind.BOX_START:
        found = "end of input" if j >= len(tokens) else tokens[j].surface
        raise UnbalancedBracketError(min(j, len(tokens)), "<boxs>", found)
    box, j = _parse_box(tokens, j)
    text_words, j = _collect_words(tokens, j)
    if j >= len(tokens):
        raise UnbalancedBracketError(len(tokens), end_kind.value, "end of input")
    if tokens[j].kind in EDIT_STARTS:
        raise NestedEditError(j)
    if tokens[j].kind is not end_kind:
        raise UnbalancedBracketError(j, end_kind.value, tokens[j].surface)
    text = " ".join(text_words)
    stmt = EditAdd(box, text) if start_kind is TokenKind.ADD_START else EditModify(box, text)
    return stmt, j + 1

"""
Tokenizer shared by the spec-file grammar and the program grammar.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass


class SpecParseError(ValueError):
    """Syntax, name or sort error at a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        self.line = line
        self.col = col
        self.reason = message
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "sym" or "eof"
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


# longest symbols first
_SYMBOLS = (
    ":->",
    "**",
    "=>",
    "==",
    "!=",
    "<=",
    ">=",
    "/\\",
    "\\/",
    "&&",
    "||",
    "++",
    "<",
    ">",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ";",
    "|",
    "+",
    "-",
    "*",
    "=",
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


def tokenize(source: str) -> deque[Token]:
    """Split ``source`` into tokens; ``#`` starts a comment to end of line."""
    tokens: deque[Token] = deque()
    line, col, pos = 1, 1, 0
    while pos < len(source):
        char = source[pos]
        if char == "\n":
            line, col, pos = line + 1, 1, pos + 1
            continue
        if char.isspace():
            col, pos = col + 1, pos + 1
            continue
        if char == "#":
            while pos < len(source) and source[pos] != "\n":
                pos += 1
            continue
        match = _IDENT.match(source, pos) or _INT.match(source, pos)
        if match:
            text = match.group()
            kind = "int" if text[0].isdigit() else "ident"
            tokens.append(Token(kind, text, line, col))
        else:
            text = next((s for s in _SYMBOLS if source.startswith(s, pos)), "")
            if not text:
                raise SpecParseError(f"unexpected character {char!r}", line, col)
            tokens.append(Token("sym", text, line, col))
        col += len(text)
        pos += len(text)
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    """Cursor over a token deque with expectation helpers."""

    def __init__(self, tokens: deque[Token]) -> None:
        self._tokens = tokens

    def peek(self, ahead: int = 0) -> Token:
        if ahead < len(self._tokens):
            return self._tokens[ahead]
        return self._tokens[-1]

    def at(self, text: str, ahead: int = 0) -> bool:
        token = self.peek(ahead)
        return token.kind in ("sym", "ident") and token.text == text

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

    def next(self) -> Token:
        token = self._tokens[0]
        if token.kind != "eof":
            self._tokens.popleft()
        return token

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.peek()
        if not self.at(text):
            raise self.error(f"expected '{text}', found {token}")
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        token = self.peek()
        if token.kind != "ident":
            raise self.error(f"expected {what}, found {token}")
        return self.next()

    def expect_int(self) -> int:
        token = self.peek()
        if token.kind != "int":
            raise self.error(f"expected integer, found {token}")
        return int(self.next().text)

    def error(self, message: str, token: Token | None = None) -> SpecParseError:
        where = token or self.peek()
        return SpecParseError(message, where.line, where.col)

    def find_before_close(self, text: str) -> bool:
        """True if ``text`` occurs at bracket depth 0 before the current block closes."""
        depth = 0
        for token in self._tokens:
            if token.kind == "eof":
                return False
            if token.kind == "sym" and token.text in ("(", "{", "["):
                depth += 1
            elif token.kind == "sym" and token.text in (")", "}", "]"):
                if depth == 0:
                    return False
                depth -= 1
            elif depth == 0 and token.kind == "sym" and token.text == text:
                return True
        return False

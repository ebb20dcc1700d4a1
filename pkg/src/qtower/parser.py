"""Expression front end: tokenizer, recursive-descent parser, evaluator.

Grammar (whitespace insensitive, offsets are 0-based characters):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' integer)?
    atom   := rational | 'g' digits | 'sqrt' '(' expr ')' | '(' expr ')'
            | name

Left associative throughout; unary minus binds tighter than '*' and '/'
but looser than '^', so -2^2 is -(2^2). Rationals are unsigned `p` or
`p/q` tokens; a leading '-' is always the operator. Names resolve against
REPL bindings at evaluation time; parsing never consults tower state.

Polynomial literals are `[c0, c1, ..., cd]` with rational entries,
constant term first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import LevelMismatch, NotASquareInTower, ParseError
from .poly import Polynomial
from .tower import Tower, TowerElement

MAX_EXPONENT = 64

_TOKEN_CHARS = {
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    "^": "CARET",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
}

_RAT_RE = re.compile(r"\d+(?:/\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_GEN_RE = re.compile(r"g(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int
    value: object = None


# -- expression nodes ---------------------------------------------------------


@dataclass(frozen=True)
class RationalLiteral:
    value: Fraction


@dataclass(frozen=True)
class GeneratorRef:
    index: int


@dataclass(frozen=True)
class Sqrt:
    child: object


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class Pow:
    child: object
    exponent: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Name:
    name: str


def tokenize(text: str) -> list[Token]:
    """Scan text into tokens, ending with an EOF token at len(text)."""
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_CHARS:
            tokens.append(Token(_TOKEN_CHARS[c], c, i))
            i += 1
            continue
        if c.isdigit():
            m = _RAT_RE.match(text, i)
            raw = m.group(0)
            num, _, den = raw.partition("/")
            if den and int(den) == 0:
                raise ParseError(f"zero denominator in {raw!r}", i)
            value = Fraction(int(num), int(den)) if den else Fraction(int(num))
            tokens.append(Token("RAT", raw, i, value))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            gen = _GEN_RE.match(word)
            if word == "sqrt":
                tokens.append(Token("SQRT", word, i))
            elif gen:
                tokens.append(Token("GEN", word, i, int(gen.group(1))))
            else:
                tokens.append(Token("NAME", word, i, word))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(Token("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {what}, got {tok.text or 'end of input'!r}",
                tok.pos,
                expected=(what,),
            )
        return self.advance()

    def finish(self):
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(
                f"unexpected trailing input {tok.text!r}",
                tok.pos,
                expected=("end of input",),
            )

    def expr(self):
        node = self.term()
        while self.peek().kind in ("PLUS", "MINUS"):
            op = self.advance()
            node = BinOp("+" if op.kind == "PLUS" else "-", node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in ("STAR", "SLASH"):
            op = self.advance()
            node = BinOp("*" if op.kind == "STAR" else "/", node, self.factor())
        return node

    def factor(self):
        if self.peek().kind == "MINUS":
            self.advance()
            return Neg(self.factor())
        node = self.atom()
        if self.peek().kind == "CARET":
            self.advance()
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> int:
        negative = False
        if self.peek().kind == "MINUS":
            self.advance()
            negative = True
        tok = self.expect("RAT", "integer exponent")
        if tok.value.denominator != 1:
            raise ParseError(f"exponent {tok.text!r} is not an integer", tok.pos)
        e = int(tok.value)
        if e > MAX_EXPONENT:
            raise ParseError(f"exponent exceeds {MAX_EXPONENT}", tok.pos)
        return -e if negative else e

    def atom(self):
        tok = self.peek()
        if tok.kind == "RAT":
            self.advance()
            return RationalLiteral(tok.value)
        if tok.kind == "GEN":
            self.advance()
            return GeneratorRef(tok.value)
        if tok.kind == "NAME":
            self.advance()
            return Name(tok.value)
        if tok.kind == "SQRT":
            self.advance()
            self.expect("LPAREN", "'(' after sqrt")
            inner = self.expr()
            self.expect("RPAREN", "')'")
            return Sqrt(inner)
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.expr()
            self.expect("RPAREN", "')'")
            return inner
        raise ParseError(
            f"expected an atom, got {tok.text or 'end of input'!r}",
            tok.pos,
            expected=("rational", "g<k>", "sqrt(...)", "(", "name"),
        )


def parse_expr(source):
    """Parse text (or a token list) into an expression tree; the entire
    input must be consumed."""
    tokens = tokenize(source) if isinstance(source, str) else list(source)
    parser = _Parser(tokens)
    node = parser.expr()
    parser.finish()
    return node


def parse_poly(source) -> Polynomial:
    """Parse `[c0, c1, ..., cd]` with rational entries (optional leading
    '-'), constant term first."""
    tokens = tokenize(source) if isinstance(source, str) else list(source)
    parser = _Parser(tokens)
    parser.expect("LBRACKET", "'['")
    if parser.peek().kind == "RBRACKET":
        raise ParseError("empty polynomial", parser.peek().pos)
    coeffs = [_poly_entry(parser)]
    while parser.peek().kind == "COMMA":
        parser.advance()
        coeffs.append(_poly_entry(parser))
    parser.expect("RBRACKET", "']' or ','")
    parser.finish()
    return Polynomial(tuple(coeffs))


def _poly_entry(parser: _Parser) -> Fraction:
    negative = False
    if parser.peek().kind == "MINUS":
        parser.advance()
        negative = True
    tok = parser.expect("RAT", "rational coefficient")
    return -tok.value if negative else tok.value


def eval_expr(node, tower: Tower, bindings=None) -> TowerElement:
    """Evaluate an expression tree to an element of the tower's top level.

    sqrt(e) requires e to already be a square in the tower (the witness
    with nonnegative sign is returned); it never extends the tower.
    """
    depth = tower.depth

    def ev(n):
        if isinstance(n, RationalLiteral):
            return tower.embed(n.value)
        if isinstance(n, GeneratorRef):
            if not 1 <= n.index <= depth:
                raise LevelMismatch(
                    f"g{n.index} does not exist (tower depth {depth})"
                )
            return tower.lift_to(tower.generator(n.index), depth)
        if isinstance(n, Name):
            if bindings is None or n.name not in bindings:
                raise ValueError(f"unknown name {n.name!r}")
            bound = bindings[n.name]
            return tower.lift_to(bound, depth)
        if isinstance(n, Sqrt):
            value = ev(n.child)
            witness = tower.is_square(value)
            if witness is None:
                raise NotASquareInTower(
                    "not a square in the current tower; "
                    "use 'adjoin' to extend the tower first"
                )
            return -witness if tower.exact_sign(witness) < 0 else witness
        if isinstance(n, Neg):
            return -ev(n.child)
        if isinstance(n, Pow):
            return tower.power(ev(n.child), n.exponent)
        if isinstance(n, BinOp):
            left, right = ev(n.left), ev(n.right)
            if n.op == "+":
                return left + right
            if n.op == "-":
                return left - right
            if n.op == "*":
                return tower.mul(left, right)
            return tower.div(left, right)
        raise TypeError(f"not an expression node: {n!r}")

    return ev(node)


_PRECEDENCE_ATOM = 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return _PRECEDENCE_ATOM


def format_expr(node) -> str:
    """Render a tree back to the grammar; reparsing yields an identical
    tree (literals are assumed nonnegative, as the parser produces)."""
    if isinstance(node, RationalLiteral):
        return str(node.value)
    if isinstance(node, GeneratorRef):
        return f"g{node.index}"
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Sqrt):
        return f"sqrt({format_expr(node.child)})"
    if isinstance(node, Neg):
        inner = format_expr(node.child)
        if _prec(node.child) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        base = format_expr(node.child)
        if _prec(node.child) < _PRECEDENCE_ATOM:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, BinOp):
        prec = _prec(node)
        left = format_expr(node.left)
        if _prec(node.left) < prec:
            left = f"({left})"
        right = format_expr(node.right)
        if _prec(node.right) <= prec:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")

"""Type language of the bracketed displacement calculus and its exponential extensions.

Formulas are immutable trees.  Every formula carries a *sort* (its number of gap
points); construction rejects ill-sorted combinations, so any formula you can
build is well formed.  The module also provides the bracket-count and length
measures used by the terminating proof search, and the ASCII concrete syntax::

    F ::= atom | '(' F ')' | F '/' F | F '\\' F | F '*' F | 'I' | 'J'
        | F 'up{' k '}' F | F 'dn{' k '}' F | F 'o{' k '}' F
        | '<>' F | '[]-' F | '!' F | '?' F

with ``/``, ``\\``, ``*`` and the wrap operators left-associative at equal
precedence and the unary operators binding tightest.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class FormulaError(ValueError):
    """Raised for ill-sorted or otherwise ill-formed formulas."""


RESERVED_WORDS = frozenset({"I", "J", "up", "dn", "o"})


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not self.name or self.name in RESERVED_WORDS:
            raise FormulaError(f"bad atom name: {self.name!r}")


@dataclass(frozen=True)
class Over(Formula):
    """C/B: looks right for a B to give a C."""

    c: Formula
    b: Formula

    def __post_init__(self):
        if sort(self.c) - sort(self.b) < 0:
            raise FormulaError(f"negative sort: {self.c}/{self.b}")


@dataclass(frozen=True)
class Under(Formula):
    """A\\C: looks left for an A to give a C."""

    a: Formula
    c: Formula

    def __post_init__(self):
        if sort(self.c) - sort(self.a) < 0:
            raise FormulaError(f"negative sort: {self.a}\\{self.c}")


@dataclass(frozen=True)
class Prod(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class UnitI(Formula):
    """Unit of concatenation; sort 0."""


@dataclass(frozen=True)
class UnitJ(Formula):
    """Unit of wrapping; sort 1."""


@dataclass(frozen=True)
class CircUp(Formula):
    """C↑ₖB: C missing a B infixed at its k-th gap point."""

    k: int
    c: Formula
    b: Formula

    def __post_init__(self):
        s = sort(self.c) - sort(self.b) + 1
        if s < 0:
            raise FormulaError(f"negative sort: up{{{self.k}}} on {self.c}, {self.b}")
        if not 1 <= self.k <= s:
            raise FormulaError(f"wrap index {self.k} out of range 1..{s}")


@dataclass(frozen=True)
class CircDown(Formula):
    """A↓ₖC: infixes at the k-th gap point of an A to give a C."""

    k: int
    a: Formula
    c: Formula

    def __post_init__(self):
        if sort(self.c) - sort(self.a) + 1 < 0:
            raise FormulaError(f"negative sort: dn{{{self.k}}} on {self.a}, {self.c}")
        if not 1 <= self.k <= sort(self.a):
            raise FormulaError(f"wrap index {self.k} out of range 1..{sort(self.a)}")


@dataclass(frozen=True)
class WProd(Formula):
    """A⊙ₖB: an A with a B plugged into its k-th gap point."""

    k: int
    a: Formula
    b: Formula

    def __post_init__(self):
        if not 1 <= self.k <= sort(self.a):
            raise FormulaError(f"wrap index {self.k} out of range 1..{sort(self.a)}")


@dataclass(frozen=True)
class BracketInv(Formula):
    """[]⁻¹A: usable only inside a bracketed domain."""

    a: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    """⟨⟩A: creates a bracketed domain."""

    a: Formula


@dataclass(frozen=True)
class Bang(Formula):
    """!A: licenses controlled permutation and contraction."""

    a: Formula

    def __post_init__(self):
        if sort(self.a) != 0:
            raise FormulaError("! applies to sort-0 formulas only")


@dataclass(frozen=True)
class Quest(Formula):
    """?A: licenses the mingle rule (iterated occurrences)."""

    a: Formula

    def __post_init__(self):
        if sort(self.a) != 0:
            raise FormulaError("? applies to sort-0 formulas only")


@lru_cache(maxsize=None)
def sort(f: Formula) -> int:
    """Number of gap points of a formula."""
    match f:
        case Atom() | UnitI():
            return 0
        case UnitJ():
            return 1
        case Over(c, b):
            return sort(c) - sort(b)
        case Under(a, c):
            return sort(c) - sort(a)
        case Prod(a, b):
            return sort(a) + sort(b)
        case CircUp(_, c, b):
            return sort(c) - sort(b) + 1
        case CircDown(_, a, c):
            return sort(c) - sort(a) + 1
        case WProd(_, a, b):
            return sort(a) + sort(b) - 1
        case BracketInv(a) | Diamond(a) | Bang(a) | Quest(a):
            return sort(a)
    raise FormulaError(f"unknown formula {f!r}")


@lru_cache(maxsize=None)
def bracket_count_formula(f: Formula) -> int:
    """Bracket count of a formula.  May be negative."""
    match f:
        case Atom() | UnitI() | UnitJ():
            return 0
        case Prod(a, b) | WProd(_, a, b):
            return bracket_count_formula(a) + bracket_count_formula(b)
        case Over(c, b) | CircUp(_, c, b):
            return bracket_count_formula(c) - bracket_count_formula(b)
        case Under(a, c) | CircDown(_, a, c):
            return bracket_count_formula(c) - bracket_count_formula(a)
        case Diamond(a):
            return bracket_count_formula(a) + 1
        case BracketInv(a):
            return bracket_count_formula(a) - 1
        case Bang(a) | Quest(a):
            return bracket_count_formula(a)
    raise FormulaError(f"unknown formula {f!r}")


@lru_cache(maxsize=None)
def length_formula(f: Formula) -> int:
    """Number of connectives; the units I and J count one each."""
    match f:
        case Atom():
            return 0
        case UnitI() | UnitJ():
            return 1
        case Over(x, y) | Under(x, y) | Prod(x, y):
            return 1 + length_formula(x) + length_formula(y)
        case CircUp(_, x, y) | CircDown(_, x, y) | WProd(_, x, y):
            return 1 + length_formula(x) + length_formula(y)
        case BracketInv(a) | Diamond(a) | Bang(a) | Quest(a):
            return 1 + length_formula(a)
    raise FormulaError(f"unknown formula {f!r}")


def _has_bracket_modality(f: Formula) -> bool:
    match f:
        case Diamond(_) | BracketInv(_):
            return True
        case Atom() | UnitI() | UnitJ():
            return False
        case Over(x, y) | Under(x, y) | Prod(x, y):
            return _has_bracket_modality(x) or _has_bracket_modality(y)
        case CircUp(_, x, y) | CircDown(_, x, y) | WProd(_, x, y):
            return _has_bracket_modality(x) or _has_bracket_modality(y)
        case Bang(a) | Quest(a):
            return _has_bracket_modality(a)
    raise FormulaError(f"unknown formula {f!r}")


def is_polar_bracket_nonneg(f: Formula) -> bool:
    """True iff no bracket modality occurs under an exponential anywhere in f.

    This is the conservative reading of the restriction under which proof
    search in the bracket-contraction calculus is finite.
    """
    match f:
        case Bang(a) | Quest(a):
            return not _has_bracket_modality(a)
        case Atom() | UnitI() | UnitJ():
            return True
        case Over(x, y) | Under(x, y) | Prod(x, y):
            return is_polar_bracket_nonneg(x) and is_polar_bracket_nonneg(y)
        case CircUp(_, x, y) | CircDown(_, x, y) | WProd(_, x, y):
            return is_polar_bracket_nonneg(x) and is_polar_bracket_nonneg(y)
        case BracketInv(a) | Diamond(a):
            return is_polar_bracket_nonneg(a)
    raise FormulaError(f"unknown formula {f!r}")


def subformulas(f: Formula) -> set[Formula]:
    out = {f}
    match f:
        case Over(x, y) | Under(x, y) | Prod(x, y):
            out |= subformulas(x) | subformulas(y)
        case CircUp(_, x, y) | CircDown(_, x, y) | WProd(_, x, y):
            out |= subformulas(x) | subformulas(y)
        case BracketInv(a) | Diamond(a) | Bang(a) | Quest(a):
            out |= subformulas(a)
    return out


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------

# Token kinds: IDENT I J WRAP(/ op,k) SLASH BACK STAR BANG QUEST DIA BRINV
#              LPAR RPAR LBRACK RBRACK LBRACE RBRACE COLON COMMA NUM ARROW END


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    pos: int


class SyntaxErrorAt(FormulaError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("[]-", i):
            toks.append(Token("BRINV", "[]-", i))
            i += 3
        elif text.startswith("<>", i):
            toks.append(Token("DIA", "<>", i))
            i += 2
        elif text.startswith("=>", i):
            toks.append(Token("ARROW", "=>", i))
            i += 2
        elif ch in "()[]{}:,":
            kind = {"(": "LPAR", ")": "RPAR", "[": "LBRACK", "]": "RBRACK",
                    "{": "LBRACE", "}": "RBRACE", ":": "COLON", ",": "COMMA"}[ch]
            toks.append(Token(kind, ch, i))
            i += 1
        elif ch in "/\\*!?":
            kind = {"/": "SLASH", "\\": "BACK", "*": "STAR", "!": "BANG", "?": "QUEST"}[ch]
            toks.append(Token(kind, ch, i))
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("NUM", int(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word in ("up", "dn", "o") and j < n and text[j] == "{":
                k = j + 1
                m = k
                while m < n and text[m].isdigit():
                    m += 1
                if m == k or m >= n or text[m] != "}":
                    raise SyntaxErrorAt(f"malformed wrap operator {word}{{...}}", i)
                toks.append(Token("WRAP", (word, int(text[k:m])), i))
                i = m + 1
                continue
            if word == "I":
                toks.append(Token("I", word, i))
            elif word == "J":
                toks.append(Token("J", word, i))
            elif word in RESERVED_WORDS:
                raise SyntaxErrorAt(f"reserved word {word!r} cannot be an atom", i)
            else:
                toks.append(Token("IDENT", word, i))
            i = j
        else:
            raise SyntaxErrorAt(f"unexpected character {ch!r}", i)
    toks.append(Token("END", None, n))
    return toks


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.next()
        if t.kind != kind:
            raise SyntaxErrorAt(f"expected {kind}, got {t.kind}", t.pos)
        return t


_BINOPS = {"SLASH", "BACK", "STAR", "WRAP"}


def parse_formula_tokens(ts: TokenStream) -> Formula:
    left = _parse_unary(ts)
    while ts.peek().kind in _BINOPS:
        op = ts.next()
        right = _parse_unary(ts)
        if op.kind == "SLASH":
            left = Over(left, right)
        elif op.kind == "BACK":
            left = Under(left, right)
        elif op.kind == "STAR":
            left = Prod(left, right)
        else:
            word, k = op.value
            if word == "up":
                left = CircUp(k, left, right)
            elif word == "dn":
                left = CircDown(k, left, right)
            else:
                left = WProd(k, left, right)
    return left


def _parse_unary(ts: TokenStream) -> Formula:
    t = ts.peek()
    if t.kind == "BANG":
        ts.next()
        return Bang(_parse_unary(ts))
    if t.kind == "QUEST":
        ts.next()
        return Quest(_parse_unary(ts))
    if t.kind == "DIA":
        ts.next()
        return Diamond(_parse_unary(ts))
    if t.kind == "BRINV":
        ts.next()
        return BracketInv(_parse_unary(ts))
    if t.kind == "LPAR":
        ts.next()
        f = parse_formula_tokens(ts)
        ts.expect("RPAR")
        return f
    if t.kind == "I":
        ts.next()
        return UnitI()
    if t.kind == "J":
        ts.next()
        return UnitJ()
    if t.kind == "IDENT":
        ts.next()
        return Atom(t.value)
    raise SyntaxErrorAt(f"expected a formula, got {t.kind}", t.pos)


def parse_formula(text: str) -> Formula:
    ts = TokenStream(tokenize(text))
    f = parse_formula_tokens(ts)
    ts.expect("END")
    return f


# precedence levels: 1 binary, 2 unary, 3 atomic
def _show(f: Formula, level: int) -> str:
    match f:
        case Atom(name):
            s, mine = name, 3
        case UnitI():
            s, mine = "I", 3
        case UnitJ():
            s, mine = "J", 3
        case Over(c, b):
            s, mine = f"{_show(c, 1)}/{_show(b, 2)}", 1
        case Under(a, c):
            s, mine = f"{_show(a, 1)}\\{_show(c, 2)}", 1
        case Prod(a, b):
            s, mine = f"{_show(a, 1)}*{_show(b, 2)}", 1
        case CircUp(k, c, b):
            s, mine = f"{_show(c, 1)} up{{{k}}} {_show(b, 2)}", 1
        case CircDown(k, a, c):
            s, mine = f"{_show(a, 1)} dn{{{k}}} {_show(c, 2)}", 1
        case WProd(k, a, b):
            s, mine = f"{_show(a, 1)} o{{{k}}} {_show(b, 2)}", 1
        case BracketInv(a):
            s, mine = f"[]-{_show(a, 2)}", 2
        case Diamond(a):
            s, mine = f"<>{_show(a, 2)}", 2
        case Bang(a):
            s, mine = f"!{_show(a, 2)}", 2
        case Quest(a):
            s, mine = f"?{_show(a, 2)}", 2
        case _:
            raise FormulaError(f"unknown formula {f!r}")
    return f"({s})" if mine < level else s


def show_formula(f: Formula) -> str:
    return _show(f, 1)

"""Lexicons and sentence parsing.

A lexicon file is UTF-8 lines of the form ``word : TYPE : TERM`` with ``#``
comments and an optional ``%calculus NAME`` header; duplicate words accumulate
alternative entries.  Sentences are whitespace-separated tokens; ``[`` and
``]`` tokens wrap spans in bracketed domains (islands).  Parsing builds one
sequent per combination of lexical choices, proves it, and returns each
derivation with its normalized, combinator-reduced semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .config import Brack, Config, ConfigError, Item, Sequent, vector
from .formula import Formula, FormulaError, parse_formula
from .rules import DB_BANG_B_QUEST_R, CalculusVariant, VariantError, formula_allowed
from .search import Derivation, SearchBudget, prove
from . import semantics


class LexiconError(ValueError):
    pass


VARIANT_BY_NAME = {
    "db": "db",
    "db-bang": "db-bang",
    "db-bang-quest": "db-bang-quest",
    "db-bang-b": "db-bang-b",
    "db-bang-b-quest-r": "db-bang-b-quest-r",
}


@dataclass
class Lexicon:
    entries: dict[str, list[tuple[Formula, semantics.SemTerm]]] = field(default_factory=dict)
    variant: CalculusVariant = DB_BANG_B_QUEST_R

    def add(self, word: str, formula: Formula, term: semantics.SemTerm) -> None:
        self.entries.setdefault(word, []).append((formula, term))

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def parse_lexicon_text(text: str, source: str = "<lexicon>") -> Lexicon:
    lex = Lexicon()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "calculus":
                name = VARIANT_BY_NAME.get(parts[1])
                if name is None:
                    raise LexiconError(f"{source}:{lineno}: unknown calculus {parts[1]!r}")
                lex.variant = CalculusVariant(name)
                continue
            raise LexiconError(f"{source}:{lineno}: bad directive {line!r}")
        fields = line.split(":", 2)
        if len(fields) != 3:
            raise LexiconError(f"{source}:{lineno}: expected 'word : TYPE : TERM'")
        word = fields[0].strip()
        if not word:
            raise LexiconError(f"{source}:{lineno}: empty word")
        try:
            formula = parse_formula(fields[1].strip())
        except FormulaError as e:
            raise LexiconError(f"{source}:{lineno}: bad type: {e}") from e
        if not formula_allowed(formula, lex.variant):
            raise LexiconError(
                f"{source}:{lineno}: type of {word!r} uses connectives outside {lex.variant.tag}")
        try:
            term = semantics.parse_term(fields[2].strip())
        except semantics.TermError as e:
            raise LexiconError(f"{source}:{lineno}: bad term: {e}") from e
        free = semantics.free_vars(term)
        if free:
            raise LexiconError(f"{source}:{lineno}: term is not closed: free {sorted(free)}")
        lex.add(word, formula, term)
    return lex


def load_lexicon(path: str) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon_text(fh.read(), source=path)


# ---------------------------------------------------------------------------
# Sentence parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParseRequest:
    tokens: tuple  # words and well-nested "[" / "]" markers
    goal: Formula
    variant: CalculusVariant
    budget: SearchBudget


@dataclass
class ParseResult:
    derivation: Derivation
    term: semantics.SemTerm
    entries: tuple[tuple[str, Formula], ...]  # word, chosen type


def tokenize_sentence(text: str) -> tuple:
    tokens = tuple(text.split())
    depth = 0
    for t in tokens:
        if t == "[":
            depth += 1
        elif t == "]":
            depth -= 1
            if depth < 0:
                raise LexiconError("unbalanced ] in sentence")
    if depth != 0:
        raise LexiconError("unbalanced [ in sentence")
    return tokens


def _words(tokens) -> list[str]:
    return [t for t in tokens if t not in ("[", "]")]


def _build_config(tokens, items: list[Item]) -> Config:
    out: list[Item] = []
    stack: list[list[Item]] = [out]
    it = iter(items)
    for t in tokens:
        if t == "[":
            stack.append([])
        elif t == "]":
            inner = tuple(stack.pop())
            stack[-1].append(Brack(inner))
        else:
            stack[-1].append(next(it))
    return tuple(out)


def parse_sentence(req: ParseRequest, lex: Lexicon) -> list[ParseResult]:
    """Prove token sequents for every combination of lexical choices.

    Semantics come back normalized and combinator-reduced.  Unknown words
    raise, listing every missing token.
    """
    words = _words(req.tokens)
    missing = sorted({w for w in words if w not in lex})
    if missing:
        raise LexiconError(f"unknown words: {', '.join(missing)}")
    results: list[ParseResult] = []
    for choice in itertools.product(*(lex.entries[w] for w in words)):
        labels = [f"x{i}" for i in range(len(words))]
        items = [vector(formula, lbl) for (formula, _), lbl in zip(choice, labels)]
        try:
            goal = Sequent(_build_config(req.tokens, items), req.goal)
        except ConfigError:
            continue  # sort-unbalanced lexical combination
        for deriv in prove(goal, req.variant, req.budget):
            term = semantics.extract(deriv)
            term = semantics.subst(term, {lbl: t for lbl, (_, t) in zip(labels, choice)})
            term = semantics.normalize(term)
            while True:  # combinator steps can expose new beta redexes
                reduced = semantics.normalize(semantics.reduce_combinators(term))
                if reduced == term:
                    break
                term = reduced
            results.append(ParseResult(
                deriv, term, tuple((w, f) for w, (f, _) in zip(words, choice))))
    return results

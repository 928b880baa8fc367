"""Semantic lambda terms extracted from derivations, their normalization, and
the coordination combinator rewrite system.

Terms include pairs and projections (for products), the constant 0 (for the
units), non-empty list constructors (singleton ``[t]`` and cons ``[h|t]``),
mingle ``t (+) u``, an indexed sum binder, and uninterpreted constants for
lexical semantics and the combinators.

The combinator rules rewrite applications of the non-empty-list map-apply
combinator ``alpha+`` and the arity-lowering coordination combinator
``Phin+`` left to right, innermost first, introducing the binary connectives
``∧`` and ``∨``.
"""

from __future__ import annotations

from dataclasses import dataclass


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class SemTerm:
    pass


@dataclass(frozen=True)
class Var(SemTerm):
    name: str


@dataclass(frozen=True)
class Const(SemTerm):
    name: str


@dataclass(frozen=True)
class App(SemTerm):
    fun: SemTerm
    arg: SemTerm


@dataclass(frozen=True)
class Abs(SemTerm):
    var: str
    body: SemTerm


@dataclass(frozen=True)
class Pair(SemTerm):
    left: SemTerm
    right: SemTerm


@dataclass(frozen=True)
class Proj1(SemTerm):
    t: SemTerm


@dataclass(frozen=True)
class Proj2(SemTerm):
    t: SemTerm


@dataclass(frozen=True)
class Zero(SemTerm):
    """The constant 0, semantics of both units (and the numeral zero)."""


@dataclass(frozen=True)
class Singleton(SemTerm):
    t: SemTerm


@dataclass(frozen=True)
class ConsList(SemTerm):
    head: SemTerm
    tail: SemTerm


@dataclass(frozen=True)
class Mingle(SemTerm):
    left: SemTerm
    right: SemTerm


@dataclass(frozen=True)
class BigOplus(SemTerm):
    """Indexed sum over the elements of a collection term."""

    var: str
    coll: SemTerm
    body: SemTerm


ALPHA_PLUS = Const("alpha+")
PHI_N_PLUS = Const("Phin+")
SUCC = Const("s")
AND = Const("and")
OR = Const("or")
WEDGE = Const("∧")
VEE = Const("∨")


def app(f: SemTerm, *args: SemTerm) -> SemTerm:
    for a in args:
        f = App(f, a)
    return f


def spine(t: SemTerm) -> tuple[SemTerm, list[SemTerm]]:
    args: list[SemTerm] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def numeral(n: int) -> SemTerm:
    t: SemTerm = Zero()
    for _ in range(n):
        t = App(SUCC, t)
    return t


def free_vars(t: SemTerm) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset({name})
        case Const() | Zero():
            return frozenset()
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Abs(v, b):
            return free_vars(b) - {v}
        case Pair(l, r) | Mingle(l, r) | ConsList(l, r):
            return free_vars(l) | free_vars(r)
        case Proj1(u) | Proj2(u) | Singleton(u):
            return free_vars(u)
        case BigOplus(v, coll, b):
            return free_vars(coll) | (free_vars(b) - {v})
    raise TermError(f"unknown term {t!r}")


def _fresh(name: str, avoid: frozenset[str]) -> str:
    candidate = name
    while candidate in avoid:
        candidate += "'"
    return candidate


def subst(t: SemTerm, mapping: dict[str, SemTerm]) -> SemTerm:
    """Simultaneous capture-avoiding substitution."""
    if not mapping:
        return t
    match t:
        case Var(name):
            return mapping.get(name, t)
        case Const() | Zero():
            return t
        case App(f, a):
            return App(subst(f, mapping), subst(a, mapping))
        case Pair(l, r):
            return Pair(subst(l, mapping), subst(r, mapping))
        case Mingle(l, r):
            return Mingle(subst(l, mapping), subst(r, mapping))
        case ConsList(l, r):
            return ConsList(subst(l, mapping), subst(r, mapping))
        case Proj1(u):
            return Proj1(subst(u, mapping))
        case Proj2(u):
            return Proj2(subst(u, mapping))
        case Singleton(u):
            return Singleton(subst(u, mapping))
        case Abs(v, b):
            inner = {k: r for k, r in mapping.items() if k != v}
            if not inner:
                return Abs(v, b)
            clash = frozenset().union(*(free_vars(r) for r in inner.values()))
            if v in clash:
                v2 = _fresh(v, clash | free_vars(b) | set(inner))
                b = subst(b, {v: Var(v2)})
                v = v2
            return Abs(v, subst(b, inner))
        case BigOplus(v, coll, b):
            coll2 = subst(coll, mapping)
            inner = {k: r for k, r in mapping.items() if k != v}
            if not inner:
                return BigOplus(v, coll2, b)
            clash = frozenset().union(*(free_vars(r) for r in inner.values()))
            if v in clash:
                v2 = _fresh(v, clash | free_vars(b) | set(inner))
                b = subst(b, {v: Var(v2)})
                v = v2
            return BigOplus(v, coll2, subst(b, inner))
    raise TermError(f"unknown term {t!r}")


def alpha_eq(a: SemTerm, b: SemTerm, env: tuple[tuple[str, str], ...] = ()) -> bool:
    match (a, b):
        case (Var(x), Var(y)):
            for u, v in reversed(env):
                if u == x or v == y:
                    return u == x and v == y
            return x == y
        case (Const(x), Const(y)):
            return x == y
        case (Zero(), Zero()):
            return True
        case (App(f1, a1), App(f2, a2)):
            return alpha_eq(f1, f2, env) and alpha_eq(a1, a2, env)
        case (Abs(v1, b1), Abs(v2, b2)):
            return alpha_eq(b1, b2, env + ((v1, v2),))
        case (Pair(l1, r1), Pair(l2, r2)) | (Mingle(l1, r1), Mingle(l2, r2)) | (
            ConsList(l1, r1),
            ConsList(l2, r2),
        ):
            return alpha_eq(l1, l2, env) and alpha_eq(r1, r2, env)
        case (Proj1(u1), Proj1(u2)) | (Proj2(u1), Proj2(u2)) | (Singleton(u1), Singleton(u2)):
            return alpha_eq(u1, u2, env)
        case (BigOplus(v1, c1, b1), BigOplus(v2, c2, b2)):
            return alpha_eq(c1, c2, env) and alpha_eq(b1, b2, env + ((v1, v2),))
    return False


# ---------------------------------------------------------------------------
# Beta / projection normalization
# ---------------------------------------------------------------------------


def _beta_step(t: SemTerm) -> SemTerm | None:
    """One leftmost-outermost beta or projection step, or None if normal."""
    match t:
        case App(Abs(v, b), a):
            return subst(b, {v: a})
        case Proj1(Pair(l, _)):
            return l
        case Proj2(Pair(_, r)):
            return r
    children = _children(t)
    for i, c in enumerate(children):
        r = _beta_step(c)
        if r is not None:
            return _rebuild(t, i, r)
    return None


def _children(t: SemTerm) -> tuple[SemTerm, ...]:
    match t:
        case App(f, a):
            return (f, a)
        case Abs(_, b):
            return (b,)
        case Pair(l, r) | Mingle(l, r) | ConsList(l, r):
            return (l, r)
        case Proj1(u) | Proj2(u) | Singleton(u):
            return (u,)
        case BigOplus(_, coll, b):
            return (coll, b)
    return ()


def _rebuild(t: SemTerm, i: int, new: SemTerm) -> SemTerm:
    match t:
        case App(f, a):
            return App(new, a) if i == 0 else App(f, new)
        case Abs(v, _):
            return Abs(v, new)
        case Pair(l, r):
            return Pair(new, r) if i == 0 else Pair(l, new)
        case Mingle(l, r):
            return Mingle(new, r) if i == 0 else Mingle(l, new)
        case ConsList(l, r):
            return ConsList(new, r) if i == 0 else ConsList(l, new)
        case Proj1(_):
            return Proj1(new)
        case Proj2(_):
            return Proj2(new)
        case Singleton(_):
            return Singleton(new)
        case BigOplus(v, coll, b):
            return BigOplus(v, new, b) if i == 0 else BigOplus(v, coll, new)
    raise TermError(f"cannot rebuild {t!r}")


def normalize(t: SemTerm, max_steps: int = 10000) -> SemTerm:
    """Beta- and projection-normal form.

    Terms extracted from derivations are simply typed, so this terminates;
    the step ceiling is a guard against misuse on arbitrary terms.
    """
    for _ in range(max_steps):
        r = _beta_step(t)
        if r is None:
            return t
        t = r
    raise TermError("normalization step ceiling exceeded")


# ---------------------------------------------------------------------------
# Combinator rewriting
# ---------------------------------------------------------------------------


def _combinator_root(t: SemTerm) -> SemTerm | None:
    head, args = spine(t)
    if head == ALPHA_PLUS and len(args) == 2:
        lst, w = args
        if isinstance(lst, Singleton):
            return Singleton(App(lst.t, w))
        if isinstance(lst, ConsList):
            return ConsList(App(lst.head, w), app(ALPHA_PLUS, lst.tail, w))
    if head == PHI_N_PLUS:
        if len(args) == 4 and args[0] == Zero() and args[1] in (AND, OR):
            conn = WEDGE if args[1] == AND else VEE
            x, lst = args[2], args[3]
            if isinstance(lst, Singleton):
                return Singleton(app(conn, lst.t, x))
            if isinstance(lst, ConsList):
                rest = app(PHI_N_PLUS, Zero(), args[1], x, lst.tail)
                return Singleton(app(conn, lst.head, rest))
        if len(args) == 5 and isinstance(args[0], App) and args[0].fun == SUCC:
            n, c, x, y, z = args[0].arg, args[1], args[2], args[3], args[4]
            return app(PHI_N_PLUS, n, c, App(x, z), app(ALPHA_PLUS, y, z))
    return None


def _combinator_step(t: SemTerm) -> SemTerm | None:
    """One leftmost-innermost combinator rewrite, or None."""
    for i, c in enumerate(_children(t)):
        r = _combinator_step(c)
        if r is not None:
            return _rebuild(t, i, r)
    return _combinator_root(t)


def reduce_combinators_trace(t: SemTerm, max_steps: int = 10000) -> list[SemTerm]:
    """All intermediate terms of the combinator reduction, initial term first."""
    trace = [t]
    for _ in range(max_steps):
        r = _combinator_step(t)
        if r is None:
            return trace
        t = r
        trace.append(t)
    raise TermError("combinator rewriting step ceiling exceeded")


def reduce_combinators(t: SemTerm) -> SemTerm:
    """Rewrite alpha+ / Phin+ applications to fixpoint; stuck terms stay inert."""
    return reduce_combinators_trace(t)[-1]


# ---------------------------------------------------------------------------
# Extraction from derivations
# ---------------------------------------------------------------------------


def extract(derivation) -> SemTerm:
    """Assemble the semantic term of a derivation, unnormalized.

    The derivation's sequents must carry distinct variable labels on their
    antecedent occurrences (the prover produces these).
    """
    from .config import hole_contents  # local import keeps module layering flat

    apply_ = derivation.app
    labels = [o.label for o in _occs(apply_.conclusion.antecedent)]
    if any(lbl is None for lbl in labels) or len(set(labels)) != len(labels):
        raise TermError("antecedent occurrences must carry distinct labels")
    terms = [extract(c) for c in derivation.children]
    rule = apply_.rule.value
    b = apply_.binding

    def hole() -> tuple:
        return hole_contents(b.ctx, apply_.conclusion.antecedent)

    if rule == "Id":
        return Var(b.vars[0])
    if rule in ("IR", "JR"):
        return Zero()
    if rule in ("IL", "JL", "[]-L", "[]-R", "<>L", "<>R", "!L", "!R", "!P<", "!P>"):
        return terms[0]
    if rule in ("/L", "up_L"):
        x, z = b.vars
        return subst(terms[1], {z: App(Var(x), terms[0])})
    if rule in ("\\L", "dn_L"):
        y, z = b.vars
        return subst(terms[1], {z: App(Var(y), terms[0])})
    if rule in ("/R", "up_R"):
        return Abs(b.vars[0], terms[0])
    if rule in ("\\R", "dn_R"):
        return Abs(b.vars[0], terms[0])
    if rule in ("*L", "o_L"):
        z, x, y = b.vars
        return subst(terms[0], {x: Proj1(Var(z)), y: Proj2(Var(z))})
    if rule in ("*R", "o_R"):
        return Pair(terms[0], terms[1])
    if rule in ("!C", "!Cb"):
        xs = [item.label for item in hole()[:len(b.vars)]]
        return subst(terms[0], {y: Var(x) for x, y in zip(xs, b.vars)})
    if rule == "?L":
        z = hole()[0].label
        return BigOplus(b.vars[0], Var(z), terms[0])
    if rule == "?R":
        return Singleton(terms[0])
    if rule == "?M":
        return Mingle(terms[0], terms[1])
    if rule == "?Mr":
        return ConsList(terms[0], terms[1])
    if rule == "?E":
        z1, z2 = (item.label for item in hole())
        return subst(terms[0], {b.vars[0]: Mingle(Var(z1), Var(z2))})
    if rule == "Cut":
        return subst(terms[1], {b.vars[0]: terms[0]})
    raise TermError(f"no extraction recipe for rule {rule}")


def _occs(config):
    from .config import occurrences

    return occurrences(config)


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------

_RESERVED = {"p1", "p2", "oplus", "in"}


def _tok_terms(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("(+)", i):
            toks.append(("MINGLE", "(+)", i))
            i += 3
        elif text.startswith("/\\", i):
            toks.append(("IDENT", "∧", i))
            i += 2
        elif text.startswith("\\/", i):
            toks.append(("IDENT", "∨", i))
            i += 2
        elif ch in "()<>[]{}.,|":
            kinds = {"(": "LPAR", ")": "RPAR", "<": "LANG", ">": "RANG", "[": "LSQ",
                     "]": "RSQ", "{": "LBRACE", "}": "RBRACE", ".": "DOT", ",": "COMMA",
                     "|": "BAR"}
            toks.append((kinds[ch], ch, i))
            i += 1
        elif ch in ("λ", "\\"):
            toks.append(("LAM", ch, i))
            i += 1
        elif ch in ("⟨", "⟩"):
            toks.append(("LANG" if ch == "⟨" else "RANG", ch, i))
            i += 1
        elif ch in ("∧", "∨"):
            toks.append(("IDENT", ch, i))
            i += 1
        elif ch == "0":
            toks.append(("ZERO", "0", i))
            i += 1
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'+"):
                j += 1
            toks.append(("IDENT", text[i:j], i))
            i = j
        else:
            raise TermError(f"unexpected character {ch!r} in term (position {i})")
    toks.append(("END", "", n))
    return toks


class _TermParser:
    def __init__(self, text: str):
        self.toks = _tok_terms(text)
        self.i = 0
        self.bound: list[str] = []

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        k, v, pos = self.next()
        if k != kind:
            raise TermError(f"expected {kind}, got {k} at {pos}")
        return v

    def parse(self) -> SemTerm:
        t = self.term()
        if self.peek()[0] != "END":
            raise TermError(f"trailing input at {self.peek()[2]}")
        return t

    def term(self) -> SemTerm:
        left = self.atom()
        while self.peek()[0] == "MINGLE":
            self.next()
            left = Mingle(left, self.atom())
        return left

    def atom(self) -> SemTerm:
        k, v, pos = self.peek()
        if k == "LAM":
            self.next()
            name = self.expect("IDENT")
            self.expect("DOT")
            self.bound.append(name)
            body = self.term()
            self.bound.pop()
            return Abs(name, body)
        if k == "LPAR":
            self.next()
            t = self.term()
            while self.peek()[0] not in ("RPAR", "END"):
                nk, nv, _ = self.peek()
                if nk == "IDENT" and nv in ("∧", "∨"):
                    self.next()
                    conn = WEDGE if nv == "∧" else VEE
                    rhs = self.atom()
                    t = app(conn, t, rhs)
                elif nk == "MINGLE":
                    self.next()
                    t = Mingle(t, self.atom())
                else:
                    t = App(t, self.atom())
            self.expect("RPAR")
            return t
        if k == "LANG":
            self.next()
            l = self.term()
            self.expect("COMMA")
            r = self.term()
            self.expect("RANG")
            return Pair(l, r)
        if k == "LSQ":
            self.next()
            elems = [self.term()]
            tail = None
            while self.peek()[0] == "COMMA":
                self.next()
                elems.append(self.term())
            if self.peek()[0] == "BAR":
                self.next()
                tail = self.term()
            self.expect("RSQ")
            t = tail if tail is not None else Singleton(elems.pop())
            for e in reversed(elems):
                t = ConsList(e, t)
            return t
        if k == "ZERO":
            self.next()
            return Zero()
        if k == "IDENT":
            self.next()
            if v == "p1":
                return Proj1(self.atom())
            if v == "p2":
                return Proj2(self.atom())
            if v == "oplus":
                self.expect("LBRACE")
                name = self.expect("IDENT")
                inw = self.expect("IDENT")
                if inw != "in":
                    raise TermError(f"expected 'in' in oplus binder at {pos}")
                coll = self.term()
                self.expect("RBRACE")
                self.bound.append(name)
                body = self.atom()
                self.bound.pop()
                return BigOplus(name, coll, body)
            if v in self.bound:
                return Var(v)
            return Const(v)
        raise TermError(f"expected a term, got {k} at {pos}")


def parse_term(text: str) -> SemTerm:
    """Parse a term; identifiers not bound by λ or oplus become constants."""
    return _TermParser(text).parse()


def show_term(t: SemTerm) -> str:
    match t:
        case Var(name) | Const(name):
            return name
        case Zero():
            return "0"
        case App(App(Const("∧"), l), r):
            return f"({show_term(l)} ∧ {show_term(r)})"
        case App(App(Const("∨"), l), r):
            return f"({show_term(l)} ∨ {show_term(r)})"
        case App():
            head, args = spine(t)
            inner = " ".join(show_term(x) for x in [head, *args])
            return f"({inner})"
        case Abs(v, b):
            return f"λ{v}.{show_term(b)}"
        case Pair(l, r):
            return f"⟨{show_term(l)},{show_term(r)}⟩"
        case Proj1(u):
            return f"p1 {_show_atomic(u)}"
        case Proj2(u):
            return f"p2 {_show_atomic(u)}"
        case Singleton(u):
            return f"[{show_term(u)}]"
        case ConsList(h, tl):
            return f"[{show_term(h)}|{show_term(tl)}]"
        case Mingle(l, r):
            return f"({show_term(l)} (+) {show_term(r)})"
        case BigOplus(v, coll, b):
            return f"oplus{{{v} in {show_term(coll)}}} {_show_atomic(b)}"
    raise TermError(f"unknown term {t!r}")


def _show_atomic(t: SemTerm) -> str:
    s = show_term(t)
    if isinstance(t, (Var, Const, Zero, Singleton, ConsList, Pair)) or s.startswith("("):
        return s
    return f"({s})"

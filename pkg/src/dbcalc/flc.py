"""The full Lambek calculus with contraction (FLC), its !-controlled
counterpart (FLC!), and the connective-wise embedding translation between
them.

FLC sequents are flat lists of /, \\, &, (+) formulas; contraction applies to
arbitrary nonempty antecedent segments (the sequence form is what makes the
Cut-free calculus complete).  FLC! replaces free contraction by !-marked
formulas with commutative moves and block contraction, plus dereliction and
promotion.  The translation bangs every argument position:

    atoms fixed,  (B/A) -> B/!A,  (A\\B) -> !A\\B,
    (A(+)B) -> !A(+)!B,  (A&B) pointwise,  and  D => A  ->  !D => A.

Both sides get exhaustive height-bounded backward provers so the embedding
can be verified empirically on small corpora.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field


class FLCError(ValueError):
    pass


@dataclass(frozen=True)
class FLCFormula:
    pass


@dataclass(frozen=True)
class FAtom(FLCFormula):
    name: str


@dataclass(frozen=True)
class FOver(FLCFormula):
    b: FLCFormula
    a: FLCFormula


@dataclass(frozen=True)
class FUnder(FLCFormula):
    a: FLCFormula
    b: FLCFormula


@dataclass(frozen=True)
class FWith(FLCFormula):
    a: FLCFormula
    b: FLCFormula


@dataclass(frozen=True)
class FPlus(FLCFormula):
    a: FLCFormula
    b: FLCFormula


@dataclass(frozen=True)
class FBang(FLCFormula):
    a: FLCFormula


@dataclass(frozen=True)
class FLCSequent:
    antecedent: tuple[FLCFormula, ...]
    succedent: FLCFormula


def is_bang_free(f: FLCFormula) -> bool:
    match f:
        case FAtom():
            return True
        case FBang(_):
            return False
        case FOver(x, y) | FUnder(x, y) | FWith(x, y) | FPlus(x, y):
            return is_bang_free(x) and is_bang_free(y)
    raise FLCError(f"unknown formula {f!r}")


def translate(f: FLCFormula) -> FLCFormula:
    """The embedding on formulas; input must be !-free."""
    match f:
        case FAtom():
            return f
        case FOver(b, a):
            return FOver(translate(b), FBang(translate(a)))
        case FUnder(a, b):
            return FUnder(FBang(translate(a)), translate(b))
        case FPlus(a, b):
            return FPlus(FBang(translate(a)), FBang(translate(b)))
        case FWith(a, b):
            return FWith(translate(a), translate(b))
        case FBang(_):
            raise FLCError("translation input must be !-free")
    raise FLCError(f"unknown formula {f!r}")


def translate_sequent(s: FLCSequent) -> FLCSequent:
    return FLCSequent(
        tuple(FBang(translate(a)) for a in s.antecedent),
        translate(s.succedent),
    )


def flc_length(f: FLCFormula) -> int:
    match f:
        case FAtom():
            return 0
        case FBang(a):
            return 1 + flc_length(a)
        case FOver(x, y) | FUnder(x, y) | FWith(x, y) | FPlus(x, y):
            return 1 + flc_length(x) + flc_length(y)
    raise FLCError(f"unknown formula {f!r}")


# ---------------------------------------------------------------------------
# Backward rule expansion
# ---------------------------------------------------------------------------


def _flc_expansions(s: FLCSequent) -> list[tuple[FLCSequent, ...]]:
    """Premise tuples of every FLC rule instance concluding s (no axioms)."""
    G, D = s.antecedent, s.succedent
    out: list[tuple[FLCSequent, ...]] = []

    match D:
        case FOver(b, a):
            out.append((FLCSequent(G + (a,), b),))
        case FUnder(a, b):
            out.append((FLCSequent((a,) + G, b),))
        case FWith(a, b):
            out.append((FLCSequent(G, a), FLCSequent(G, b)))
        case FPlus(a, b):
            out.append((FLCSequent(G, a),))
            out.append((FLCSequent(G, b),))

    n = len(G)
    for i, f in enumerate(G):
        rest_l, rest_r = G[:i], G[i + 1:]
        match f:
            case FOver(b, a):
                # D1, B/A, G, D2 => C  from  G => A  and  D1, B, D2 => C
                for j in range(i + 1, n + 1):
                    out.append((
                        FLCSequent(G[i + 1:j], a),
                        FLCSequent(rest_l + (b,) + G[j:], D),
                    ))
            case FUnder(a, b):
                for j in range(0, i + 1):
                    out.append((
                        FLCSequent(G[j:i], a),
                        FLCSequent(G[:j] + (b,) + rest_r, D),
                    ))
            case FWith(a, b):
                out.append((FLCSequent(rest_l + (a,) + rest_r, D),))
                out.append((FLCSequent(rest_l + (b,) + rest_r, D),))
            case FPlus(a, b):
                out.append((
                    FLCSequent(rest_l + (a,) + rest_r, D),
                    FLCSequent(rest_l + (b,) + rest_r, D),
                ))

    # segment contraction: duplicate any nonempty antecedent segment
    for i in range(n):
        for j in range(i + 1, n + 1):
            out.append((FLCSequent(G[:j] + G[i:j] + G[j:], D),))
    return out


# FLC! is the full Lambek calculus whose only structural licence is the
# !-marked one: dereliction, promotion, and contraction of contiguous all-!
# segments.  No permutation: the embedding's source calculus is order
# sensitive, so its !-controlled target must be too, or the back direction
# fails (e.g. q/p => p\q is not FLC-derivable, but its translation would be
# derivable if !-formulas could cross the functor).


def _bang_expansions(s: FLCSequent) -> list[tuple[FLCSequent, ...]]:
    G, D = s.antecedent, s.succedent
    out: list[tuple[FLCSequent, ...]] = []

    match D:
        case FOver(b, a):
            out.append((FLCSequent(G + (a,), b),))
        case FUnder(a, b):
            out.append((FLCSequent((a,) + G, b),))
        case FWith(a, b):
            out.append((FLCSequent(G, a), FLCSequent(G, b)))
        case FPlus(a, b):
            out.append((FLCSequent(G, a),))
            out.append((FLCSequent(G, b),))
        case FBang(a):
            if all(isinstance(x, FBang) for x in G):  # promotion
                out.append((FLCSequent(G, a),))

    n = len(G)
    for i, f in enumerate(G):
        rest_l, rest_r = G[:i], G[i + 1:]
        match f:
            case FOver(b, a):
                for j in range(i + 1, n + 1):
                    out.append((
                        FLCSequent(G[i + 1:j], a),
                        FLCSequent(rest_l + (b,) + G[j:], D),
                    ))
            case FUnder(a, b):
                for j in range(0, i + 1):
                    out.append((
                        FLCSequent(G[j:i], a),
                        FLCSequent(G[:j] + (b,) + rest_r, D),
                    ))
            case FWith(a, b):
                out.append((FLCSequent(rest_l + (a,) + rest_r, D),))
                out.append((FLCSequent(rest_l + (b,) + rest_r, D),))
            case FPlus(a, b):
                out.append((
                    FLCSequent(rest_l + (a,) + rest_r, D),
                    FLCSequent(rest_l + (b,) + rest_r, D),
                ))
            case FBang(a):  # dereliction
                out.append((FLCSequent(rest_l + (a,) + rest_r, D),))

    # contraction of contiguous all-! segments
    for i in range(n):
        if not isinstance(G[i], FBang):
            continue
        for j in range(i + 1, n + 1):
            if not isinstance(G[j - 1], FBang):
                break
            out.append((FLCSequent(G[:j] + G[i:j] + G[j:], D),))
    return out


# Atom-count pruning.  For every atom, the signed count (argument positions
# flip sign, additive components widen to an interval hull) summed over the
# antecedent must be able to meet the succedent's count.  Formulas that can
# contract (all of them on the FLC side, !-formulas on the FLC! side) may be
# counted with any multiplicity >= 1; the rest exactly once.  No weakening,
# so nothing may be counted zero times.

_BIG = 10 ** 9
_count_cache: dict = {}


def _atom_counts(f: FLCFormula) -> dict[str, tuple[int, int]]:
    got = _count_cache.get(f)
    if got is not None:
        return got
    match f:
        case FAtom(name):
            out = {name: (1, 1)}
        case FBang(a):
            out = dict(_atom_counts(a))
        case FOver(b, a) | FUnder(a, b):
            out = dict(_atom_counts(b))
            for k, (lo, hi) in _atom_counts(a).items():
                l0, h0 = out.get(k, (0, 0))
                out[k] = (l0 - hi, h0 - lo)
        case FWith(a, b) | FPlus(a, b):
            ca, cb = _atom_counts(a), _atom_counts(b)
            out = {}
            for k in set(ca) | set(cb):
                la, ha = ca.get(k, (0, 0))
                lb, hb = cb.get(k, (0, 0))
                out[k] = (min(la, lb), max(ha, hb))
        case _:
            raise FLCError(f"unknown formula {f!r}")
    _count_cache[f] = out
    return out


def _flex_interval(lo: int, hi: int) -> tuple[int, int]:
    """Range of m*x for m >= 1, x in [lo, hi]."""
    return (lo if lo >= 0 else -_BIG, hi if hi <= 0 else _BIG)


def _counts_feasible(s: FLCSequent, flex_all: bool) -> bool:
    total: dict[str, tuple[int, int]] = {}
    for f in s.antecedent:
        flex = flex_all or isinstance(f, FBang)
        for k, (lo, hi) in _atom_counts(f).items():
            if flex:
                lo, hi = _flex_interval(lo, hi)
            l0, h0 = total.get(k, (0, 0))
            total[k] = (max(-_BIG, l0 + lo), min(_BIG, h0 + hi))
    demand = _atom_counts(s.succedent)
    for k in set(total) | set(demand):
        lo, hi = total.get(k, (0, 0))
        dlo, dhi = demand.get(k, (0, 0))
        if hi < dlo or lo > dhi:
            return False
    return True


class FLCProver:
    """Height-bounded exhaustive backward prover with a shared memo."""

    def __init__(self, side: str):
        if side not in ("flc", "flc-bang"):
            raise FLCError(f"unknown side {side!r}")
        self.side = side
        self.fail: dict = {}     # sequent -> max depth at which it failed outright
        self.proved: dict = {}   # sequent -> a height at which it was proved

    def provable(self, s: FLCSequent, depth: int) -> bool:
        got, _ = self._search(s, {}, depth)
        return got

    def _axiom(self, state: FLCSequent) -> bool:
        return len(state.antecedent) == 1 and state.antecedent[0] == state.succedent

    def _expand(self, state: FLCSequent):
        if self.side == "flc":
            return _flc_expansions(state)
        return _bang_expansions(state)

    def _size(self, state: FLCSequent) -> int:
        return len(state.antecedent)

    def _search(self, state, path: dict, remaining: int) -> tuple[bool, int]:
        if remaining <= 0:
            return False, 1 << 30
        h = self.proved.get(state)
        if h is not None and h <= remaining:
            return True, 1 << 30
        if self.fail.get(state, 0) >= remaining:
            return False, 1 << 30
        if self._size(state) > (1 << (remaining - 1)):
            return False, 1 << 30
        if not _counts_feasible(state, flex_all=self.side == "flc"):
            return False, 1 << 30
        if self._axiom(state):
            self.proved[state] = 1
            return True, 1 << 30
        my_index = len(path)
        path[state] = my_index
        min_dep = 1 << 30
        ok_any = False
        try:
            for premises in self._expand(state):
                good = True
                for p in premises:
                    if p in path:
                        min_dep = min(min_dep, path[p])
                        good = False
                        break
                    got, dep = self._search(p, path, remaining - 1)
                    min_dep = min(min_dep, dep)
                    if not got:
                        good = False
                        break
                if good:
                    ok_any = True
                    break
        finally:
            del path[state]
        if ok_any:
            if self.proved.get(state, 1 << 30) > remaining:
                self.proved[state] = remaining  # a height-<=remaining proof exists
            return True, 1 << 30
        if min_dep >= my_index:
            if self.fail.get(state, 0) < remaining:
                self.fail[state] = remaining
            return False, 1 << 30
        return False, min_dep


def prove_flc(s: FLCSequent, side: str, depth: int, prover: FLCProver | None = None) -> bool:
    """True iff a derivation of height <= depth exists on the given side."""
    if prover is None:
        prover = FLCProver(side)
    if prover.side != side:
        raise FLCError("prover side mismatch")
    return prover.provable(s, depth)


# ---------------------------------------------------------------------------
# Corpus and the empirical embedding check
# ---------------------------------------------------------------------------


def flc_formula_levels(atoms: tuple[str, ...], max_conn: int) -> list[list[FLCFormula]]:
    levels: list[list[FLCFormula]] = [[FAtom(a) for a in atoms]]
    for c in range(1, max_conn + 1):
        out: list[FLCFormula] = []
        for i in range(c):
            for a in levels[i]:
                for b in levels[c - 1 - i]:
                    out.extend((FOver(a, b), FUnder(a, b), FWith(a, b), FPlus(a, b)))
        levels.append(out)
    return levels


def flc_corpus(atoms: tuple[str, ...] = ("p", "q"), max_conn: int = 3,
               max_items: int = 2, exhaustive_conn: int = 2,
               stratum_cap: int = 1200, seed: int = 11) -> list[FLCSequent]:
    """Bang-free sequents with at most max_conn connectives in total.

    Exhaustive up to exhaustive_conn; the remaining strata are seeded-random
    samples of distinct sequents, plus classic contraction witnesses.
    """
    rng = random.Random(seed)
    levels = flc_formula_levels(atoms, max_conn)

    def antecedents(budget: int, slots: int):
        yield from ([()] if budget == 0 else [])
        if slots == 0:
            return
        for c in range(budget + 1):
            for f in levels[c]:
                for rest in antecedents(budget - c, slots - 1):
                    yield (f,) + rest

    corpus: list[FLCSequent] = []
    seen = set()

    def add(seq: FLCSequent):
        if seq not in seen:
            seen.add(seq)
            corpus.append(seq)

    for total in range(exhaustive_conn + 1):
        for sc in range(total + 1):
            for succ in levels[sc]:
                for ante in antecedents(total - sc, max_items):
                    add(FLCSequent(ante, succ))
    flat = [f for lv in levels for f in lv]
    for total in range(exhaustive_conn + 1, max_conn + 1):
        want = stratum_cap
        misses = 0
        start = len(corpus)
        while len(corpus) - start < want and misses < 50 * want:
            sc = rng.randint(0, total)
            succ = rng.choice(levels[sc])
            left = total - sc
            ante = []
            for _ in range(rng.randint(0, max_items)):
                c = rng.randint(0, left)
                ante.append(rng.choice(levels[c]))
                left -= c
            if left != 0:
                misses += 1
                continue
            seq = FLCSequent(tuple(ante), succ)
            if seq in seen:
                misses += 1
                continue
            add(seq)
    p, q = FAtom(atoms[0]), FAtom(atoms[1 % len(atoms)])
    add(FLCSequent((p, FUnder(p, FUnder(p, q))), q))          # needs contraction
    add(FLCSequent((FWith(p, q), FUnder(p, FUnder(q, p))), p))
    add(FLCSequent((FPlus(p, q),), FPlus(q, p)))
    return corpus


@dataclass
class EmbeddingReport:
    corpus_size: int = 0
    flc_provable: int = 0
    forward_failures: list = field(default_factory=list)
    converse_checked: int = 0
    converse_failures: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.forward_failures and not self.converse_failures

    def summary(self) -> str:
        return (f"embedding: corpus {self.corpus_size}, source-provable {self.flc_provable}, "
                f"forward failures {len(self.forward_failures)}; converse checked "
                f"{self.converse_checked}, failures {len(self.converse_failures)}")


def embedding_check(corpus: list[FLCSequent] | None = None, flc_depth: int = 6,
                    bang_depth: int = 10, converse_flc_depth: int = 8,
                    converse_bang_depth: int = 8, converse_sample: int = 300,
                    seed: int = 5) -> EmbeddingReport:
    """Empirical check of the embedding at desk scale.

    Forward: every source sequent provable at flc_depth must have its
    translation provable at bang_depth.  Converse spot-check: on a seeded
    sample of the corpus plus every source-provable member, a translation
    found provable (at converse_bang_depth, where refutation stays cheap)
    must have a source provable at converse_flc_depth.
    """
    if corpus is None:
        corpus = flc_corpus()
    flc = FLCProver("flc")
    bang = FLCProver("flc-bang")
    report = EmbeddingReport(corpus_size=len(corpus))
    provable_src = []
    for s in corpus:
        if flc.provable(s, flc_depth):
            provable_src.append(s)
            report.flc_provable += 1
            if not bang.provable(translate_sequent(s), bang_depth):
                report.forward_failures.append(s)
    rng = random.Random(seed)
    sample = provable_src + rng.sample(corpus, min(converse_sample, len(corpus)))
    for s in sample:
        if bang.provable(translate_sequent(s), converse_bang_depth):
            report.converse_checked += 1
            if not flc.provable(s, converse_flc_depth):
                report.converse_failures.append(s)
    return report


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------


def parse_flc_formula(text: str) -> FLCFormula:
    toks = _tok_flc(text)
    f, i = _parse_flc(toks, 0)
    if toks[i][0] != "END":
        raise FLCError(f"trailing input at {toks[i][2]}")
    return f


def parse_flc_sequent(text: str) -> FLCSequent:
    if "=>" not in text:
        raise FLCError("sequent needs =>")
    left, right = text.split("=>", 1)
    ante = tuple(parse_flc_formula(part) for part in left.split(",") if part.strip())
    return FLCSequent(ante, parse_flc_formula(right))


def _tok_flc(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif text.startswith("(+)", i):
            toks.append(("PLUS", "(+)", i))
            i += 3
        elif ch in "()/\\&!":
            kind = {"(": "LPAR", ")": "RPAR", "/": "SLASH", "\\": "BACK", "&": "WITH", "!": "BANG"}[ch]
            toks.append((kind, ch, i))
            i += 1
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("IDENT", text[i:j], i))
            i = j
        else:
            raise FLCError(f"unexpected character {ch!r} at {i}")
    toks.append(("END", "", n))
    return toks


_FLC_BIN = {"SLASH", "BACK", "WITH", "PLUS"}


def _parse_flc(toks, i):
    f, i = _parse_flc_unary(toks, i)
    while toks[i][0] in _FLC_BIN:
        op = toks[i][0]
        i += 1
        g, i = _parse_flc_unary(toks, i)
        f = {"SLASH": FOver, "BACK": lambda a, b: FUnder(a, b),
             "WITH": FWith, "PLUS": FPlus}[op](f, g)
    return f, i


def _parse_flc_unary(toks, i):
    kind, val, pos = toks[i]
    if kind == "BANG":
        f, i = _parse_flc_unary(toks, i + 1)
        return FBang(f), i
    if kind == "LPAR":
        f, i = _parse_flc(toks, i + 1)
        if toks[i][0] != "RPAR":
            raise FLCError(f"expected ) at {toks[i][2]}")
        return f, i + 1
    if kind == "IDENT":
        return FAtom(val), i + 1
    raise FLCError(f"expected a formula at {pos}")


def show_flc_formula(f: FLCFormula, level: int = 1) -> str:
    match f:
        case FAtom(name):
            return name
        case FBang(a):
            return f"!{show_flc_formula(a, 2)}"
        case FOver(b, a):
            s = f"{show_flc_formula(b, 1)}/{show_flc_formula(a, 2)}"
        case FUnder(a, b):
            s = f"{show_flc_formula(a, 1)}\\{show_flc_formula(b, 2)}"
        case FWith(a, b):
            s = f"{show_flc_formula(a, 1)}&{show_flc_formula(b, 2)}"
        case FPlus(a, b):
            s = f"{show_flc_formula(a, 1)}(+){show_flc_formula(b, 2)}"
        case _:
            raise FLCError(f"unknown formula {f!r}")
    return f"({s})" if level > 1 else s


def show_flc_sequent(s: FLCSequent) -> str:
    ante = ", ".join(show_flc_formula(a) for a in s.antecedent)
    return f"{ante} => {show_flc_formula(s.succedent)}" if ante else f"=> {show_flc_formula(s.succedent)}"

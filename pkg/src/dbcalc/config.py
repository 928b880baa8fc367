"""Antecedent configurations: sequences of occurrences, separators, segmented
types with hole fillers, and bracketed domains.

A configuration is a plain tuple of items.  The empty tuple is the empty
configuration.  Contexts are zippers: a hole position (surrounded by ``pre``
and ``post`` runs) together with the chain of bracket / filler frames above
it, so plugging a sub-configuration back is purely structural.

Concrete syntax: items separated by ``,``; ``1`` is the separator; ``[ ... ]``
a bracketed domain; ``F{ D1 : D2 }`` a segmented type with fillers.  A bare
formula of positive sort denotes its vector form (all fillers separators).
Sequents are written ``CONFIG => FORMULA``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    Formula,
    TokenStream,
    bracket_count_formula,
    length_formula,
    parse_formula_tokens,
    show_formula,
    sort,
    tokenize,
)


class ConfigError(ValueError):
    """Raised for ill-formed configurations or unbalanced sequents."""


@dataclass(frozen=True)
class Item:
    pass


@dataclass(frozen=True)
class Sep(Item):
    """The metalinguistic separator (one gap point)."""


@dataclass(frozen=True)
class Occ(Item):
    """A sort-0 type occurrence, optionally labelled with a semantic variable."""

    formula: Formula
    label: str | None = None

    def __post_init__(self):
        if sort(self.formula) != 0:
            raise ConfigError(f"Occ needs a sort-0 formula, got sort {sort(self.formula)}")


@dataclass(frozen=True)
class Seg(Item):
    """A segmented occurrence of a sorted type: one filler per gap point."""

    formula: Formula
    fillers: tuple["Config", ...]
    label: str | None = None

    def __post_init__(self):
        n = sort(self.formula)
        if n <= 0 or len(self.fillers) != n:
            raise ConfigError(
                f"Seg of sort-{n} formula needs exactly {n} fillers, got {len(self.fillers)}"
            )


@dataclass(frozen=True)
class Brack(Item):
    inner: "Config"


Config = tuple[Item, ...]
EMPTY: Config = ()


def vector(f: Formula, label: str | None = None) -> Item:
    """The occurrence of f with all gap points held by separators."""
    n = sort(f)
    if n == 0:
        return Occ(f, label)
    return Seg(f, ((Sep(),),) * n, label)


def is_vector(item: Item) -> bool:
    if isinstance(item, Occ):
        return True
    if isinstance(item, Seg):
        return all(filler == (Sep(),) for filler in item.fillers)
    return False


def sort_config(c: Config) -> int:
    s = 0
    for item in c:
        if isinstance(item, Sep):
            s += 1
        elif isinstance(item, Seg):
            s += sum(sort_config(f) for f in item.fillers)
        elif isinstance(item, Brack):
            s += sort_config(item.inner)
    return s


def bracket_count_config(c: Config) -> int:
    """Bracket count of a configuration.

    A segmented occurrence contributes only its fillers' counts, not the count
    of its own formula; each bracketed domain adds one.
    """
    total = 0
    for item in c:
        if isinstance(item, Occ):
            total += bracket_count_formula(item.formula)
        elif isinstance(item, Seg):
            total += sum(bracket_count_config(f) for f in item.fillers)
        elif isinstance(item, Brack):
            total += bracket_count_config(item.inner) + 1
    return total


def length_config(c: Config) -> int:
    """Connective count over all occurrences; punctuation contributes 0."""
    total = 0
    for item in c:
        if isinstance(item, Occ):
            total += length_formula(item.formula)
        elif isinstance(item, Seg):
            total += length_formula(item.formula)
            total += sum(length_config(f) for f in item.fillers)
        elif isinstance(item, Brack):
            total += length_config(item.inner)
    return total


def occurrences(c: Config) -> list[Occ | Seg]:
    """All type occurrences, depth-first through fillers and brackets."""
    out: list[Occ | Seg] = []
    for item in c:
        if isinstance(item, Occ):
            out.append(item)
        elif isinstance(item, Seg):
            out.append(item)
            for f in item.fillers:
                out.extend(occurrences(f))
        elif isinstance(item, Brack):
            out.extend(occurrences(item.inner))
    return out


def map_labels(c: Config, fn) -> Config:
    """Rebuild c with every occurrence label replaced by fn(old_label)."""
    items = []
    for item in c:
        if isinstance(item, Occ):
            items.append(Occ(item.formula, fn(item.label)))
        elif isinstance(item, Seg):
            items.append(
                Seg(item.formula, tuple(map_labels(f, fn) for f in item.fillers), fn(item.label))
            )
        elif isinstance(item, Brack):
            items.append(Brack(map_labels(item.inner, fn)))
        else:
            items.append(item)
    return tuple(items)


def labels_of(c: Config) -> list[str | None]:
    return [o.label for o in occurrences(c)]


def label_all(c: Config, alloc) -> Config:
    """Give every occurrence a fresh label from the allocator (left to right)."""
    return map_labels(c, lambda _old: alloc())


def config_key(c: Config):
    """Structural identity of a configuration, ignoring labels."""
    out = []
    for item in c:
        if isinstance(item, Sep):
            out.append(1)
        elif isinstance(item, Occ):
            out.append(item.formula)
        elif isinstance(item, Seg):
            out.append((item.formula, tuple(config_key(f) for f in item.fillers)))
        else:
            out.append(("[]", config_key(item.inner)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BrackFrame:
    ctx: "Context"


@dataclass(frozen=True)
class SegFrame:
    formula: Formula
    label: str | None
    before: tuple[Config, ...]
    after: tuple[Config, ...]
    ctx: "Context"


@dataclass(frozen=True)
class Context:
    """A configuration with one distinguished hole at which a run may sit."""

    pre: Config
    post: Config
    parent: BrackFrame | SegFrame | None = None


def plug(ctx: Context, sub: Config) -> Config:
    cfg = ctx.pre + tuple(sub) + ctx.post
    p = ctx.parent
    if p is None:
        return cfg
    if isinstance(p, BrackFrame):
        return plug(p.ctx, (Brack(cfg),))
    return plug(p.ctx, (Seg(p.formula, p.before + (cfg,) + p.after, p.label),))


def contexts_of(c: Config, parent: BrackFrame | SegFrame | None = None) -> list[tuple[Context, Config]]:
    """All (context, sub) pairs with plug(context, sub) == c.

    Sub ranges over contiguous item runs, at top level and inside every
    bracketed domain and segment filler.
    """
    out: list[tuple[Context, Config]] = []
    n = len(c)
    for i in range(n + 1):
        for j in range(i, n + 1):
            out.append((Context(c[:i], c[j:], parent), c[i:j]))
    for idx, item in enumerate(c):
        around = Context(c[:idx], c[idx + 1:], parent)
        if isinstance(item, Brack):
            out.extend(contexts_of(item.inner, BrackFrame(around)))
        elif isinstance(item, Seg):
            for fi, filler in enumerate(item.fillers):
                frame = SegFrame(item.formula, item.label, item.fillers[:fi], item.fillers[fi + 1:], around)
                out.extend(contexts_of(filler, frame))
    return out


def hole_contents(ctx: Context, cfg: Config) -> Config | None:
    """Invert plug: the run X with plug(ctx, X) == cfg, or None if shapes differ."""
    if ctx is None:
        return None
    chain = [ctx]
    while chain[-1].parent is not None:
        chain.append(chain[-1].parent.ctx)
    for i in range(len(chain) - 1, -1, -1):
        c = chain[i]
        np, ns = len(c.pre), len(c.post)
        if len(cfg) < np + ns or cfg[:np] != c.pre:
            return None
        if ns and cfg[len(cfg) - ns:] != c.post:
            return None
        middle = cfg[np: len(cfg) - ns]
        if i == 0:
            return middle
        if len(middle) != 1:
            return None
        item = middle[0]
        frame = chain[i - 1].parent
        if isinstance(frame, BrackFrame):
            if not isinstance(item, Brack):
                return None
            cfg = item.inner
        else:
            if not isinstance(item, Seg):
                return None
            if item.formula != frame.formula or item.label != frame.label:
                return None
            nb = len(frame.before)
            if item.fillers[:nb] != frame.before or item.fillers[nb + 1:] != frame.after:
                return None
            cfg = item.fillers[nb]
    return None


def seps_before(ctx: Context) -> int:
    """Separators preceding the hole in depth-first order."""
    base = sort_config(ctx.pre)
    p = ctx.parent
    if p is None:
        return base
    if isinstance(p, BrackFrame):
        return seps_before(p.ctx) + base
    return seps_before(p.ctx) + sum(sort_config(f) for f in p.before) + base


def sep_context(c: Config, k: int, parent: BrackFrame | SegFrame | None = None) -> Context:
    """Context whose hole is the k-th separator (1-based, depth-first)."""
    if k < 1:
        raise ConfigError(f"separator index {k} out of range")
    count = 0
    for idx, item in enumerate(c):
        around = Context(c[:idx], c[idx + 1:], parent)
        if isinstance(item, Sep):
            count += 1
            if count == k:
                return around
        elif isinstance(item, Seg):
            for fi, filler in enumerate(item.fillers):
                s = sort_config(filler)
                if count + s >= k:
                    frame = SegFrame(item.formula, item.label, item.fillers[:fi], item.fillers[fi + 1:], around)
                    return sep_context(filler, k - count, frame)
                count += s
        elif isinstance(item, Brack):
            s = sort_config(item.inner)
            if count + s >= k:
                return sep_context(item.inner, k - count, BrackFrame(around))
            count += s
    raise ConfigError(f"separator index {k} out of range (only {count} present)")


def wrap(g: Config, k: int, d: Config) -> Config:
    """Replace the k-th separator of g by the configuration d."""
    return plug(sep_context(g, k), d)


def context_position(ctx: Context) -> tuple:
    """A stable sort key for where a context's hole sits."""
    path = []
    cur = ctx
    while cur is not None:
        path.append((len(cur.pre), len(cur.post)))
        p = cur.parent
        if p is None:
            cur = None
        elif isinstance(p, BrackFrame):
            path.append((0,))
            cur = p.ctx
        else:
            path.append((1, len(p.before)))
            cur = p.ctx
    return tuple(reversed(path))


# ---------------------------------------------------------------------------
# Sequents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequent:
    antecedent: Config
    succedent: Formula

    def __post_init__(self):
        sa, ss = sort_config(self.antecedent), sort(self.succedent)
        if sa != ss:
            raise ConfigError(f"sort mismatch: antecedent {sa} vs succedent {ss}")

    def key(self):
        return (config_key(self.antecedent), self.succedent)

    def __str__(self):
        return show_sequent(self)


def degree_of_contraction(s: Sequent) -> int:
    return bracket_count_formula(s.succedent) - bracket_count_config(s.antecedent)


def length_sequent(s: Sequent) -> int:
    return length_config(s.antecedent) + length_formula(s.succedent)


def measure(s: Sequent) -> tuple[int, int]:
    """The termination measure (degree of contraction, length), ordered lexically."""
    return (degree_of_contraction(s), length_sequent(s))


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------

_CONFIG_ENDERS = {"END", "RBRACK", "RBRACE", "COLON", "ARROW"}


def parse_config_tokens(ts: TokenStream) -> Config:
    if ts.peek().kind in _CONFIG_ENDERS:
        return ()
    items = [_parse_item(ts)]
    while ts.peek().kind == "COMMA":
        ts.next()
        items.append(_parse_item(ts))
    return tuple(items)


def _parse_item(ts: TokenStream) -> Item:
    t = ts.peek()
    if t.kind == "NUM":
        ts.next()
        if t.value != 1:
            raise ConfigError(f"unexpected number {t.value} in configuration")
        return Sep()
    if t.kind == "LBRACK":
        ts.next()
        inner = parse_config_tokens(ts)
        ts.expect("RBRACK")
        return Brack(inner)
    f = parse_formula_tokens(ts)
    if ts.peek().kind == "LBRACE":
        ts.next()
        fillers = [parse_config_tokens(ts)]
        while ts.peek().kind == "COLON":
            ts.next()
            fillers.append(parse_config_tokens(ts))
        ts.expect("RBRACE")
        return Seg(f, tuple(fillers))
    return vector(f)


def parse_config(text: str) -> Config:
    ts = TokenStream(tokenize(text))
    c = parse_config_tokens(ts)
    ts.expect("END")
    return c


def parse_sequent(text: str) -> Sequent:
    ts = TokenStream(tokenize(text))
    c = parse_config_tokens(ts)
    ts.expect("ARROW")
    f = parse_formula_tokens(ts)
    ts.expect("END")
    return Sequent(c, f)


def show_item(item: Item) -> str:
    if isinstance(item, Sep):
        return "1"
    if isinstance(item, Occ):
        return show_formula(item.formula)
    if isinstance(item, Seg):
        if is_vector(item):
            return show_formula(item.formula)
        fillers = " : ".join(show_config(f) for f in item.fillers)
        return f"{show_formula(item.formula)}{{{fillers}}}"
    if isinstance(item, Brack):
        return f"[{show_config(item.inner)}]"
    raise ConfigError(f"unknown item {item!r}")


def show_config(c: Config) -> str:
    return ", ".join(show_item(i) for i in c)


def show_sequent(s: Sequent) -> str:
    ante = show_config(s.antecedent)
    return f"{ante} => {show_formula(s.succedent)}" if ante else f"=> {show_formula(s.succedent)}"

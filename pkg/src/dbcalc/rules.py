"""Inference rules of the bracketed displacement calculus and its four
exponential extensions, with backward rule-instance enumeration and forward
replay.

A rule instance is a RuleApplication: rule name, conclusion, premises, and a
binding that pins down where in the conclusion the rule acted (context, the
principal formula, fresh labels, block widths, split points).  The premises
are a function of (rule, conclusion, binding); `premises_of` computes them and
`check_application` replays an application against it.

Calculus variants gate rule availability:

  db                  continuous + discontinuous + bracket rules
  db-bang             + !L !R !P !C
  db-bang-quest       + ?L ?R ?M (and optionally the ?-expansion rule)
  db-bang-b           + !L !R !P !Cb (contraction induces a bracketed domain)
  db-bang-b-quest-r   + ?R ?Mr (succedent-only existential)

Cut (context substitution, enumerated over subformulas of the goal) is
available on request for oracle testing in any variant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .config import (
    Brack,
    Config,
    ConfigError,
    Context,
    Occ,
    Seg,
    Sep,
    Sequent,
    config_key,
    context_position,
    contexts_of,
    hole_contents,
    is_vector,
    labels_of,
    occurrences,
    plug,
    seps_before,
    sort_config,
    vector,
    wrap,
)
from .formula import (
    Atom,
    Bang,
    BracketInv,
    CircDown,
    CircUp,
    Diamond,
    Formula,
    Over,
    Prod,
    Quest,
    subformulas,
    Under,
    UnitI,
    UnitJ,
    WProd,
    show_formula,
    sort,
)


class VariantError(ValueError):
    pass


class RuleName(Enum):
    ID = "Id"
    OVER_L = "/L"
    OVER_R = "/R"
    UNDER_L = "\\L"
    UNDER_R = "\\R"
    PROD_L = "*L"
    PROD_R = "*R"
    I_L = "IL"
    I_R = "IR"
    UP_L = "up_L"
    UP_R = "up_R"
    DOWN_L = "dn_L"
    DOWN_R = "dn_R"
    WPROD_L = "o_L"
    WPROD_R = "o_R"
    J_L = "JL"
    J_R = "JR"
    BRINV_L = "[]-L"
    BRINV_R = "[]-R"
    DIA_L = "<>L"
    DIA_R = "<>R"
    BANG_L = "!L"
    BANG_R = "!R"
    BANG_P_LEFT = "!P<"
    BANG_P_RIGHT = "!P>"
    BANG_C = "!C"
    BANG_CB = "!Cb"
    QUEST_L = "?L"
    QUEST_R = "?R"
    QUEST_M = "?M"
    QUEST_MR = "?Mr"
    QUEST_E = "?E"
    CUT = "Cut"

    @property
    def text(self) -> str:
        """Serialization name; the two directed permutation rules share !P."""
        if self in (RuleName.BANG_P_LEFT, RuleName.BANG_P_RIGHT):
            return "!P"
        return self.value


STRUCTURAL_RULES = frozenset(
    {RuleName.BANG_P_LEFT, RuleName.BANG_P_RIGHT, RuleName.BANG_C, RuleName.BANG_CB,
     RuleName.QUEST_M, RuleName.QUEST_MR, RuleName.QUEST_E, RuleName.CUT}
)

VARIANT_TAGS = ("db", "db-bang", "db-bang-quest", "db-bang-b", "db-bang-b-quest-r")


@dataclass(frozen=True)
class CalculusVariant:
    tag: str
    with_cut: bool = False
    with_expansion: bool = False

    def __post_init__(self):
        if self.tag not in VARIANT_TAGS:
            raise VariantError(f"unknown calculus {self.tag!r}")
        if self.with_expansion and self.tag != "db-bang-quest":
            raise VariantError("?-expansion is only legal with db-bang-quest")

    @property
    def has_bang(self) -> bool:
        return self.tag != "db"

    @property
    def bracketed_contraction(self) -> bool:
        return self.tag in ("db-bang-b", "db-bang-b-quest-r")

    @property
    def has_quest_full(self) -> bool:
        return self.tag == "db-bang-quest"

    @property
    def has_quest_restricted(self) -> bool:
        return self.tag == "db-bang-b-quest-r"

    @property
    def has_quest(self) -> bool:
        return self.has_quest_full or self.has_quest_restricted


DB = CalculusVariant("db")
DB_BANG = CalculusVariant("db-bang")
DB_BANG_QUEST = CalculusVariant("db-bang-quest")
DB_BANG_B = CalculusVariant("db-bang-b")
DB_BANG_B_QUEST_R = CalculusVariant("db-bang-b-quest-r")

ALL_VARIANTS = (DB, DB_BANG, DB_BANG_QUEST, DB_BANG_B, DB_BANG_B_QUEST_R)


def rules_available(v: CalculusVariant) -> frozenset[RuleName]:
    rules = {
        RuleName.ID, RuleName.OVER_L, RuleName.OVER_R, RuleName.UNDER_L, RuleName.UNDER_R,
        RuleName.PROD_L, RuleName.PROD_R, RuleName.I_L, RuleName.I_R,
        RuleName.UP_L, RuleName.UP_R, RuleName.DOWN_L, RuleName.DOWN_R,
        RuleName.WPROD_L, RuleName.WPROD_R, RuleName.J_L, RuleName.J_R,
        RuleName.BRINV_L, RuleName.BRINV_R, RuleName.DIA_L, RuleName.DIA_R,
    }
    if v.has_bang:
        rules |= {RuleName.BANG_L, RuleName.BANG_R, RuleName.BANG_P_LEFT, RuleName.BANG_P_RIGHT}
        rules.add(RuleName.BANG_CB if v.bracketed_contraction else RuleName.BANG_C)
    if v.has_quest_full:
        rules |= {RuleName.QUEST_L, RuleName.QUEST_R, RuleName.QUEST_M}
        if v.with_expansion:
            rules.add(RuleName.QUEST_E)
    if v.has_quest_restricted:
        rules |= {RuleName.QUEST_R, RuleName.QUEST_MR}
    if v.with_cut:
        rules.add(RuleName.CUT)
    return frozenset(rules)


def formula_allowed(f: Formula, v: CalculusVariant) -> bool:
    match f:
        case Bang(a):
            return v.has_bang and formula_allowed(a, v)
        case Quest(a):
            return v.has_quest and formula_allowed(a, v)
        case Atom() | UnitI() | UnitJ():
            return True
        case Over(x, y) | Under(x, y) | Prod(x, y):
            return formula_allowed(x, v) and formula_allowed(y, v)
        case CircUp(_, x, y) | CircDown(_, x, y) | WProd(_, x, y):
            return formula_allowed(x, v) and formula_allowed(y, v)
        case BracketInv(a) | Diamond(a):
            return formula_allowed(a, v)
    return False


def check_variant(goal: Sequent, v: CalculusVariant) -> None:
    bad = [o.formula for o in occurrences(goal.antecedent) if not formula_allowed(o.formula, v)]
    if not formula_allowed(goal.succedent, v):
        bad.append(goal.succedent)
    if bad:
        names = ", ".join(show_formula(f) for f in bad)
        raise VariantError(f"connectives outside calculus {v.tag}: {names}")


@dataclass(frozen=True)
class Binding:
    """Where a rule acted.  Field use per rule:

    ctx        hole context in the conclusion antecedent (L rules, structural)
    inner_ctx  context inside the hole run (dn_L: functor position; o_R: the
               separator position of the right factor)
    principal  principal formula (cut formula for Cut)
    vars       rule variables: conclusion principal label(s) followed by the
               fresh labels introduced in the premises
    block      item width of the contraction block (!C, !Cb)
    split      top-level split index (*R, ?M, ?Mr)
    """

    ctx: Context | None = None
    inner_ctx: Context | None = None
    principal: Formula | None = None
    vars: tuple = ()
    block: int = 0
    split: int = 0


@dataclass(frozen=True)
class RuleApplication:
    rule: RuleName
    conclusion: Sequent
    premises: tuple[Sequent, ...]
    binding: Binding

    def key(self):
        b = self.binding
        return (
            self.rule.value,
            context_position(b.ctx) if b.ctx is not None else (),
            context_position(b.inner_ctx) if b.inner_ctx is not None else (),
            b.split,
            b.block,
            show_formula(b.principal) if b.principal is not None else "",
        )


def make_alloc(*sequents: Sequent):
    """Fresh-label allocator avoiding every label already in the sequents."""
    n = 0
    for s in sequents:
        for lbl in labels_of(s.antecedent):
            m = re.fullmatch(r"x(\d+)", lbl or "")
            if m:
                n = max(n, int(m.group(1)) + 1)

    def alloc() -> str:
        nonlocal n
        name = f"x{n}"
        n += 1
        return name

    return alloc


def _bang_occ(item) -> bool:
    return isinstance(item, Occ) and isinstance(item.formula, Bang)


def _vector_of(item, cls) -> bool:
    return is_vector(item) and isinstance(item.formula, cls)


# ---------------------------------------------------------------------------
# Premises from (rule, conclusion, binding): the schema, replayable.
# ---------------------------------------------------------------------------


def premises_of(rule: RuleName, conclusion: Sequent, binding: Binding) -> tuple[Sequent, ...] | None:
    """The premises the schema assigns, or None if the binding does not fit."""
    try:
        return _premises_of(rule, conclusion, binding)
    except (ConfigError, IndexError, TypeError, ValueError):
        return None


def _premises_of(rule: RuleName, conclusion: Sequent, b: Binding) -> tuple[Sequent, ...] | None:
    G, D = conclusion.antecedent, conclusion.succedent

    def hole() -> Config | None:
        return hole_contents(b.ctx, G)

    match rule:
        case RuleName.ID:
            if G == (vector(D, b.vars[0]),):
                return ()
            return None

        case RuleName.I_R:
            return () if isinstance(D, UnitI) and G == () else None

        case RuleName.J_R:
            return () if isinstance(D, UnitJ) and G == (Sep(),) else None

        case RuleName.OVER_R:
            if not isinstance(D, Over):
                return None
            return (Sequent(G + (vector(D.b, b.vars[0]),), D.c),)

        case RuleName.UNDER_R:
            if not isinstance(D, Under):
                return None
            return (Sequent((vector(D.a, b.vars[0]),) + G, D.c),)

        case RuleName.PROD_R:
            if not isinstance(D, Prod):
                return None
            i = b.split
            g1, g2 = G[:i], G[i:]
            if sort_config(g1) != sort(D.a) or sort_config(g2) != sort(D.b):
                return None
            return (Sequent(g1, D.a), Sequent(g2, D.b))

        case RuleName.UP_R:
            if not isinstance(D, CircUp):
                return None
            return (Sequent(wrap(G, D.k, (vector(D.b, b.vars[0]),)), D.c),)

        case RuleName.DOWN_R:
            if not isinstance(D, CircDown):
                return None
            return (Sequent(wrap((vector(D.a, b.vars[0]),), D.k, G), D.c),)

        case RuleName.WPROD_R:
            if not isinstance(D, WProd):
                return None
            g2 = hole_contents(b.ctx, G)
            if g2 is None:
                return None
            g1 = plug(b.ctx, (Sep(),))
            if seps_before(b.ctx) + 1 != D.k:
                return None
            if sort_config(g1) != sort(D.a) or sort_config(g2) != sort(D.b):
                return None
            return (Sequent(g1, D.a), Sequent(g2, D.b))

        case RuleName.BRINV_R:
            if not isinstance(D, BracketInv):
                return None
            return (Sequent((Brack(G),), D.a),)

        case RuleName.DIA_R:
            if not isinstance(D, Diamond):
                return None
            if len(G) == 1 and isinstance(G[0], Brack):
                return (Sequent(G[0].inner, D.a),)
            return None

        case RuleName.BANG_R:
            if not isinstance(D, Bang):
                return None
            if all(_bang_occ(item) for item in G):
                return (Sequent(G, D.a),)
            return None

        case RuleName.QUEST_R:
            if not isinstance(D, Quest):
                return None
            return (Sequent(G, D.a),)

        case RuleName.QUEST_M:
            if not isinstance(D, Quest):
                return None
            i = b.split
            g1, g2 = G[:i], G[i:]
            if not g1 or not g2:
                return None
            return (Sequent(g1, D), Sequent(g2, D))

        case RuleName.QUEST_MR:
            if not isinstance(D, Quest):
                return None
            i = b.split
            g1, g2 = G[:i], G[i:]
            if not g1 or not g2:
                return None
            return (Sequent(g1, D.a), Sequent(g2, D))

        case RuleName.OVER_L:
            sub = hole()
            if not sub:
                return None
            head = sub[0]
            if not (_vector_of(head, Over) and head.formula == b.principal and head.label == b.vars[0]):
                return None
            gamma = sub[1:]
            f = b.principal
            if sort_config(gamma) != sort(f.b):
                return None
            return (
                Sequent(gamma, f.b),
                Sequent(plug(b.ctx, (vector(f.c, b.vars[1]),)), D),
            )

        case RuleName.UNDER_L:
            sub = hole()
            if not sub:
                return None
            last = sub[-1]
            if not (_vector_of(last, Under) and last.formula == b.principal and last.label == b.vars[0]):
                return None
            gamma = sub[:-1]
            f = b.principal
            if sort_config(gamma) != sort(f.a):
                return None
            return (
                Sequent(gamma, f.a),
                Sequent(plug(b.ctx, (vector(f.c, b.vars[1]),)), D),
            )

        case RuleName.PROD_L:
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (_vector_of(item, Prod) and item.formula == b.principal and item.label == b.vars[0]):
                return None
            f = b.principal
            return (
                Sequent(plug(b.ctx, (vector(f.a, b.vars[1]), vector(f.b, b.vars[2]))), D),
            )

        case RuleName.I_L:
            sub = hole()
            if sub is None or sub != (Occ(UnitI(), b.vars[0]),):
                return None
            return (Sequent(plug(b.ctx, ()), D),)

        case RuleName.J_L:
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (_vector_of(item, UnitJ) and item.label == b.vars[0]):
                return None
            return (Sequent(plug(b.ctx, (Sep(),)), D),)

        case RuleName.UP_L:
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (isinstance(item, Seg) and isinstance(item.formula, CircUp)
                    and item.formula == b.principal and item.label == b.vars[0]):
                return None
            f = item.formula
            for i, filler in enumerate(item.fillers):
                if i != f.k - 1 and filler != (Sep(),):
                    return None
            gamma = item.fillers[f.k - 1]
            if sort_config(gamma) != sort(f.b):
                return None
            return (
                Sequent(gamma, f.b),
                Sequent(plug(b.ctx, (vector(f.c, b.vars[1]),)), D),
            )

        case RuleName.DOWN_L:
            sub = hole()
            if sub is None:
                return None
            inner = hole_contents(b.inner_ctx, sub)
            if inner is None or len(inner) != 1:
                return None
            item = inner[0]
            if not (_vector_of(item, CircDown) and item.formula == b.principal
                    and item.label == b.vars[0]):
                return None
            f = item.formula
            if seps_before(b.inner_ctx) + 1 != f.k:
                return None
            gamma = plug(b.inner_ctx, (Sep(),))
            if sort_config(gamma) != sort(f.a):
                return None
            return (
                Sequent(gamma, f.a),
                Sequent(plug(b.ctx, (vector(f.c, b.vars[1]),)), D),
            )

        case RuleName.WPROD_L:
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (_vector_of(item, WProd) and item.formula == b.principal and item.label == b.vars[0]):
                return None
            f = item.formula
            fillers = tuple(
                (vector(f.b, b.vars[2]),) if i == f.k - 1 else (Sep(),)
                for i in range(sort(f.a))
            )
            seg = Seg(f.a, fillers, b.vars[1]) if sort(f.a) > 0 else None
            if seg is None:
                return None
            return (Sequent(plug(b.ctx, (seg,)), D),)

        case RuleName.BRINV_L:
            sub = hole()
            if sub is None or len(sub) != 1 or not isinstance(sub[0], Brack):
                return None
            inner = sub[0].inner
            if len(inner) != 1 or not (_vector_of(inner[0], BracketInv)
                                       and inner[0].formula == b.principal
                                       and inner[0].label == b.vars[0]):
                return None
            return (Sequent(plug(b.ctx, (vector(b.principal.a, b.vars[0]),)), D),)

        case RuleName.DIA_L:
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (_vector_of(item, Diamond) and item.formula == b.principal and item.label == b.vars[0]):
                return None
            return (Sequent(plug(b.ctx, (Brack((vector(b.principal.a, b.vars[0]),)),)), D),)

        case RuleName.BANG_L:
            sub = hole()
            if sub is None or len(sub) != 1 or not _bang_occ(sub[0]):
                return None
            item = sub[0]
            if item.formula != b.principal or item.label != b.vars[0]:
                return None
            return (Sequent(plug(b.ctx, (Occ(item.formula.a, item.label),)), D),)

        case RuleName.BANG_P_LEFT:
            sub = hole()
            if sub is None or len(sub) < 2 or not _bang_occ(sub[0]):
                return None
            return (Sequent(plug(b.ctx, sub[1:] + (sub[0],)), D),)

        case RuleName.BANG_P_RIGHT:
            sub = hole()
            if sub is None or len(sub) < 2 or not _bang_occ(sub[-1]):
                return None
            return (Sequent(plug(b.ctx, (sub[-1],) + sub[:-1]), D),)

        case RuleName.BANG_C:
            sub = hole()
            if not sub or not all(_bang_occ(i) for i in sub) or len(b.vars) != len(sub):
                return None
            copy = tuple(Occ(item.formula, y) for item, y in zip(sub, b.vars))
            return (Sequent(plug(b.ctx, sub + copy), D),)

        case RuleName.BANG_CB:
            sub = hole()
            n = b.block
            if sub is None or not 1 <= n <= len(sub) or len(b.vars) != n:
                return None
            block, gamma = sub[:n], sub[n:]
            if not all(_bang_occ(i) for i in block):
                return None
            copy = tuple(Occ(item.formula, y) for item, y in zip(block, b.vars))
            return (Sequent(plug(b.ctx, block + (Brack(copy + gamma),)), D),)

        case RuleName.QUEST_L:
            if not isinstance(D, Quest):
                return None
            sub = hole()
            if sub is None or len(sub) != 1:
                return None
            item = sub[0]
            if not (isinstance(item, Occ) and isinstance(item.formula, Quest)):
                return None
            others = [o for o in occurrences(G) if not _bang_occ(o)]
            if others != [item]:
                return None
            return (Sequent(plug(b.ctx, (Occ(item.formula.a, b.vars[0]),)), D),)

        case RuleName.QUEST_E:
            sub = hole()
            if sub is None or len(sub) != 2:
                return None
            a1, a2 = sub
            if not (isinstance(a1, Occ) and isinstance(a2, Occ)
                    and isinstance(a1.formula, Quest) and a1.formula == a2.formula):
                return None
            return (Sequent(plug(b.ctx, (Occ(a1.formula, b.vars[0]),)), D),)

        case RuleName.CUT:
            sub = hole()
            if sub is None or b.principal is None:
                return None
            if sort_config(sub) != sort(b.principal):
                return None
            return (
                Sequent(sub, b.principal),
                Sequent(plug(b.ctx, (vector(b.principal, b.vars[0]),)), D),
            )

    return None


def check_application(app: RuleApplication) -> bool:
    """Replay the schema: do the recorded binding and premises give the conclusion?"""
    rebuilt = premises_of(app.rule, app.conclusion, app.binding)
    return rebuilt is not None and rebuilt == app.premises


# ---------------------------------------------------------------------------
# Backward enumeration
# ---------------------------------------------------------------------------


def backward_applications(goal: Sequent, v: CalculusVariant, alloc=None) -> list[RuleApplication]:
    """Every rule instance of the variant whose conclusion is the goal.

    New premise occurrences get fresh labels from the allocator; the complete
    list is returned in a canonical order.
    """
    check_variant(goal, v)
    if alloc is None:
        alloc = make_alloc(goal)
    available = rules_available(v)
    G, D = goal.antecedent, goal.succedent
    decomps = contexts_of(G)
    candidates: list[tuple[RuleName, Binding]] = []

    # Axioms and right rules
    if len(G) == 1 and is_vector(G[0]) and G[0].formula == D:
        candidates.append((RuleName.ID, Binding(vars=(G[0].label,))))
    match D:
        case UnitI():
            candidates.append((RuleName.I_R, Binding()))
        case UnitJ():
            candidates.append((RuleName.J_R, Binding()))
        case Over():
            candidates.append((RuleName.OVER_R, Binding(vars=(alloc(),))))
        case Under():
            candidates.append((RuleName.UNDER_R, Binding(vars=(alloc(),))))
        case Prod():
            for i in range(len(G) + 1):
                if sort_config(G[:i]) == sort(D.a):
                    candidates.append((RuleName.PROD_R, Binding(split=i)))
        case CircUp():
            candidates.append((RuleName.UP_R, Binding(vars=(alloc(),))))
        case CircDown():
            candidates.append((RuleName.DOWN_R, Binding(vars=(alloc(),))))
        case WProd():
            for ctx, sub in decomps:
                if seps_before(ctx) + 1 == D.k and sort_config(sub) == sort(D.b):
                    candidates.append((RuleName.WPROD_R, Binding(ctx=ctx)))
        case BracketInv():
            candidates.append((RuleName.BRINV_R, Binding()))
        case Diamond():
            if len(G) == 1 and isinstance(G[0], Brack):
                candidates.append((RuleName.DIA_R, Binding()))
        case Bang():
            if all(_bang_occ(i) for i in G):
                candidates.append((RuleName.BANG_R, Binding()))
        case Quest():
            candidates.append((RuleName.QUEST_R, Binding()))
            if RuleName.QUEST_M in available:
                for i in range(1, len(G)):
                    candidates.append((RuleName.QUEST_M, Binding(split=i)))
            if RuleName.QUEST_MR in available:
                for i in range(1, len(G)):
                    candidates.append((RuleName.QUEST_MR, Binding(split=i)))

    # Left and structural rules, driven by hole contents
    cut_pool: list[Formula] = []
    if RuleName.CUT in available:
        pool = set()
        for o in occurrences(G):
            pool |= subformulas(o.formula)
        pool |= subformulas(D)
        cut_pool = sorted((f for f in pool if formula_allowed(f, v)), key=show_formula)

    for ctx, sub in decomps:
        if len(sub) == 1:
            item = sub[0]
            if isinstance(item, Occ) or isinstance(item, Seg):
                f = item.formula
                if is_vector(item):
                    match f:
                        case Prod():
                            candidates.append((RuleName.PROD_L,
                                               Binding(ctx=ctx, principal=f,
                                                       vars=(item.label, alloc(), alloc()))))
                        case UnitI():
                            candidates.append((RuleName.I_L, Binding(ctx=ctx, vars=(item.label,))))
                        case UnitJ():
                            candidates.append((RuleName.J_L, Binding(ctx=ctx, vars=(item.label,))))
                        case WProd():
                            candidates.append((RuleName.WPROD_L,
                                               Binding(ctx=ctx, principal=f,
                                                       vars=(item.label, alloc(), alloc()))))
                        case Diamond():
                            candidates.append((RuleName.DIA_L,
                                               Binding(ctx=ctx, principal=f, vars=(item.label,))))
                        case Bang() if v.has_bang:
                            candidates.append((RuleName.BANG_L,
                                               Binding(ctx=ctx, principal=f, vars=(item.label,))))
                        case Quest() if RuleName.QUEST_L in available:
                            if isinstance(D, Quest):
                                others = [o for o in occurrences(G) if not _bang_occ(o)]
                                if others == [item]:
                                    candidates.append((RuleName.QUEST_L,
                                                       Binding(ctx=ctx, vars=(alloc(),))))
                if isinstance(item, Seg) and isinstance(f, CircUp):
                    if all(filler == (Sep(),) for i, filler in enumerate(item.fillers) if i != f.k - 1):
                        if sort_config(item.fillers[f.k - 1]) == sort(f.b):
                            candidates.append((RuleName.UP_L,
                                               Binding(ctx=ctx, principal=f,
                                                       vars=(item.label, alloc()))))
            elif isinstance(item, Brack):
                inner = item.inner
                if len(inner) == 1 and _vector_of(inner[0], BracketInv):
                    candidates.append((RuleName.BRINV_L,
                                       Binding(ctx=ctx, principal=inner[0].formula,
                                               vars=(inner[0].label,))))

        if sub:
            head, last = sub[0], sub[-1]
            if _vector_of(head, Over) and sort_config(sub[1:]) == sort(head.formula.b):
                candidates.append((RuleName.OVER_L,
                                   Binding(ctx=ctx, principal=head.formula,
                                           vars=(head.label, alloc()))))
            if _vector_of(last, Under) and sort_config(sub[:-1]) == sort(last.formula.a):
                candidates.append((RuleName.UNDER_L,
                                   Binding(ctx=ctx, principal=last.formula,
                                           vars=(last.label, alloc()))))
            if any(_vector_of(i, CircDown) for i in _items_anywhere(sub)):
                for ictx, isub in contexts_of(sub):
                    if len(isub) == 1 and _vector_of(isub[0], CircDown):
                        f = isub[0].formula
                        if seps_before(ictx) + 1 != f.k:
                            continue
                        gamma = plug(ictx, (Sep(),))
                        if sort_config(gamma) == sort(f.a):
                            candidates.append((RuleName.DOWN_L,
                                               Binding(ctx=ctx, inner_ctx=ictx, principal=f,
                                                       vars=(isub[0].label, alloc()))))
            if v.has_bang and len(sub) >= 2:
                if _bang_occ(head):
                    candidates.append((RuleName.BANG_P_LEFT, Binding(ctx=ctx)))
                if _bang_occ(last):
                    candidates.append((RuleName.BANG_P_RIGHT, Binding(ctx=ctx)))
            if v.has_bang and not v.bracketed_contraction and all(_bang_occ(i) for i in sub):
                candidates.append((RuleName.BANG_C,
                                   Binding(ctx=ctx, block=len(sub),
                                           vars=tuple(alloc() for _ in sub))))
            if v.bracketed_contraction:
                n = 0
                while n < len(sub) and _bang_occ(sub[n]):
                    n += 1
                for width in range(1, n + 1):
                    candidates.append((RuleName.BANG_CB,
                                       Binding(ctx=ctx, block=width,
                                               vars=tuple(alloc() for _ in range(width)))))
            if RuleName.QUEST_E in available and len(sub) == 2:
                a1, a2 = sub
                if (isinstance(a1, Occ) and isinstance(a2, Occ)
                        and isinstance(a1.formula, Quest) and a1.formula == a2.formula):
                    candidates.append((RuleName.QUEST_E, Binding(ctx=ctx, vars=(alloc(),))))
            for f in cut_pool:
                if sort_config(sub) == sort(f):
                    candidates.append((RuleName.CUT,
                                       Binding(ctx=ctx, principal=f, vars=(alloc(),))))

    apps = []
    for rule, binding in candidates:
        premises = premises_of(rule, goal, binding)
        if premises is not None:
            apps.append(RuleApplication(rule, goal, premises, binding))
    apps.sort(key=RuleApplication.key)
    return apps


def _items_anywhere(c: Config):
    for item in c:
        yield item
        if isinstance(item, Seg):
            for f in item.fillers:
                yield from _items_anywhere(f)
        elif isinstance(item, Brack):
            yield from _items_anywhere(item.inner)

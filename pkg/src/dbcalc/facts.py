"""Randomized rule-instance generators and corpus builders.

Used by the fact checks on the degree of contraction (monotonicity under
logical and bracket rules, strict decrease under bracketed contraction,
superadditivity under restricted mingle), by the Cut admissibility probe, and
by the terminating-search stress corpus.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .config import (
    Brack,
    Occ,
    Sep,
    Sequent,
    degree_of_contraction,
    length_sequent,
    sort_config,
    vector,
)
from .formula import (
    Atom,
    Bang,
    BracketInv,
    CircDown,
    CircUp,
    Diamond,
    Formula,
    FormulaError,
    Over,
    Prod,
    Quest,
    Under,
    UnitI,
    UnitJ,
    WProd,
    sort,
)
from .rules import (
    DB_BANG_B_QUEST_R,
    DB_BANG_QUEST,
    STRUCTURAL_RULES,
    CalculusVariant,
    RuleName,
    backward_applications,
)


# ---------------------------------------------------------------------------
# Formula and sequent pools
# ---------------------------------------------------------------------------


def formula_levels(atoms: tuple[str, ...], max_conn: int, v: CalculusVariant,
                   allow_brackets: bool = True) -> list[list[Formula]]:
    """All variant-legal formulas over the atoms, grouped by connective count.

    Wrap indices are fixed at 1; bracket modalities can be switched off.
    """
    levels: list[list[Formula]] = [[Atom(a) for a in atoms]]
    for c in range(1, max_conn + 1):
        out: list[Formula] = []
        seen = set()

        def add(make):
            try:
                f = make()
            except FormulaError:
                return
            if f not in seen:
                seen.add(f)
                out.append(f)

        if c == 1:
            add(UnitI)
            add(UnitJ)
        for f in levels[c - 1]:
            if allow_brackets:
                add(lambda: Diamond(f))
                add(lambda: BracketInv(f))
            if v.has_bang:
                add(lambda: Bang(f))
            if v.has_quest:
                add(lambda: Quest(f))
        for i in range(c):
            for a in levels[i]:
                for b in levels[c - 1 - i]:
                    add(lambda: Over(a, b))
                    add(lambda: Under(a, b))
                    add(lambda: Prod(a, b))
                    add(lambda: CircUp(1, a, b))
                    add(lambda: CircDown(1, a, b))
                    add(lambda: WProd(1, a, b))
        levels.append(out)
    return levels


def _flat(levels, max_conn=None) -> list[Formula]:
    pool = []
    for lv in levels[: None if max_conn is None else max_conn + 1]:
        pool.extend(lv)
    return pool


def random_item(rng: random.Random, pool: list[Formula], p_sep=0.1, p_brack=0.15):
    r = rng.random()
    if r < p_sep:
        return Sep()
    if r < p_sep + p_brack:
        inner = tuple(vector(rng.choice(pool)) for _ in range(rng.randint(0, 2)))
        return Brack(inner)
    return vector(rng.choice(pool))


def random_sequent(rng: random.Random, pool: list[Formula], max_items: int = 4,
                   attempts: int = 200) -> Sequent:
    """A random sort-balanced sequent; succedent drawn to match the antecedent."""
    by_sort: dict[int, list[Formula]] = {}
    for f in pool:
        by_sort.setdefault(sort(f), []).append(f)
    for _ in range(attempts):
        items = tuple(random_item(rng, pool) for _ in range(rng.randint(0, max_items)))
        s = sort_config(items)
        if s in by_sort:
            return Sequent(items, rng.choice(by_sort[s]))
    raise FormulaError("could not build a balanced sequent from this pool")


# ---------------------------------------------------------------------------
# Degree-of-contraction fact checks
# ---------------------------------------------------------------------------

LOGICAL_AND_BRACKET = frozenset(
    r for r in RuleName
    if r not in STRUCTURAL_RULES and r not in (RuleName.ID, RuleName.I_R, RuleName.J_R)
)


@dataclass
class FactsReport:
    seed: int
    checked: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return not any(self.violations.values())

    def summary(self) -> str:
        lines = []
        for name in sorted(self.checked):
            bad = len(self.violations.get(name, []))
            lines.append(f"fact{name}: {self.checked[name]} instances, {bad} violations")
        return "\n".join(lines)


def fact1_instances(rng: random.Random, count: int):
    """Logical/bracket rule instances whose premises all have dc >= 0."""
    v = DB_BANG_QUEST
    levels = formula_levels(("n", "s"), 2, v)
    pool = _flat(levels)
    out = []
    while len(out) < count:
        goal = random_sequent(rng, pool)
        for app in backward_applications(goal, v):
            if app.rule not in LOGICAL_AND_BRACKET:
                continue
            if any(degree_of_contraction(p) < 0 for p in app.premises):
                continue
            out.append(app)
            if len(out) >= count:
                break
    return out


def fact2_instances(rng: random.Random, count: int):
    """Bracketed-contraction instances whose contracted block is bracket-free."""
    v = DB_BANG_B_QUEST_R
    levels = formula_levels(("n", "s"), 1, v, allow_brackets=False)
    bang_pool = [Bang(f) for f in _flat(levels) if sort(f) == 0]
    other_pool = _flat(formula_levels(("n", "s"), 1, v))
    out = []
    while len(out) < count:
        items = []
        for _ in range(rng.randint(1, 4)):
            if rng.random() < 0.6:
                items.append(Occ(rng.choice(bang_pool)))
            else:
                items.append(random_item(rng, other_pool, p_sep=0.0))
        sort0 = [f for f in other_pool if sort(f) == sort_config(tuple(items))]
        if not sort0:
            continue
        goal = Sequent(tuple(items), rng.choice(sort0))
        for app in backward_applications(goal, v):
            if app.rule is RuleName.BANG_CB:
                out.append(app)
                if len(out) >= count:
                    break
    return out


def fact3_instances(rng: random.Random, count: int):
    """Restricted-mingle instances over bracket-free type occurrences."""
    v = DB_BANG_B_QUEST_R
    levels = formula_levels(("n", "s"), 2, v, allow_brackets=False)
    pool = [f for f in _flat(levels) if sort(f) == 0]
    quest_ops = [f for f in pool if sort(f) == 0]
    out = []
    while len(out) < count:
        items = tuple(Occ(rng.choice(pool)) for _ in range(rng.randint(2, 5)))
        goal = Sequent(items, Quest(rng.choice(quest_ops)))
        for app in backward_applications(goal, v):
            if app.rule is RuleName.QUEST_MR:
                out.append(app)
                if len(out) >= count:
                    break
    return out


def run_facts(seed: int = 0, per_class: int = 1000) -> FactsReport:
    """Check the three degree-of-contraction facts on randomized instances."""
    rng = random.Random(seed)
    report = FactsReport(seed)

    apps = fact1_instances(rng, per_class)
    report.checked[1] = len(apps)
    report.violations[1] = [
        a for a in apps
        if any(degree_of_contraction(a.conclusion) < degree_of_contraction(p) for p in a.premises)
    ]

    apps = fact2_instances(rng, per_class)
    report.checked[2] = len(apps)
    report.violations[2] = [
        a for a in apps
        if not degree_of_contraction(a.conclusion) > degree_of_contraction(a.premises[0])
    ]

    apps = fact3_instances(rng, per_class)
    report.checked[3] = len(apps)
    report.violations[3] = [
        a for a in apps
        if not degree_of_contraction(a.conclusion)
        >= degree_of_contraction(a.premises[0]) + degree_of_contraction(a.premises[1])
    ]
    return report


# ---------------------------------------------------------------------------
# Probe corpus and terminating-search corpus
# ---------------------------------------------------------------------------


def _ante_choices(levels, budget: int):
    """Single antecedent items costing exactly `budget` connectives."""
    for f in levels[budget]:
        yield vector(f)
        if sort(f) == 0:
            yield Brack((Occ(f),))
    if budget == 0:
        yield Sep()
        yield Brack(())


def _antecedents(levels, budget: int, slots: int):
    if budget == 0:
        yield ()
    if slots == 0:
        return
    for c in range(budget + 1):
        for item in _ante_choices(levels, c):
            for rest in _antecedents(levels, budget - c, slots - 1):
                yield (item,) + rest


def probe_corpus(v: CalculusVariant, atoms: tuple[str, ...] = ("n", "s"),
                 max_conn: int = 3, max_items: int = 2,
                 exhaustive_conn: int = 1, stratum_cap: int = 600,
                 seed: int = 2024) -> list[Sequent]:
    """Sort-balanced sequents over the atoms with at most max_conn connectives.

    Exhaustive up to exhaustive_conn total connectives; each stratum above
    that contributes stratum_cap distinct seeded-random members.  Structural
    caps: at most max_items antecedent items, wrap indices 1, brackets only
    around one sort-0 occurrence or empty.
    """
    rng = random.Random(seed)
    levels = formula_levels(atoms, max_conn, v)
    full: list[Sequent] = []
    for total in range(exhaustive_conn + 1):
        for succ_conn in range(total + 1):
            for succ in levels[succ_conn]:
                target = sort(succ)
                for ante in _antecedents(levels, total - succ_conn, max_items):
                    if sort_config(ante) == target:
                        full.append(Sequent(ante, succ))
    choice_cache = {c: list(_ante_choices(levels, c)) for c in range(max_conn + 1)}
    for total in range(exhaustive_conn + 1, max_conn + 1):
        stratum: set = set()
        seqs: list[Sequent] = []
        misses = 0
        while len(stratum) < stratum_cap and misses < 50 * stratum_cap:
            succ_conn = rng.randint(0, total)
            succ = rng.choice(levels[succ_conn])
            ante_budget = total - succ_conn
            items = []
            left = ante_budget
            for _ in range(rng.randint(0, max_items)):
                c = rng.randint(0, left)
                items.append(rng.choice(choice_cache[c]))
                left -= c
            if left != 0 or sort_config(tuple(items)) != sort(succ):
                misses += 1
                continue
            seq = Sequent(tuple(items), succ)
            if seq.key() in stratum:
                misses += 1
                continue
            stratum.add(seq.key())
            seqs.append(seq)
        full.extend(seqs)
    return full


def polar_corpus(n: int = 200, max_length: int = 8, seed: int = 7,
                 v: CalculusVariant = DB_BANG_B_QUEST_R) -> list[Sequent]:
    """Random polar-bracket-non-negative sequents for the terminating search.

    Exponential operands are drawn bracket-free, so every formula passes the
    polarity restriction; sequents mix provable and unprovable goals.
    """
    rng = random.Random(seed)
    bare = formula_levels(("n", "s"), 2, CalculusVariant("db"), allow_brackets=False)
    exp_ops = [f for f in _flat(bare, 1) if sort(f) == 0]
    base = formula_levels(("n", "s"), 1, CalculusVariant("db"))
    pool = _flat(base) + [Bang(f) for f in exp_ops] + [Quest(f) for f in exp_ops]
    pool += [Over(Quest(f), f) for f in exp_ops[:4]] + [Under(Bang(f), f) for f in exp_ops[:4]]
    out = []
    while len(out) < n:
        seq = random_sequent(rng, pool, max_items=4)
        if length_sequent(seq) <= max_length:
            out.append(seq)
    return out

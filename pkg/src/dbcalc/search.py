"""Backward Cut-free proof search.

Two budgets:

* measure mode — for the calculi whose Cut-free search space is finite
  (db, db-bang-b, db-bang-b-quest-r on goals whose formulas keep bracket
  modalities out of exponentials).  Search is exhaustive and terminates with
  no depth cap: every expansion either strictly decreases the lexicographic
  measure (degree of contraction, length) or is an equal-measure structural
  move guarded by a path-visited set.
* depth mode — bounds derivation height; the only honest budget for the
  unrestricted-exponential calculi.

Failures are memoized; a failure observed while an ancestor cycle was pruned
inside the subtree is only cached when the pruned ancestor belongs to that
subtree, which keeps the memo sound for completeness.
"""

from __future__ import annotations

import itertools
import json
import sys
from dataclasses import dataclass, field, replace

from .config import (
    Brack,
    Config,
    Occ,
    Sep,
    Sequent,
    degree_of_contraction,
    label_all,
    labels_of,
    length_sequent,
    measure,
    occurrences,
    show_sequent,
)
from .formula import Bang, Formula, Quest, is_polar_bracket_nonneg, show_formula
from .rules import (
    ALL_VARIANTS,
    STRUCTURAL_RULES,
    CalculusVariant,
    DB_BANG_QUEST,
    RuleApplication,
    RuleName,
    VariantError,
    backward_applications,
    check_application,
    make_alloc,
)
from . import semantics

sys.setrecursionlimit(100000)

_INF = 1 << 60

MEASURE_TAGS = frozenset({"db", "db-bang-b", "db-bang-b-quest-r"})


class BudgetError(ValueError):
    pass


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    mode: str  # "measure" | "depth"
    depth: int | None = None
    all_proofs: bool = False

    def __post_init__(self):
        if self.mode not in ("measure", "depth"):
            raise BudgetError(f"unknown budget mode {self.mode!r}")
        if self.mode == "depth" and (self.depth is None or self.depth < 1):
            raise BudgetError("depth mode needs a positive depth")

    @staticmethod
    def measure_mode(all_proofs: bool = False) -> "SearchBudget":
        return SearchBudget("measure", None, all_proofs)

    @staticmethod
    def depth_mode(depth: int, all_proofs: bool = False) -> "SearchBudget":
        return SearchBudget("depth", depth, all_proofs)


@dataclass(frozen=True)
class Derivation:
    app: RuleApplication
    children: tuple["Derivation", ...] = ()
    term: semantics.SemTerm | None = None

    @property
    def conclusion(self) -> Sequent:
        return self.app.conclusion

    @property
    def rule(self) -> RuleName:
        return self.app.rule

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()

    def with_term(self) -> "Derivation":
        return replace(self, term=semantics.extract(self))


def derivation_key(d: Derivation):
    return (d.app.key(), tuple(derivation_key(c) for c in d.children))


def check_derivation(d: Derivation) -> bool:
    """Every node replays, children line up with premises, leaves are axioms."""
    if not check_application(d.app):
        return False
    if tuple(c.conclusion for c in d.children) != d.app.premises:
        return False
    if not d.children and d.app.rule not in (RuleName.ID, RuleName.I_R, RuleName.J_R):
        return False
    return all(check_derivation(c) for c in d.children)


def goal_is_polar(goal: Sequent) -> bool:
    return all(
        is_polar_bracket_nonneg(o.formula) for o in occurrences(goal.antecedent)
    ) and is_polar_bracket_nonneg(goal.succedent)


def _ensure_labels(goal: Sequent) -> Sequent:
    labels = labels_of(goal.antecedent)
    if all(lbl is not None for lbl in labels) and len(set(labels)) == len(labels):
        return goal
    counter = itertools.count()
    return Sequent(label_all(goal.antecedent, lambda: f"x{next(counter)}"), goal.succedent)


def _explore_order(app: RuleApplication):
    if app.rule in (RuleName.ID, RuleName.I_R, RuleName.J_R):
        rank = 0
    elif app.rule in STRUCTURAL_RULES:
        rank = 2
    else:
        rank = 1
    return (rank,) + app.key()


_P_RULES = (RuleName.BANG_P_LEFT, RuleName.BANG_P_RIGHT)


class _Searcher:
    """Reusable search state for one (variant, budget mode) pair."""

    def __init__(self, v: CalculusVariant, budget: SearchBudget, prune_dc: bool):
        self.v = v
        self.budget = budget
        self.prune_dc = prune_dc
        self.fail_plain: set = set()          # measure mode: unprovable keys
        self.fail_depth: dict = {}            # depth mode: key -> max budget known to fail
        self.expanded = 0

    def search(self, seq: Sequent, path: dict, remaining: int | None) -> tuple[list[Derivation], int]:
        if self.budget.mode == "measure":
            return self._search_measure(seq), _INF
        return self._search_depth(seq, path, remaining)

    # -- measure mode -------------------------------------------------------
    #
    # Permutation moves keep the measure and the antecedent item multiset;
    # every other rule strictly shrinks (measure, item count) lexically, so
    # handling the whole permutation orbit of a goal as one unit removes all
    # cycles: failures memoize unconditionally and recursion is well founded.

    def _orbit(self, seq: Sequent):
        """The !P-reachability class of seq, with one canonical chain each."""
        start = seq.key()
        members = {start: seq}
        parent: dict = {start: None}
        order = [start]
        apps_cache = {}
        queue = [seq]
        while queue:
            m = queue.pop(0)
            apps = backward_applications(m, self.v)
            apps_cache[m.key()] = apps
            for app in apps:
                if app.rule in _P_RULES:
                    p = app.premises[0]
                    pk = p.key()
                    if pk not in members:
                        members[pk] = p
                        parent[pk] = (m.key(), app)
                        order.append(pk)
                        queue.append(p)
        return members, parent, order, apps_cache

    def _search_measure(self, seq: Sequent) -> list[Derivation]:
        key = seq.key()
        if degree_of_contraction(seq) < 0 or key in self.fail_plain:
            return []
        self.expanded += 1
        members, parent, order, apps_cache = self._orbit(seq)
        mu = measure(seq)
        found: list[Derivation] = []
        for mkey in order:
            chain = []
            walk = parent[mkey]
            while walk is not None:
                pk, app = walk
                chain.append(app)
                walk = parent[pk]
            for app in apps_cache[mkey]:
                if app.rule in _P_RULES:
                    continue
                if any(degree_of_contraction(p) < 0 for p in app.premises):
                    continue
                if any(measure(p) > mu for p in app.premises):
                    continue  # schema edges never increase the measure; guard anyway
                lists: list[list[Derivation]] = []
                ok = True
                for p in app.premises:
                    subs = self._search_measure(p)
                    if not subs:
                        ok = False
                        break
                    lists.append(subs)
                if not ok:
                    continue
                for combo in itertools.product(*lists):
                    d = Derivation(app, combo)
                    for step in chain:  # wrap the permutation moves back on
                        d = Derivation(step, (d,))
                    found.append(d)
                    if not self.budget.all_proofs:
                        return found
        if not found:
            self.fail_plain.update(members)
        return found

    # -- depth mode ----------------------------------------------------------
    #
    # Height-bounded search with a path-visited set (repeat-free derivations).
    # Failures are memoized per remaining budget, but only when the failure
    # did not lean on a cycle against an ancestor outside this subtree.

    def _search_depth(self, seq: Sequent, path: dict, remaining: int) -> tuple[list[Derivation], int]:
        key = seq.key()
        if self.prune_dc and degree_of_contraction(seq) < 0:
            return [], _INF
        if remaining <= 0:
            return [], _INF
        if self.fail_depth.get(key, 0) >= remaining:
            return [], _INF
        # every occurrence is consumed by its own axiom leaf, and a
        # height-r tree has at most 2^(r-1) leaves
        if len(occurrences(seq.antecedent)) > (1 << (remaining - 1)):
            return [], _INF
        my_index = len(path)
        path[key] = my_index
        self.expanded += 1
        found: list[Derivation] = []
        min_dep = _INF
        try:
            for app in sorted(backward_applications(seq, self.v), key=_explore_order):
                if self.prune_dc and any(degree_of_contraction(p) < 0 for p in app.premises):
                    continue
                lists: list[list[Derivation]] = []
                ok = True
                for p in app.premises:
                    pk = p.key()
                    if pk in path:
                        min_dep = min(min_dep, path[pk])
                        ok = False
                        break
                    subs, dep = self._search_depth(p, path, remaining - 1)
                    min_dep = min(min_dep, dep)
                    if not subs:
                        ok = False
                        break
                    lists.append(subs)
                if not ok:
                    continue
                for combo in itertools.product(*lists):
                    found.append(Derivation(app, combo))
                    if not self.budget.all_proofs:
                        return found, _INF
        finally:
            del path[key]
        if found:
            return found, _INF
        if min_dep >= my_index:
            if self.fail_depth.get(key, 0) < remaining:
                self.fail_depth[key] = remaining
            return [], _INF
        return [], min_dep


def make_searcher(v: CalculusVariant, budget: SearchBudget, polar: bool) -> _Searcher:
    """A searcher whose failure memo may be shared across many goals."""
    return _Searcher(v, budget, prune_dc=polar)


def prove(goal: Sequent, v: CalculusVariant, budget: SearchBudget,
          searcher: _Searcher | None = None) -> list[Derivation]:
    """All Cut-free derivations of the goal under the budget.

    Measure mode is complete (the search space is finite); depth mode returns
    the derivations of height <= depth.  Derivations never repeat a sequent
    along a path (cycles of structural rules are pruned), and come back in a
    canonical order.  With all_proofs off, the first derivation short-circuits.
    """
    polar = goal_is_polar(goal)
    if budget.mode == "measure":
        if v.tag not in MEASURE_TAGS or v.with_cut or v.with_expansion:
            raise BudgetError(f"measure mode is not available for calculus {v.tag}"
                              + (" with Cut/expansion" if v.with_cut or v.with_expansion else ""))
        if not polar:
            raise BudgetError("measure mode needs polar-bracket-non-negative formulas")
    goal = _ensure_labels(goal)
    if searcher is None:
        searcher = _Searcher(v, budget, prune_dc=polar)
    else:
        if (searcher.v, searcher.budget.mode, searcher.budget.all_proofs) != (v, budget.mode, budget.all_proofs):
            raise SearchError("shared searcher does not match this variant/budget")
        if searcher.prune_dc and not polar:
            # cached failures were computed on polar subgoals, where the dc
            # prune is sound; turning it off only widens later searches
            searcher.prune_dc = False
    derivs, _ = searcher.search(goal, {}, budget.depth)
    derivs.sort(key=derivation_key)
    return derivs


def provable(goal: Sequent, v: CalculusVariant, budget: SearchBudget) -> bool:
    return bool(prove(goal, v, replace(budget, all_proofs=False)))


def naive_derivations(goal: Sequent, v: CalculusVariant, depth: int,
                      path: frozenset = frozenset()) -> list[Derivation]:
    """Plain height-bounded enumeration: no memo, no measure, no dc pruning.

    Shares the repeat-free convention with prove (a premise equal to a sequent
    on the current path is skipped) so the two agree on derivation sets.
    """
    if depth <= 0:
        return []
    key = goal.key()
    if key in path:
        return []
    below = path | {key}
    out = []
    for app in backward_applications(goal, v):
        lists = [naive_derivations(p, v, depth - 1, below) for p in app.premises]
        if all(lists) or not app.premises:
            for combo in itertools.product(*lists):
                out.append(Derivation(app, combo))
    out.sort(key=derivation_key)
    return out


# ---------------------------------------------------------------------------
# The generalized mingle construction
# ---------------------------------------------------------------------------


def _select_app(seq: Sequent, v: CalculusVariant, rule_names, premise_keys) -> RuleApplication:
    for app in backward_applications(seq, v):
        if app.rule in rule_names and tuple(p.key() for p in app.premises) == premise_keys:
            return app
    raise SearchError(f"no {rule_names} application of {show_sequent(seq)} with the expected premises")


def derive_gm(delta_prefix, gamma1: Config, gamma2: Config, delta_suffix,
              a: Formula, premise_depth: int = 8,
              premises: tuple[Derivation, Derivation] | None = None) -> Derivation:
    """Cut-free derivation of !D1, G1, G2, !D2 => ?A from the two flank premises
    !D1, Gi, !D2 => ?A: one mingle, then the permutation steps that regroup the
    duplicated flanks, then one block contraction per nonempty flank.
    """
    v = DB_BANG_QUEST
    d1 = tuple(delta_prefix)
    d2 = tuple(delta_suffix)
    for f in d1 + d2:
        if not isinstance(f, Bang):
            raise SearchError("flank formulas must be !-prefixed")
    root = _ensure_labels(Sequent(
        tuple(Occ(f) for f in d1) + tuple(gamma1) + tuple(gamma2) + tuple(Occ(f) for f in d2),
        Quest(a),
    ))
    items = root.antecedent
    m1, n1, n2, m2 = len(d1), len(gamma1), len(gamma2), len(d2)
    p1 = list(items[:m1])
    g1 = list(items[m1:m1 + n1])
    g2 = list(items[m1 + n1:m1 + n1 + n2])
    p2 = list(items[m1 + n1 + n2:])

    def seq_of(item_list) -> Sequent:
        return Sequent(tuple(item_list), root.succedent)

    # Conclusion states bottom-up: the root, one per block contraction, then
    # one per single permutation move, ending at the mingle conclusion.
    contraction_states = []
    state = p1 + g1 + g2 + p2
    if m1:
        state = p1 + state
        contraction_states.append(list(state))
    if m2:
        state = state + p2
        contraction_states.append(list(state))

    # Forward permutation chain from the mingle conclusion down to `state`.
    mingle_state = p1 + g1 + p2 + p1 + g2 + p2
    perm_chain = [list(mingle_state)]
    cur = list(mingle_state)
    if g1 or p2:
        for i in range(m1):
            pos = cur.index(p1[i], m1)  # the copy, past the original prefix
            cur = cur[:m1 + i] + [cur[pos]] + cur[m1 + i:pos] + cur[pos + 1:]
            perm_chain.append(list(cur))
    if n2:
        for j in range(m2 - 1, -1, -1):
            pos = m1 + m1 + n1 + j
            item = cur[pos]
            cur = cur[:pos] + cur[pos + 1:pos + 1 + n2] + [item] + cur[pos + 1 + n2:]
            perm_chain.append(list(cur))
    if cur != (contraction_states[-1] if contraction_states else list(items)):
        raise SearchError("permutation planning failed")

    # Top-down plan: rule choices with expected (label-free) premise keys.
    plan: list[tuple[frozenset, tuple]] = []
    up = [list(items)] + contraction_states
    for lower, upper in zip(up, up[1:]):
        plan.append((frozenset({RuleName.BANG_C}), (seq_of(upper).key(),)))
    for lower, upper in zip(perm_chain[len(perm_chain) - 1::-1], perm_chain[len(perm_chain) - 2::-1]):
        plan.append((frozenset({RuleName.BANG_P_LEFT, RuleName.BANG_P_RIGHT}),
                     (seq_of(upper).key(),)))
    left = seq_of(p1 + g1 + p2)
    right = seq_of(p1 + g2 + p2)
    plan.append((frozenset({RuleName.QUEST_M}), (left.key(), right.key())))

    def assemble(seq: Sequent, step: int) -> Derivation:
        rules, premise_keys = plan[step]
        app = _select_app(seq, v, rules, premise_keys)
        if RuleName.QUEST_M in rules:
            if premises is None:
                budget = SearchBudget.depth_mode(premise_depth)
                children = []
                for p in app.premises:
                    found = prove(p, v, budget)
                    if not found:
                        raise SearchError(
                            f"flank premise {show_sequent(p)} not provable within depth {premise_depth}")
                    children.append(found[0])
            else:
                children = [_relabel_derivation(d, p) for d, p in zip(premises, app.premises)]
            return Derivation(app, tuple(children))
        return Derivation(app, (assemble(app.premises[0], step + 1),))

    return assemble(root, 0)


def _relabel_derivation(d: Derivation, target_root: Sequent) -> Derivation:
    """Rename every label in d so its root becomes exactly target_root."""
    src = labels_of(d.conclusion.antecedent)
    dst = labels_of(target_root.antecedent)
    if [o.formula for o in occurrences(d.conclusion.antecedent)] != \
            [o.formula for o in occurrences(target_root.antecedent)] \
            or d.conclusion.succedent != target_root.succedent:
        raise SearchError("supplied premise derivation proves a different sequent")
    mapping = dict(zip(src, dst))
    alloc = make_alloc(target_root)

    def rename(lbl):
        if lbl is None:
            return None
        if lbl not in mapping:
            mapping[lbl] = alloc()
        return mapping[lbl]

    def walk(node: Derivation) -> Derivation:
        from .config import map_labels

        app = node.app
        new_binding = replace(
            app.binding,
            vars=tuple(rename(x) if isinstance(x, str) or x is None else x for x in app.binding.vars),
            ctx=_rename_ctx(app.binding.ctx, rename),
            inner_ctx=_rename_ctx(app.binding.inner_ctx, rename),
        )
        new_concl = Sequent(map_labels(app.conclusion.antecedent, rename), app.conclusion.succedent)
        new_prems = tuple(Sequent(map_labels(p.antecedent, rename), p.succedent) for p in app.premises)
        new_app = RuleApplication(app.rule, new_concl, new_prems, new_binding)
        return Derivation(new_app, tuple(walk(c) for c in node.children))

    return walk(d)


def _rename_ctx(ctx, rename):
    from .config import BrackFrame, Context, SegFrame, map_labels

    if ctx is None:
        return None
    parent = ctx.parent
    if parent is not None:
        if isinstance(parent, BrackFrame):
            parent = BrackFrame(_rename_ctx(parent.ctx, rename))
        else:
            parent = SegFrame(
                parent.formula,
                rename(parent.label),
                tuple(map_labels(f, rename) for f in parent.before),
                tuple(map_labels(f, rename) for f in parent.after),
                _rename_ctx(parent.ctx, rename),
            )
    return Context(map_labels(ctx.pre, rename), map_labels(ctx.post, rename), parent)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def derivation_text(d: Derivation, indent: int = 0) -> str:
    lines = [f"{'  ' * indent}{d.app.rule.text}: {show_sequent(d.conclusion)}"]
    for c in d.children:
        lines.append(derivation_text(c, indent + 1))
    return "\n".join(lines)


_LATEX_SUBS = [
    ("\\", "\\backslash "),
    ("=>", "\\Rightarrow "),
    ("<>", "\\langle\\rangle "),
    ("[]-", "[]^{-1}"),
    ("*", "\\bullet "),
]


def _latex_sequent(s: Sequent) -> str:
    text = show_sequent(s)
    for old, new in _LATEX_SUBS:
        text = text.replace(old, new)
    return text


def derivation_latex(d: Derivation) -> str:
    inner = " ".join(derivation_latex(c) for c in d.children)
    rule = d.app.rule.text.replace("\\", "\\backslash ")
    body = f"{inner} \\justifies {_latex_sequent(d.conclusion)} \\using {rule}"
    return f"\\prooftree {body.strip()} \\endprooftree"


def derivation_dict(d: Derivation, include_term: bool = True) -> dict:
    term = None
    if include_term:
        term = semantics.show_term(semantics.normalize(semantics.extract(d)))
    return {
        "rule": d.app.rule.text,
        "sequent": show_sequent(d.conclusion),
        "premises": [derivation_dict(c, include_term) for c in d.children],
        "term": term,
    }


def derivation_json(d: Derivation, include_term: bool = True) -> str:
    return json.dumps(derivation_dict(d, include_term), sort_keys=True,
                      ensure_ascii=False, separators=(", ", ": "))


# ---------------------------------------------------------------------------
# Cut admissibility probe
# ---------------------------------------------------------------------------


@dataclass
class ProbeReport:
    variant: str
    with_expansion: bool
    corpus_size: int
    cut_provable: int
    discrepancies: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.discrepancies

    def summary(self) -> str:
        tag = self.variant + ("+E" if self.with_expansion else "")
        status = "empty discrepancy set" if self.clean else f"{len(self.discrepancies)} DISCREPANCIES"
        return (f"{tag}: corpus {self.corpus_size}, cut-provable {self.cut_provable}, {status}")


def cut_admissibility_probe(v: CalculusVariant, corpus, depth: int = 5,
                            cutfree_depth: int | None = None) -> ProbeReport:
    """Search each corpus sequent with and without Cut and report sequents
    provable with Cut (depth-bounded) but not Cut-free (measure where the
    variant qualifies, depth otherwise).
    """
    v_free = CalculusVariant(v.tag, with_cut=False, with_expansion=v.with_expansion)
    v_cut = CalculusVariant(v.tag, with_cut=True, with_expansion=v.with_expansion)
    if cutfree_depth is None:
        cutfree_depth = depth + 3
    report = ProbeReport(v.tag, v.with_expansion, 0, 0)
    for seq in corpus:
        report.corpus_size += 1
        if _cutfree_provable(seq, v_free, cutfree_depth):
            report.cut_provable += 1  # cut search would find it too (Cut adds rules)
            continue
        if provable(seq, v_cut, SearchBudget.depth_mode(depth)):
            report.cut_provable += 1
            report.discrepancies.append(seq)
    return report


def _cutfree_provable(seq: Sequent, v_free: CalculusVariant, depth: int) -> bool:
    if v_free.tag in MEASURE_TAGS and not v_free.with_expansion and goal_is_polar(seq):
        return provable(seq, v_free, SearchBudget.measure_mode())
    return provable(seq, v_free, SearchBudget.depth_mode(depth))

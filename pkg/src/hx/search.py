"""Exact extremal numbers for tiny instances by include/exclude branch and bound,
plus a deliberately naive oracle used to cross-check it.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb

from . import properties as props
from .core import Hypergraph, ksubsets
from .errors import BadParameters, TooManyCandidates

KINDS = ("cancellative", "union-free", "cover-free", "matching")
PROVED = "proved"
BUDGET_STOPPED = "budget-stopped"
EXACT = "exact"
LOWER_BOUND_ONLY = "lower-bound-only"
ORACLE_LIMIT = 24


@dataclass(frozen=True)
class SearchProblem:
    """One extremal question.  For ``kind="matching"``, ``t`` is the allowed
    matching number and ``r`` the uniformity ``k``."""

    kind: str
    t: int
    n: int
    r: int
    mode: str = EXACT
    node_budget: int | None = None
    time_budget: float | None = None
    max_candidates: int = 64

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParameters(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.mode not in (EXACT, LOWER_BOUND_ONLY):
            raise BadParameters(f"unknown mode {self.mode!r}")
        floor = 0 if self.kind == "matching" else 1
        if self.t < floor or self.r < 1 or self.n < self.r:
            raise BadParameters(f"invalid parameters t={self.t}, n={self.n}, r={self.r}")


@dataclass(frozen=True)
class SearchResult:
    optimum: int
    witness: Hypergraph
    nodes: int
    status: str

    @property
    def proved(self) -> bool:
        return self.status == PROVED


def _coverable(target: int, pool: list[int], j: int) -> bool:
    if not target:
        return True
    if j == 0:
        return False
    low = target & -target
    return any(_coverable(target & ~e, pool, j - 1) for e in pool if e & low)


def _full_check(kind: str, t: int, edges: list[int], r: int, n: int) -> bool:
    h = Hypergraph(n, r, tuple(sorted(edges)))
    if kind == "cancellative":
        return props.is_t_cancellative(h, t).holds
    if kind == "cover-free":
        return props.is_t_cover_free(h, t).holds
    if kind == "union-free":
        return props.is_t_union_free(h, t).holds
    return props.matching_number(h) <= t


def _compatible(kind: str, t: int, cur: list[int], c: int, r: int, n: int) -> bool:
    """Whether ``cur + [c]`` keeps the property, given that ``cur`` has it."""
    size = len(cur) + 1
    if kind == "matching":
        return props.matching_number([e for e in cur if not e & c], r) < t
    if kind == "union-free":
        return _union_free_with(t, cur, c)
    if kind == "cover-free":
        if _coverable(c, [e for e in cur if e & c], t):
            return False
        for b in cur:
            if _coverable(b & ~c, [e for e in cur if e != b and e & b], t - 1):
                return False
        return True
    # below t + 2 edges the property holds vacuously; at exactly t + 2 a short
    # cover elsewhere becomes a violation once c can pad it
    if size < t + 2:
        return True
    if size == t + 2:
        return _full_check(kind, t, cur + [c], r, n)
    for b in cur:
        if _coverable(b ^ c, [e for e in cur if e != b], t):
            return False
    for b, d in combinations(cur, 2):
        target = (b ^ d) & ~c
        if _coverable(target, [e for e in cur if e != b and e != d and e & target], t - 1):
            return False
    return True


def _union_free_with(t: int, cur: list[int], c: int) -> bool:
    everything = cur + [c]
    for j in range(t):
        for rest in combinations(cur, j):
            a = frozenset(rest) | {c}
            u = c
            for e in rest:
                u |= e
            inside = [e for e in everything if e & ~u == 0]
            for size in range(1, t + 1):
                for b in combinations(inside, size):
                    if frozenset(b) == a:
                        continue
                    v = 0
                    for e in b:
                        v |= e
                    if v == u:
                        return False
    return True


def _candidates(n: int, r: int) -> list[int]:
    return list(ksubsets((1 << n) - 1, r))


def extremal_search(p: SearchProblem) -> SearchResult:
    """Maximum size of an r-graph on [n] with the property of ``p``.

    Depth-first include/exclude over colex-ordered candidates.  Each node
    keeps the candidates still compatible with the current family (all four
    properties are hereditary, so an incompatible candidate stays
    incompatible), and prunes when ``|current| + |compatible| <= best``.  The
    first edge is fixed to {0..r-1}, which loses nothing by symmetry.
    """
    total = comb(p.n, p.r)
    if p.mode == EXACT and total > p.max_candidates:
        raise TooManyCandidates(f"C({p.n},{p.r}) = {total} exceeds max_candidates={p.max_candidates}")
    cands = _candidates(p.n, p.r)
    deadline = None if p.time_budget is None else time.monotonic() + p.time_budget
    best: list[int] = []
    nodes = 0
    stopped = False

    def out_of_budget():
        return (p.node_budget is not None and nodes >= p.node_budget) or \
            (deadline is not None and time.monotonic() >= deadline)

    def rec(cur, compat):
        nonlocal best, nodes, stopped
        nodes += 1
        if len(cur) > len(best):
            best = list(cur)
        if stopped or out_of_budget():
            stopped = True
            return
        if not compat or len(cur) + len(compat) <= len(best):
            return
        c, rest = compat[0], compat[1:]
        nxt = [x for x in rest if _compatible(p.kind, p.t, cur + [c], x, p.r, p.n)]
        rec(cur + [c], nxt)
        if len(cur) + len(rest) > len(best):
            rec(cur, rest)

    if cands and _compatible(p.kind, p.t, [], cands[0], p.r, p.n):
        first = cands[0]
        nodes += 1
        best = [first]
        rec([first], [x for x in cands[1:] if _compatible(p.kind, p.t, [first], x, p.r, p.n)])
    witness = Hypergraph(p.n, p.r, tuple(sorted(best)))
    status = PROVED if p.mode == EXACT and not stopped else BUDGET_STOPPED
    return SearchResult(len(best), witness, nodes, status)


# ---------------------------------------------------------------- oracle

def _naive_holds(kind: str, t: int, fam: list[frozenset]) -> bool:
    m = len(fam)
    if kind == "matching":
        return not any(all(a.isdisjoint(b) for a, b in combinations(sub, 2))
                       for sub in combinations(fam, t + 1))
    if kind == "cover-free":
        for i in range(m):
            others = fam[:i] + fam[i + 1:]
            for size in range(1, t + 1):
                for sub in combinations(others, size):
                    if fam[i] <= frozenset().union(*sub):
                        return False
        return True
    if kind == "cancellative":
        for i, j in combinations(range(m), 2):
            others = [fam[x] for x in range(m) if x != i and x != j]
            for sub in combinations(others, t):
                if fam[i] ^ fam[j] <= frozenset().union(*sub):
                    return False
        return True
    unions = {}
    for size in range(1, t + 1):
        for sub in combinations(range(m), size):
            u = frozenset().union(*(fam[x] for x in sub))
            if u in unions:
                return False
            unions[u] = sub
    return True


def brute_force_oracle(p: SearchProblem) -> int:
    """Exhaustive maximum via frozensets and the raw definitions.

    Shares no code with the checkers or with :func:`extremal_search`.
    Subsets are grown edge by edge and a violating set is never extended.
    """
    total = comb(p.n, p.r)
    if total > ORACLE_LIMIT:
        raise TooManyCandidates(f"C({p.n},{p.r}) = {total} exceeds the oracle limit {ORACLE_LIMIT}")
    cands = [frozenset(s) for s in combinations(range(p.n), p.r)]
    best = 0

    def rec(fam, start):
        nonlocal best
        best = max(best, len(fam))
        if len(fam) + total - start <= best:
            return
        for i in range(start, total):
            grown = fam + [cands[i]]
            if _naive_holds(p.kind, p.t, grown):
                rec(grown, i + 1)

    rec([], 0)
    return best


# ---------------------------------------------------------------- matchings

@dataclass(frozen=True)
class MatchingRow:
    n: int
    k: int
    nu: int
    formula: int
    searched: int
    nodes: int

    @property
    def agrees(self) -> bool:
        return self.formula == self.searched


def erdos_matching_table(k: int, t_max: int, scope: int = 64) -> list[MatchingRow]:
    """Rows m((t-1)k, k, t-2) for 2 <= t <= t_max, searched and from C((t-1)k-1, k).

    ``scope`` caps the candidate count handed to :func:`extremal_search`.
    """
    if k < 1 or t_max < 2:
        raise BadParameters(f"need k >= 1 and t_max >= 2, got k={k}, t_max={t_max}")
    rows = []
    for t in range(2, t_max + 1):
        n = (t - 1) * k
        res = extremal_search(SearchProblem("matching", t - 2, n, k, max_candidates=scope))
        rows.append(MatchingRow(n, k, t - 2, comb(n - 1, k), res.optimum, res.nodes))
    return rows

"""Induced, configuration-free packings of a template k-graph into the complete k-graph on [n].

Two candidate generators are available.  ``faithful`` follows the random
red/blue colouring argument: a placement qualifies only if its template
edges are blue and every other k-set on its vertices is red.  ``direct``
skips the colouring and draws injections biased towards lightly used
vertices.  Either way each candidate is accepted only after an exact
conflict check, so every emitted packing is edge-disjoint, induced, and its
vertex-set family has no minus-configuration of size ``2..e``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import mean

from .core import Hypergraph, PackedCopy, PackingRecord, ksubsets, popcount, to_mask, vertices_of
from .errors import BadParameters
from .rng import keyed_uniform, seed_substream

FAITHFUL = "faithful"
DIRECT = "direct"
STRATEGIES = (FAITHFUL, DIRECT)
SHUFFLE_TRIES = 16
DEFAULT_PATIENCE = 2000


def default_epsilon(m: int, k: int) -> Fraction:
    """Red probability 1/(4(m-k)), inside the admissible range (0, 1/(2(m-k)))."""
    return Fraction(1, 4 * (m - k)) if m > k else Fraction(1, 4)


@dataclass
class Coloring:
    """Lazy red/blue colouring of the k-subsets of [n].

    The colour of a k-set is a keyed hash of ``(seed, k-set)``, so nothing is
    materialised and any query order gives the same answers.
    """

    n: int
    k: int
    epsilon: Fraction
    seed: int
    _cache: dict = field(default_factory=dict, repr=False)

    def is_red(self, kset: int) -> bool:
        hit = self._cache.get(kset)
        if hit is None:
            hit = keyed_uniform(self.seed, "color", self.n, self.k, kset) < self.epsilon
            self._cache[kset] = hit
        return hit

    def is_blue(self, kset: int) -> bool:
        return not self.is_red(kset)

    @property
    def blue(self) -> frozenset:
        """Blue k-sets among those queried so far."""
        return frozenset(s for s, red in self._cache.items() if not red)


def color_ksets(n: int, k: int, epsilon, seed: int) -> Coloring:
    epsilon = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    if not 0 <= epsilon <= 1:
        raise BadParameters(f"epsilon must lie in [0, 1], got {epsilon}")
    return Coloring(n, k, epsilon, seed)


@dataclass(frozen=True)
class Placement:
    bijection: tuple[int, ...]
    vertices: int
    edges: tuple[int, ...]

    def as_copy(self) -> PackedCopy:
        return PackedCopy(self.vertices, self.edges, self.bijection)


def place(template: Hypergraph, bijection) -> Placement:
    bijection = tuple(bijection)
    edges = tuple(sorted(to_mask(bijection[v] for v in vertices_of(e)) for e in template.edges))
    return Placement(bijection, to_mask(bijection), edges)


def matches_pattern(template: Hypergraph, placement: Placement, coloring: Coloring) -> bool:
    """Template edges blue, all other k-sets on the placement's vertices red."""
    edges = set(placement.edges)
    for T in ksubsets(placement.vertices, template.r):
        if coloring.is_blue(T) != (T in edges):
            return False
    return True


class PlacementStream:
    """Iterator over candidate placements; stops after ``budget`` samples.

    ``exhausted`` is set when the budget ran out.  ``faithful`` draws
    uniform injections and keeps those matching the colouring.  ``direct``
    picks the image vertices one at a time, never letting the candidate
    share more than ``k`` vertices with an accepted copy or share one of its
    edges, then reshuffles the bijection so shared k-sets avoid the
    candidate's own edges.  Vertex choice prefers
    vertex ``v`` with weight ``1 / (1 + load(v))**2`` where ``load`` counts
    the accepted copies through ``v``.  ``accepted`` is read live, and
    ``patience``/``last_accept`` are set by the packer to end a stalled run.
    """

    def __init__(self, template, n, coloring, accepted, strategy, budget, seed, k=None):
        if strategy not in STRATEGIES:
            raise BadParameters(f"unknown strategy {strategy!r}")
        if strategy == FAITHFUL and coloring is None:
            raise BadParameters("faithful strategy needs a coloring")
        self.template = template
        self.n = n
        self.k = template.r if k is None else k
        self.coloring = coloring
        self.accepted = accepted
        self.strategy = strategy
        self.budget = budget
        self.rng = seed_substream(seed, "packing", "candidates", strategy)
        self.samples = 0
        self.exhausted = False
        self.stalled = False
        self.patience = None
        self.last_accept = 0
        self._load = [0] * n
        self._through: list[list[int]] = [[] for _ in range(n)]
        self._copy_sets: list[tuple[int, tuple[int, ...]]] = []
        self._edge_union = 0
        self._template_edges = frozenset(template.edges)
        self._seen_copies = 0

    def _refresh_load(self):
        copies = self.accepted.copies if self.accepted is not None else []
        for idx in range(self._seen_copies, len(copies)):
            copy = copies[idx]
            self._copy_sets.append((copy.vertices, copy.edges))
            if self.k == 1:
                for e in copy.edges:
                    self._edge_union |= e
            for v in vertices_of(copy.vertices):
                self._load[v] += 1
                self._through[v].append(idx)
        self._seen_copies = len(copies)

    def _draw(self) -> tuple[int, ...] | None:
        m = self.template.n
        if self.strategy == FAITHFUL:
            return tuple(self.rng.sample(range(self.n), m))
        self._refresh_load()
        rng, k, load = self.rng, self.k, self._load
        # weighted order via exponential keys; walking it while skipping
        # blocked vertices is weighted sampling without replacement
        order = sorted(range(self.n), key=lambda v: -rng.random() ** ((1 + load[v]) ** 2))
        inside: dict[int, int] = {}
        chosen: list[int] = []
        blocked = self._edge_union
        for v in order:
            if blocked >> v & 1:
                continue
            chosen.append(v)
            if len(chosen) == m:
                break
            bit = 1 << v
            for i in self._through[v]:
                got = inside.get(i, 0) | bit
                inside[i] = got
                size = popcount(got)
                verts, edges = self._copy_sets[i]
                if size == k:
                    blocked |= verts
                elif size == k - 1:
                    for e in edges:
                        if e & got == got:
                            blocked |= e
        if len(chosen) < m:
            return None
        # shared k-sets must not become edges of the candidate either
        last = 1 << chosen[-1]
        for i in self._through[chosen[-1]]:
            inside[i] = inside.get(i, 0) | last
        shared = [s for s in inside.values() if popcount(s) == k]
        shared = [vertices_of(s) for s in shared]
        for _ in range(SHUFFLE_TRIES):
            rng.shuffle(chosen)
            if not shared:
                break
            pos = {v: u for u, v in enumerate(chosen)}
            if not any(to_mask(pos[v] for v in s) in self._template_edges for s in shared):
                break
        return tuple(chosen)

    def __iter__(self):
        m = self.template.n
        if self.n < m:
            return
        while self.samples < self.budget:
            if self.patience is not None and self.samples - self.last_accept >= self.patience:
                self.stalled = True
                return
            self.samples += 1
            image = self._draw()
            if image is None:
                continue
            cand = place(self.template, image)
            if self.strategy == FAITHFUL and not matches_pattern(self.template, cand, self.coloring):
                continue
            yield cand
        self.exhausted = True


def find_placements_greedy(template: Hypergraph, coloring: Coloring | None, accepted: PackingRecord | None,
                           strategy: str = FAITHFUL, budget: int = 10_000, seed: int = 0,
                           n: int | None = None, k: int | None = None) -> PlacementStream:
    if n is None:
        if coloring is None:
            raise BadParameters("n is required without a coloring")
        n = coloring.n
    return PlacementStream(template, n, coloring, accepted, strategy, budget, seed, k)


# ---------------------------------------------------------------- conflicts

@dataclass(frozen=True)
class Conflict:
    """Why a candidate cannot join the packing.

    ``copies`` are indices into the accepted copies; for a configuration the
    candidate is implicitly the extra member.
    """

    kind: str  # "shared-edge" | "large-intersection" | "intersection-is-edge" | "configuration"
    copies: tuple[int, ...]
    ell: int = 2
    union_size: int | None = None
    kset: tuple[int, ...] | None = None


def minus_threshold(m: int, k: int, ell: int) -> int:
    return ell * m - (ell - 1) * k - 1


def conflicts_with(candidate: Placement, accepted: PackingRecord, e: int, m: int, k: int,
                   incidence: dict | None = None) -> Conflict | None:
    """First violated constraint among edge overlap, inducedness, and minus-configurations.

    A minimal bad configuration is connected in the intersection graph of
    the vertex sets (splitting it into two vertex-disjoint groups would make
    one group bad already).  The accepted family is configuration-free, so a
    new one must contain the candidate; growing connected sets from the
    candidate one size at a time therefore finds a minimal one whenever any
    exists.
    """
    copies = accepted.copies
    if incidence is None:
        incidence = build_incidence(copies)
    cv = candidate.vertices
    overlap = Counter(i for v in vertices_of(cv) for i in incidence.get(v, ()))
    cand_edges = set(candidate.edges)

    for i in sorted(overlap):
        if overlap[i] >= k and cand_edges.intersection(copies[i].edges):
            shared = min(cand_edges.intersection(copies[i].edges))
            return Conflict("shared-edge", (i,), kset=tuple(vertices_of(shared)))
    for i in sorted(overlap):
        size = overlap[i]
        if size > k:
            return Conflict("large-intersection", (i,), 2, popcount(cv | copies[i].vertices))
        if size == k:
            inter = cv & copies[i].vertices
            if inter in cand_edges or inter in copies[i].edges:
                return Conflict("intersection-is-edge", (i,), kset=tuple(vertices_of(inter)))

    for ell in range(3, e + 1):
        found = _bad_connected_set(cv, copies, incidence, overlap, ell, m, k)
        if found is not None:
            members, size = found
            return Conflict("configuration", members, ell, size)
    return None


def build_incidence(copies) -> dict[int, list[int]]:
    inc: dict[int, list[int]] = {}
    for i, c in enumerate(copies):
        for v in vertices_of(c.vertices):
            inc.setdefault(v, []).append(i)
    return inc


def _bad_connected_set(cv, copies, incidence, cand_overlap, ell, m, k):
    """Search connected sets of ``ell - 1`` accepted copies plus the candidate spanning too few vertices."""
    limit = minus_threshold(m, k, ell)
    need = ell - 1

    def rec(chosen, union, frontier, excluded):
        if len(chosen) == need:
            return (tuple(sorted(chosen)), popcount(union)) if popcount(union) <= limit else None
        if len(chosen) == need - 1:
            # last member must add at most limit - |union| new vertices
            budget = limit - popcount(union)
            hits = Counter(i for v in vertices_of(union) for i in incidence.get(v, ()))
            for i in sorted(frontier):
                if m - hits[i] <= budget:
                    return tuple(sorted(chosen + [i])), popcount(union | copies[i].vertices)
            return None
        frontier = sorted(frontier)
        blocked = set(excluded)
        for idx, w in enumerate(frontier):
            rest = set(frontier[idx + 1:])
            new = {i for v in vertices_of(copies[w].vertices) for i in incidence.get(v, ())}
            new -= set(chosen) | {w} | blocked | rest
            found = rec(chosen + [w], union | copies[w].vertices, rest | new, blocked)
            if found is not None:
                return found
            blocked.add(w)
        return None

    return rec([], cv, set(cand_overlap), set())


def replay_conflict(candidate: Placement, accepted: PackingRecord, conflict: Conflict, m: int, k: int) -> bool:
    """Re-derive a reported conflict, including minimality for configurations."""
    copies = accepted.copies
    if conflict.kind == "shared-edge":
        return bool(set(candidate.edges) & set(copies[conflict.copies[0]].edges))
    if conflict.kind == "large-intersection":
        return popcount(candidate.vertices & copies[conflict.copies[0]].vertices) > k
    if conflict.kind == "intersection-is-edge":
        other = copies[conflict.copies[0]]
        inter = candidate.vertices & other.vertices
        return popcount(inter) == k and (inter in candidate.edges or inter in other.edges)
    sets = [candidate.vertices] + [copies[i].vertices for i in conflict.copies]
    ell = len(sets)
    if ell != conflict.ell:
        return False

    def span(idx):
        u = 0
        for i in idx:
            u |= sets[i]
        return popcount(u)

    if span(range(ell)) > minus_threshold(m, k, ell):
        return False
    for size in range(1, ell):
        for sub in itertools.combinations(range(ell), size):
            if span(sub) < size * m - (size - 1) * k:
                return False
    return True


# ---------------------------------------------------------------- packing

def greedy_conflict_free_packing(template: Hypergraph, n: int, k: int, e: int, epsilon=None,
                                 strategy: str = DIRECT, seed: int = 0, target_count: int | None = None,
                                 budget: int = 10_000, patience: int | None = DEFAULT_PATIENCE) -> PackingRecord:
    """Accept conflict-free candidates in draw order until ``target_count`` or the budget.

    ``patience`` stops the run after that many consecutive samples without an
    acceptance (``None`` disables it).  The rule ignores the budget, so a
    larger budget only extends the same run.  The result carries ``flags``
    with the sample count, rejection reasons, ``budget_exhausted`` and
    ``stalled`` (a partial packing is still a valid packing).
    """
    if template.r != k:
        raise BadParameters(f"template must be {k}-uniform, got r={template.r}")
    if e < 2:
        raise BadParameters(f"e must be >= 2, got {e}")
    m = template.n
    if epsilon is None:
        epsilon = default_epsilon(m, k)
    coloring = color_ksets(n, k, epsilon, seed) if strategy == FAITHFUL else None
    record = PackingRecord(n, k, template)
    rejections: Counter = Counter()
    stream = find_placements_greedy(template, coloring, record, strategy, budget, seed, n=n, k=k)
    incidence: dict[int, list[int]] = {}
    stream.patience = patience
    for cand in stream:
        conflict = conflicts_with(cand, record, e, m, k, incidence)
        if conflict is not None:
            rejections[conflict.kind] += 1
            continue
        stream.last_accept = stream.samples
        idx = len(record.copies)
        record.copies.append(cand.as_copy())
        for v in vertices_of(cand.vertices):
            incidence.setdefault(v, []).append(idx)
        if target_count is not None and len(record.copies) >= target_count:
            break
    eps = Fraction(epsilon)
    record.flags = {
        "strategy": strategy,
        "epsilon": [eps.numerator, eps.denominator],
        "e": e,
        "seed": seed,
        "samples": stream.samples,
        "budget": budget,
        "budget_exhausted": stream.exhausted,
        "patience": patience,
        "stalled": stream.stalled,
        "rejections": dict(sorted(rejections.items())),
    }
    if m > k and not eps < Fraction(1, 2 * (m - k)) and strategy == FAITHFUL:
        record.flags["epsilon_outside_proof_range"] = True
    return record


def packing_density(p: PackingRecord, n: int | None = None, k: int | None = None,
                    template: Hypergraph | None = None) -> Fraction:
    """Fraction of the k-subsets of [n] covered by the copies' edges."""
    n = p.n if n is None else n
    k = p.k if k is None else k
    template = p.template if template is None else template
    total = math.comb(n, k)
    if total == 0:
        return Fraction(0)
    return Fraction(len(p.copies) * len(template), total)


def audit_packing(p: PackingRecord, e: int) -> dict:
    """Independent re-check: induced packing plus minus-freeness of the vertex sets."""
    from .properties import is_ell_minus_free, is_induced_packing

    verdicts = {"induced": is_induced_packing(p).holds}
    sets = p.vertex_family()
    m = p.template.n
    if len(set(sets)) != len(sets):
        verdicts["vertex_sets_distinct"] = False
        verdicts["vertex_sets_minus_free"] = False
        return verdicts
    family = Hypergraph(p.n, m, tuple(sorted(sets)))
    verdicts["vertex_sets_minus_free"] = all(
        is_ell_minus_free(family, p.k, ell).holds for ell in range(2, e + 1))
    return verdicts


# ---------------------------------------------------------------- diagnostics

def degree_diagnostics(template: Hypergraph, n: int, k: int, coloring: Coloring | None = None,
                       samples: int | None = None, seed: int = 0, conflict_sample: int = 200,
                       enumeration_limit: int = 200_000) -> dict:
    """Empirical placement degrees of blue k-sets and 2-conflict degrees.

    Enumerates every injection when there are at most ``enumeration_limit``
    of them (or when ``samples`` is None and the count is small), otherwise
    draws ``samples`` random injections.  Nothing here is pass/fail.
    """
    m = template.n
    if n < m:
        return {"mode": "empty", "placements": 0, "degrees": {}, "stats": None, "conflicts": None}
    injections = math.perm(n, m)
    exhaustive = samples is None and injections <= enumeration_limit
    if samples is None and not exhaustive:
        samples = 10_000
    rng = seed_substream(seed, "packing", "diagnostics")

    def draws():
        if exhaustive:
            yield from itertools.permutations(range(n), m)
        else:
            for _ in range(samples):
                yield tuple(rng.sample(range(n), m))

    blue = [T for T in map(to_mask, itertools.combinations(range(n), k))
            if coloring is None or coloring.is_blue(T)]
    degree = dict.fromkeys(blue, 0)
    kept: list[Placement] = []
    count = 0
    for bij in draws():
        pl = place(template, bij)
        if coloring is not None and not matches_pattern(template, pl, coloring):
            continue
        count += 1
        for T in pl.edges:
            degree[T] += 1
        if len(kept) < conflict_sample:
            kept.append(pl)

    if not blue:
        return {"mode": "exhaustive" if exhaustive else "sampled", "placements": 0,
                "degrees": {}, "stats": None, "conflicts": None}
    vals = list(degree.values())
    avg = mean(vals)
    stats = {"blue_ksets": len(vals), "mean": avg, "min": min(vals), "max": max(vals),
             "max_over_mean": (max(vals) / avg) if avg else None}
    limit = minus_threshold(m, k, 2)
    per = [sum(1 for q in kept if q is not p and popcount(p.vertices | q.vertices) <= limit) for p in kept]
    conflicts = {"sampled_placements": len(kept),
                 "delta1_conflicts_ell2_max": max(per) if per else 0,
                 "delta1_conflicts_ell2_mean": mean(per) if per else 0}
    return {"mode": "exhaustive" if exhaustive else "sampled", "placements": count,
            "degrees": {tuple(vertices_of(T)): d for T, d in degree.items()},
            "histogram": dict(sorted(Counter(vals).items())), "stats": stats, "conflicts": conflicts}

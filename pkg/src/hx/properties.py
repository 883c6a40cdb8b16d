"""Decision procedures with replayable witnesses, plus degree and matching statistics."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from math import comb
from operator import or_
from typing import Iterator, Sequence

from .core import Hypergraph, PackingRecord, ksubsets, popcount, to_mask, vertices_of
from .errors import BadParameters, NonuniformPacking, UnionBudgetExceeded, UniformityZero


@dataclass(frozen=True)
class PropertyWitness:
    """Verdict of a checker.

    ``witness`` holds edge indices into the checked hypergraph, laid out per
    property: cancellative ``(B, C, A1..At)``, cover-free ``(B, A1..Aj)`` with ``j <= t``,
    ve-free / ell-minus the violating tuple, union-free the sorted indices of
    both subfamilies (which are also given separately in ``families``), and
    induced-packing the two copy indices.
    """

    property: str
    params: dict
    holds: bool
    witness: tuple[int, ...] | None = None
    families: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    detail: dict | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        out = {"property": self.property, "params": self.params, "holds": self.holds,
               "witness": list(self.witness) if self.witness is not None else None}
        if self.families is not None:
            out["families"] = [list(f) for f in self.families]
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def _check_t(t):
    if t < 1:
        raise BadParameters(f"t must be >= 1, got {t}")


def find_cover(target: int, pool: Sequence[tuple[int, int]], t: int) -> list[int] | None:
    """Find at most ``t`` entries of ``pool`` (pairs ``(index, mask)``) covering ``target``.

    Branches on the lowest uncovered vertex and prunes when the ``t - depth``
    largest remaining overlaps cannot add up to the uncovered count.
    """
    pool = [(i, m) for i, m in pool if m & target]

    def rec(uncovered, start_used, depth):
        if not uncovered:
            return []
        left = t - depth
        if left == 0:
            return None
        overlaps = sorted((popcount(m & uncovered) for i, m in pool if i not in start_used), reverse=True)
        if sum(overlaps[:left]) < popcount(uncovered):
            return None
        low = uncovered & -uncovered
        for i, m in pool:
            if m & low and i not in start_used:
                found = rec(uncovered & ~m, start_used | {i}, depth + 1)
                if found is not None:
                    return [i] + found
        return None

    return rec(target, frozenset(), 0)


def _pad(chosen: list[int], pool_indices: Sequence[int], size: int) -> list[int]:
    out = list(chosen)
    for i in pool_indices:
        if len(out) >= size:
            break
        if i not in out:
            out.append(i)
    return out


def is_t_cancellative(h: Hypergraph, t: int) -> PropertyWitness:
    _check_t(t)
    if h.r == 0:
        raise UniformityZero("0-uniform hypergraph")
    params = {"t": t}
    edges = h.edges
    if len(edges) < t + 2:
        return PropertyWitness("cancellative", params, True)
    for b, c in combinations(range(len(edges)), 2):
        diff = edges[b] ^ edges[c]
        pool = [(i, m) for i, m in enumerate(edges) if i != b and i != c]
        cover = find_cover(diff, pool, t)
        if cover is not None:
            cover = _pad(cover, [i for i, _ in pool], t)
            return PropertyWitness("cancellative", params, False, (b, c, *cover))
    return PropertyWitness("cancellative", params, True)


def is_t_cover_free(h: Hypergraph, t: int) -> PropertyWitness:
    """No edge lies in the union of at most ``t`` other edges.

    Covers by fewer than ``t`` edges count even when the family is too small
    to pad them to ``t``; for ``|H| > t`` this is the same as requiring
    exactly ``t`` others.  The witness is ``(B, A1..Aj)`` with ``j <= t``.
    """
    _check_t(t)
    params = {"t": t}
    edges = h.edges
    for b, target in enumerate(edges):
        pool = [(i, m) for i, m in enumerate(edges) if i != b]
        cover = find_cover(target, pool, t)
        if cover is not None:
            return PropertyWitness("cover-free", params, False, (b, *cover))
    return PropertyWitness("cover-free", params, True)


def is_t_union_free(h: Hypergraph, t: int, max_unions: int | None = None) -> PropertyWitness:
    """Store the union of every subfamily of 1..t edges; a key collision is a witness."""
    _check_t(t)
    params = {"t": t}
    seen: dict[int, tuple[int, ...]] = {}
    edges = h.edges
    for size in range(1, min(t, len(edges)) + 1):
        for fam in combinations(range(len(edges)), size):
            u = reduce(or_, (edges[i] for i in fam))
            other = seen.get(u)
            if other is not None:
                wit = tuple(sorted(set(other) | set(fam)))
                return PropertyWitness("union-free", params, False, wit, (other, fam))
            seen[u] = fam
            if max_unions is not None and len(seen) > max_unions:
                raise UnionBudgetExceeded(f"more than {max_unions} distinct unions stored")
    return PropertyWitness("union-free", params, True)


def iter_ve_configurations(edges: Sequence[int], v: int, e: int) -> Iterator[tuple[int, ...]]:
    """Yield every increasing index ``e``-tuple whose edges span at most ``v`` vertices.

    Unions only grow, so a partial tuple already spanning more than ``v``
    vertices is dropped.  When fewer than ``r`` new vertices fit, the next
    edge must meet the current union, and only incident edges are tried.
    """
    if not edges:
        return
    r = popcount(edges[0])
    incidence: dict[int, list[int]] = {}
    for i, m in enumerate(edges):
        for x in vertices_of(m):
            incidence.setdefault(x, []).append(i)
    total = len(edges)

    def rec(chosen, union):
        depth = len(chosen)
        if depth == e:
            yield tuple(chosen)
            return
        last = chosen[-1] if chosen else -1
        if total - last - 1 < e - depth:
            return
        slack = v - popcount(union)
        if depth == 0 or slack >= r:
            cands = range(last + 1, total)
        else:
            need = r - slack
            cands = sorted({i for x in vertices_of(union) for i in incidence[x]
                            if i > last and popcount(edges[i] & union) >= need})
        for i in cands:
            nu = union | edges[i]
            if popcount(nu) <= v:
                chosen.append(i)
                yield from rec(chosen, nu)
                chosen.pop()

    yield from rec([], 0)


def is_ve_free(h: Hypergraph, v: int, e: int, _name: str = "ve-free", _params=None) -> PropertyWitness:
    if e < 2:
        raise BadParameters(f"e must be >= 2, got {e}")
    if v < h.r:
        raise BadParameters(f"v={v} is smaller than the uniformity r={h.r}")
    params = _params or {"v": v, "e": e}
    for tup in iter_ve_configurations(h.edges, v, e):
        return PropertyWitness(_name, params, False, tup)
    return PropertyWitness(_name, params, True)


def ell_minus_threshold(r: int, k: int, ell: int) -> int:
    """Largest vertex count of an ell-tuple that is still a bad (minus) configuration."""
    return ell * r - (ell - 1) * k - 1


def is_ell_minus_free(h: Hypergraph, k: int, ell: int) -> PropertyWitness:
    """Every ``ell`` edges span at least ``ell*r - (ell-1)*k`` vertices.

    When that threshold is at most ``r`` (only possible for ``r <= k``) no
    tuple can violate it and the verdict is vacuously true.
    """
    v = ell_minus_threshold(h.r, k, ell)
    params = {"k": k, "ell": ell}
    if v < h.r:
        return PropertyWitness("ell-minus", params, True)
    return is_ve_free(h, v, ell, _name="ell-minus", _params=params)


def is_ell_minus_free_upto(h: Hypergraph, k: int, e: int) -> PropertyWitness:
    """First failing ``is_ell_minus_free`` over ``2 <= ell <= e``, else a passing verdict."""
    for ell in range(2, e + 1):
        res = is_ell_minus_free(h, k, ell)
        if not res.holds:
            return res
    return PropertyWitness("ell-minus", {"k": k, "ell": list(range(2, e + 1))}, True)


# ---------------------------------------------------------------- matchings

def maximum_matching(h: Hypergraph | Sequence[int], r: int | None = None) -> list[int]:
    """Indices of a maximum set of pairwise disjoint edges.

    Include/exclude branching over edges in colex order, seeded by the greedy
    matching and pruned by ``size + min(edges left, free vertices // r)``.
    """
    edges = list(h.edges if isinstance(h, Hypergraph) else h)
    if not edges:
        return []
    if r is None:
        r = h.r if isinstance(h, Hypergraph) else popcount(edges[0])
    if r == 0:
        return [0]

    greedy, used = [], 0
    for i, m in enumerate(edges):
        if not m & used:
            greedy.append(i)
            used |= m
    best = greedy

    def rec(cands, chosen, used):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if not cands:
            return
        free = popcount(reduce(or_, (edges[i] for i in cands)) & ~used)
        if len(chosen) + min(len(cands), free // r) <= len(best):
            return
        i, rest = cands[0], cands[1:]
        chosen.append(i)
        rec([j for j in rest if not edges[j] & edges[i]], chosen, used | edges[i])
        chosen.pop()
        rec(rest, chosen, used)

    rec(list(range(len(edges))), [], 0)
    return sorted(best)


def matching_number(h: Hypergraph | Sequence[int], r: int | None = None) -> int:
    return len(maximum_matching(h, r))


# ---------------------------------------------------------------- degrees

def codegrees(h: Hypergraph, k: int) -> Counter:
    """Map each k-set (mask) contained in some edge to its degree."""
    cnt: Counter = Counter()
    for e in h.edges:
        cnt.update(ksubsets(e, k))
    return cnt


@dataclass(frozen=True)
class DegreeSpectrum:
    n: int
    r: int
    k: int
    edge_count: int
    counts: dict[int, int]

    def weighted_sum(self) -> int:
        return sum(s * c for s, c in self.counts.items() if s >= 1)

    def identity_holds(self) -> bool:
        """Each edge contributes C(r, k) incidences, counted once per degree unit."""
        return self.weighted_sum() == comb(self.r, self.k) * self.edge_count


def degree_spectrum(h: Hypergraph, k: int) -> DegreeSpectrum:
    if not 1 <= k <= h.r:
        raise BadParameters(f"need 1 <= k <= r={h.r}, got k={k}")
    hist = Counter(codegrees(h, k).values())
    hist[0] = comb(h.n, k) - sum(hist.values())
    return DegreeSpectrum(h.n, h.r, k, len(h), dict(sorted(hist.items())))


def restricted_degree_sets(h: Hypergraph, x: int, k: int, s_min: int,
                           degrees: Counter | None = None) -> list[int]:
    """The k-subsets of ``x`` with degree at least ``s_min``, in colex order."""
    if not 1 <= k <= h.r:
        raise BadParameters(f"need 1 <= k <= r={h.r}, got k={k}")
    if degrees is None:
        degrees = codegrees(h, k)
    return [T for T in ksubsets(x, k) if degrees.get(T, 0) >= s_min]


# ---------------------------------------------------------------- packings

def is_induced_packing(p: PackingRecord, k: int | None = None) -> PropertyWitness:
    """Edge-disjoint copies pairwise sharing at most k vertices, never a copy's edge."""
    k = p.k if k is None else k
    params = {"k": k}
    if k != p.k or any(popcount(e) != k for c in p.copies for e in c.edges):
        raise NonuniformPacking(f"copies are not all {k}-uniform")
    tmpl = p.template
    for idx, c in enumerate(p.copies):
        image = tuple(sorted(to_mask(c.bijection[v] for v in vertices_of(e)) for e in tmpl.edges))
        if image != tuple(sorted(c.edges)) or to_mask(c.bijection) != c.vertices \
                or len(set(c.bijection)) != tmpl.n:
            return PropertyWitness("induced-packing", params, False, (idx,),
                                   detail={"reason": "not-a-copy"})
    edge_sets = [set(c.edges) for c in p.copies]
    for i, j in combinations(range(len(p.copies)), 2):
        shared = edge_sets[i] & edge_sets[j]
        if shared:
            return PropertyWitness("induced-packing", params, False, (i, j),
                                   detail={"reason": "shared-edge", "kset": vertices_of(min(shared))})
        inter = p.copies[i].vertices & p.copies[j].vertices
        size = popcount(inter)
        if size > k:
            return PropertyWitness("induced-packing", params, False, (i, j),
                                   detail={"reason": "large-intersection", "size": size})
        if size == k and (inter in edge_sets[i] or inter in edge_sets[j]):
            return PropertyWitness("induced-packing", params, False, (i, j),
                                   detail={"reason": "intersection-is-edge", "kset": vertices_of(inter)})
    return PropertyWitness("induced-packing", params, True)


# ---------------------------------------------------------------- replay

def replay(h: Hypergraph, w: PropertyWitness) -> bool:
    """True iff ``w`` is a false verdict whose witness really violates the definition."""
    if w.holds or w.witness is None:
        return False
    E = h.edges
    idx = w.witness
    if w.property in ("cancellative", "cover-free"):
        if len(set(idx)) != len(idx):
            return False
        if w.property == "cancellative":
            t = w.params["t"]
            b, c, *cover = idx
            u = reduce(or_, (E[i] for i in cover), 0)
            return len(cover) == t and (u | E[b]) == (u | E[c])
        t = w.params["t"]
        b, *cover = idx
        u = reduce(or_, (E[i] for i in cover), 0)
        return 1 <= len(cover) <= t and E[b] & ~u == 0
    if w.property == "union-free":
        a, b = w.families
        t = w.params["t"]
        if set(a) == set(b) or not (1 <= len(a) <= t and 1 <= len(b) <= t):
            return False
        return reduce(or_, (E[i] for i in a)) == reduce(or_, (E[i] for i in b))
    if w.property == "ve-free":
        return len(set(idx)) == w.params["e"] == len(idx) and \
            popcount(reduce(or_, (E[i] for i in idx))) <= w.params["v"]
    if w.property == "ell-minus":
        ell, k = w.params["ell"], w.params["k"]
        return len(set(idx)) == ell == len(idx) and \
            popcount(reduce(or_, (E[i] for i in idx))) <= ell_minus_threshold(h.r, k, ell)
    raise BadParameters(f"cannot replay property {w.property!r} against a hypergraph")

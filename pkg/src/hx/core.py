"""Uniform hypergraphs over bitmask edges, set-algebra kernels and file I/O.

An edge is a Python ``int`` whose set bits are its vertices, so union,
intersection and symmetric difference are ``|``, ``&`` and ``^``, and the
size of a set is ``int.bit_count``.  Sorting equal-size masks numerically is
exactly colexicographic order on their sorted vertex lists, which is the
canonical edge order used everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from operator import or_
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateVertexInEdge,
    EdgeSizeMismatch,
    EmptyList,
    FormatViolation,
    ParseError,
    VertexOutOfRange,
)


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def vertices_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return mask.bit_count()


def ksubsets(mask: int, k: int):
    """Yield the k-subsets of ``mask`` as masks, in colex order."""
    # masks of equal popcount sort numerically in colex order
    yield from sorted(to_mask(combo) for combo in combinations(vertices_of(mask), k))


def symmetric_difference(a: int, b: int) -> int:
    return a ^ b


def union_size(sets: Sequence[int]) -> int:
    if not sets:
        raise EmptyList("union_size needs at least one set")
    return popcount(reduce(or_, sets, 0))


def overlap_defect(sets: Sequence[int]) -> int:
    """Total size minus size of the union; zero iff the sets are pairwise disjoint."""
    if not sets:
        raise EmptyList("overlap_defect needs at least one set")
    return sum(popcount(s) for s in sets) - union_size(sets)


@dataclass(frozen=True)
class Hypergraph:
    """An ``r``-uniform hypergraph on vertices ``0..n-1``.

    Build instances with :func:`canonicalize` (or :meth:`from_masks`); the
    constructor trusts that ``edges`` is already sorted and duplicate-free.
    """

    n: int
    r: int
    edges: tuple[int, ...] = ()

    @classmethod
    def from_masks(cls, masks: Iterable[int], n: int, r: int) -> "Hypergraph":
        masks = set(masks)
        for m in masks:
            if popcount(m) != r:
                raise EdgeSizeMismatch(f"edge {vertices_of(m)} has size {popcount(m)}, expected {r}")
            if m >> n:
                raise VertexOutOfRange(f"edge {vertices_of(m)} uses a vertex >= n={n}")
        return cls(n, r, tuple(sorted(masks)))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def edge_lists(self) -> list[list[int]]:
        return [vertices_of(e) for e in self.edges]

    def vertex_mask(self) -> int:
        return reduce(or_, self.edges, 0)

    def degree(self, subset: int) -> int:
        return sum(1 for e in self.edges if e & subset == subset)

    def subgraph(self, indices: Iterable[int]) -> "Hypergraph":
        return Hypergraph(self.n, self.r, tuple(sorted(self.edges[i] for i in set(indices))))

    def relabel(self, mapping: Sequence[int], n: int) -> "Hypergraph":
        """Transport the edges along ``mapping`` (old vertex -> new vertex)."""
        return Hypergraph.from_masks(
            (to_mask(mapping[v] for v in vertices_of(e)) for e in self.edges), n, self.r
        )

    def compact(self) -> tuple["Hypergraph", list[int]]:
        """Drop isolated vertices; returns the relabelled graph and the kept old labels."""
        kept = vertices_of(self.vertex_mask())
        mapping = {old: new for new, old in enumerate(kept)}
        masks = (to_mask(mapping[v] for v in vertices_of(e)) for e in self.edges)
        return Hypergraph.from_masks(masks, len(kept), self.r), kept


def canonicalize(raw_edges: Iterable[Sequence[int]], n: int, r: int) -> Hypergraph:
    """Validate vertex lists and return the deduplicated hypergraph in colex order."""
    masks = []
    for raw in raw_edges:
        raw = list(raw)
        if len(raw) != r:
            raise EdgeSizeMismatch(f"edge {raw} has {len(raw)} vertices, expected {r}")
        for v in raw:
            if not 0 <= v < n:
                raise VertexOutOfRange(f"vertex {v} of edge {raw} not in [0, {n})")
        if len(set(raw)) != len(raw):
            raise DuplicateVertexInEdge(f"edge {raw} repeats a vertex")
        masks.append(to_mask(raw))
    return Hypergraph(n, r, tuple(sorted(set(masks))))


@dataclass(frozen=True)
class SubsetFamily:
    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.sets)) != len(self.sets):
            raise FormatViolation("subset family contains duplicates")
        for s in self.sets:
            if s >> self.n:
                raise VertexOutOfRange(f"set {vertices_of(s)} exceeds n={self.n}")


@dataclass(frozen=True)
class PackedCopy:
    """One copy of a template k-graph placed inside the complete k-graph on [n].

    ``bijection[v]`` is the image of template vertex ``v``.
    """

    vertices: int
    edges: tuple[int, ...]
    bijection: tuple[int, ...]


@dataclass
class PackingRecord:
    n: int
    k: int
    template: Hypergraph
    copies: list[PackedCopy] = field(default_factory=list)
    template_id: str = "J"
    flags: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.copies)

    def vertex_family(self) -> list[int]:
        return [c.vertices for c in self.copies]

    def to_dict(self) -> dict:
        from fractions import Fraction
        from math import comb

        density = Fraction(len(self.copies) * len(self.template), comb(self.n, self.k)) if self.n >= self.k else Fraction(0)
        return {
            "n": self.n,
            "k": self.k,
            "template": {"id": self.template_id, "n": self.template.n, "r": self.template.r,
                         "edges": self.template.edge_lists()},
            "copies": [
                {"vertices": vertices_of(c.vertices), "bijection": list(c.bijection),
                 "edges": [vertices_of(e) for e in c.edges]}
                for c in self.copies
            ],
            "density": [density.numerator, density.denominator],
            "flags": dict(sorted(self.flags.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PackingRecord":
        tpl = data["template"]
        template = canonicalize(tpl["edges"], tpl["n"], tpl["r"])
        copies = [
            PackedCopy(to_mask(c["vertices"]), tuple(sorted(to_mask(e) for e in c["edges"])),
                       tuple(c["bijection"]))
            for c in data["copies"]
        ]
        return cls(data["n"], data["k"], template, copies, tpl.get("id", "J"), dict(data.get("flags", {})))


# ---------------------------------------------------------------- file I/O

def _parse_ints(tokens, lineno):
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise ParseError(f"non-integer token in {' '.join(tokens)!r}", lineno) from None


def loads_hypergraph(text: str, one_based: bool = False) -> Hypergraph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), exc.lineno) from None
        try:
            n, r, edges = data["n"], data["r"], data["edges"]
        except KeyError as exc:
            raise FormatViolation(f"JSON hypergraph missing key {exc}") from None
        shift = 1 if one_based else 0
        return canonicalize([[v - shift for v in e] for e in edges], n, r)

    header = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#") or not line.strip():
            continue
        nums = _parse_ints(line.split(), lineno)
        if header is None:
            if len(nums) != 3:
                raise FormatViolation(f"line {lineno}: header must be 'n r m'")
            header = nums
            continue
        n, r, _ = header
        if len(nums) != r:
            raise FormatViolation(f"line {lineno}: expected {r} vertices, got {len(nums)}")
        if one_based:
            nums = [v - 1 for v in nums]
        if any(b <= a for a, b in zip(nums, nums[1:])):
            raise FormatViolation(f"line {lineno}: vertices must be strictly increasing")
        if nums and not (0 <= nums[0] and nums[-1] < n):
            raise VertexOutOfRange(f"line {lineno}: vertex out of range [0, {n})")
        edges.append(nums)
    if header is None:
        raise FormatViolation("missing 'n r m' header")
    n, r, m = header
    if len(edges) != m:
        raise FormatViolation(f"header declares {m} edges but {len(edges)} edge lines follow")
    return canonicalize(edges, n, r)


def dumps_hypergraph(h: Hypergraph, fmt: str = "hg", comments: Sequence[str] = (),
                     one_based: bool = False) -> str:
    shift = 1 if one_based else 0
    if fmt == "json":
        return json.dumps({"n": h.n, "r": h.r,
                           "edges": [[v + shift for v in e] for e in h.edge_lists()]}) + "\n"
    lines = [f"# {c}" for c in comments]
    lines.append(f"{h.n} {h.r} {len(h)}")
    lines.extend(" ".join(str(v + shift) for v in e) for e in h.edge_lists())
    return "\n".join(lines) + "\n"


def read_hypergraph(path, one_based: bool = False) -> Hypergraph:
    return loads_hypergraph(Path(path).read_text(), one_based=one_based)


def write_hypergraph(h: Hypergraph, path, fmt: str = "hg", comments: Sequence[str] = (),
                     one_based: bool = False) -> None:
    Path(path).write_text(dumps_hypergraph(h, fmt, comments, one_based))

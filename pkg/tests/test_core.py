from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs
from hx.core import (Hypergraph, PackedCopy, PackingRecord, canonicalize, dumps_hypergraph, ksubsets,
                     loads_hypergraph, overlap_defect, popcount, read_hypergraph, to_mask, union_size,
                     vertices_of, write_hypergraph)
from hx.errors import (DuplicateVertexInEdge, EdgeSizeMismatch, EmptyList, FormatViolation, ParseError,
                       VertexOutOfRange)


def test_mask_roundtrip():
    assert to_mask([0, 3, 5]) == 0b101001
    assert vertices_of(0b101001) == [0, 3, 5]
    assert popcount(0b101001) == 3


def test_ksubsets_are_colex_and_complete():
    subsets = list(ksubsets(0b111111, 3))
    assert len(subsets) == 20
    assert subsets == sorted(subsets)
    assert {frozenset(vertices_of(s)) for s in subsets} == {frozenset(c) for c in combinations(range(6), 3)}


def test_canonicalize_dedups_and_sorts():
    h = canonicalize([[2, 1], [0, 1], [1, 2]], 3, 2)
    assert h.edge_lists() == [[0, 1], [1, 2]]


@pytest.mark.parametrize("edges, exc", [
    ([[0, 1, 2]], EdgeSizeMismatch),
    ([[0, 3]], VertexOutOfRange),
    ([[-1, 0]], VertexOutOfRange),
    ([[1, 1]], DuplicateVertexInEdge),
])
def test_canonicalize_rejects(edges, exc):
    with pytest.raises(exc):
        canonicalize(edges, 3, 2)


def test_union_and_defect_reject_empty():
    with pytest.raises(EmptyList):
        union_size([])
    with pytest.raises(EmptyList):
        overlap_defect([])


def test_overlap_defect_values():
    assert overlap_defect([0b0011, 0b1100]) == 0
    assert overlap_defect([0b0111, 0b1110]) == 2


@given(st.lists(st.integers(1, 2**10 - 1), min_size=1, max_size=6), st.data())
def test_overlap_defect_superset_monotone(sets, data):
    i = data.draw(st.integers(0, len(sets) - 1))
    extra = data.draw(st.integers(0, 2**12 - 1))
    grown = list(sets)
    grown[i] |= extra
    assert overlap_defect(grown) >= overlap_defect(sets)


@given(hypergraphs())
def test_hg_and_json_roundtrip(h):
    assert loads_hypergraph(dumps_hypergraph(h)) == h
    assert loads_hypergraph(dumps_hypergraph(h, "json")) == h
    assert loads_hypergraph(dumps_hypergraph(h, one_based=True), one_based=True) == h


def test_hg_comments_and_file_io(tmp_path):
    h = Hypergraph.from_masks([0b011, 0b110], 3, 2)
    path = tmp_path / "h.hg"
    write_hypergraph(h, path, comments=["made by a test"])
    assert path.read_text().startswith("# made by a test\n3 2 2\n")
    assert read_hypergraph(path) == h


@pytest.mark.parametrize("text, exc, line", [
    ("3 2 2\n0 1\n", FormatViolation, None),
    ("3 2 1\n1 0\n", FormatViolation, None),
    ("3 2 1\n0 x\n", ParseError, 2),
    ("# c\n3 2\n", FormatViolation, None),
    ("3 2 1\n0 1 2\n", FormatViolation, None),
    ("3 2 1\n0 5\n", VertexOutOfRange, None),
    ("", FormatViolation, None),
    ('{"n": 3}', FormatViolation, None),
])
def test_hg_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        loads_hypergraph(text)
    if line is not None:
        assert info.value.line == line


def test_compact_drops_isolated_vertices():
    h = Hypergraph.from_masks([to_mask([1, 4]), to_mask([4, 6])], 8, 2)
    c, kept = h.compact()
    assert kept == [1, 4, 6]
    assert c.n == 3 and c.edge_lists() == [[0, 1], [1, 2]]


def test_degree_and_subgraph():
    h = Hypergraph.from_masks([0b011, 0b101, 0b110], 3, 2)
    assert h.degree(0b001) == 2
    assert len(h.subgraph([0, 2])) == 2


def test_packing_record_roundtrip():
    tpl = Hypergraph.from_masks([0b011], 2, 2)
    copy = PackedCopy(to_mask([3, 5]), (to_mask([3, 5]),), (5, 3))
    rec = PackingRecord(6, 2, tpl, [copy], flags={"seed": 1})
    d = rec.to_dict()
    assert d["density"] == [1, 15]
    again = PackingRecord.from_dict(d)
    assert again.copies == rec.copies and again.template == tpl

import pytest
from hypothesis import given, strategies as st

from starwalk.errors import InvalidParameterError
from starwalk.graph import (
    VertexKind,
    build_three_star,
    build_two_star,
    path_edges,
    scatter_coefficients,
)


@st.composite
def three_star_params(draw, max_n=60):
    m = draw(st.integers(2, 8))
    N = draw(st.integers(2 * m - 1, max(2 * m - 1, max_n)))
    return N, m


class TestScatterCoefficients:
    def test_n4(self):
        sc = scatter_coefficients(4)
        assert (sc.r, sc.t) == (0.5, 0.5)

    def test_n5(self):
        sc = scatter_coefficients(5)
        assert sc.r == pytest.approx(0.6)
        assert sc.t == pytest.approx(0.4)

    @given(st.integers(3, 10_000))
    def test_local_unitarity(self, n):
        sc = scatter_coefficients(n)
        assert sc.r**2 + (n - 1) * sc.t**2 == pytest.approx(1.0, abs=1e-12)

    def test_n100(self):
        sc = scatter_coefficients(100)
        assert sc.r**2 + 99 * sc.t**2 == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_low_degree(self, n):
        with pytest.raises(InvalidParameterError):
            scatter_coefficients(n)


class TestTwoStar:
    def test_counts_n5(self):
        g = build_two_star(5)
        outer = [v for v in g.kinds if v.startswith("B")]
        assert len(g.centers) == 2
        assert len(outer) == 8
        assert len(g.edges) == 10
        assert g.num_states == 20

    def test_center_coefficients_n100(self):
        g = build_two_star(100)
        for c in g.centers:
            sc = g.scatter(c)
            assert sc.r == pytest.approx(0.98)
            assert sc.t == pytest.approx(0.02)

    def test_n4_one_plain_prong_per_star(self):
        g = build_two_star(4)
        for c in g.centers:
            plain = [b for b in g.adjacency[c] if g.kinds[b] is VertexKind.REFLECT_PLUS]
            assert len(plain) == 1

    def test_special_vertices(self):
        g = build_two_star(10)
        assert (g.start, g.end) == ("B1.1", "B2.1")
        assert g.kinds["B1.1"] is VertexKind.REFLECT_MINUS
        assert g.kinds["B2.1"] is VertexKind.REFLECT_MINUS
        assert g.kinds["B1.2"] is VertexKind.PASS_THROUGH
        assert g.kinds["B1.3"] is VertexKind.PASS_THROUGH
        assert g.adjacency["B1.2"] == ("A1", "A2")

    @pytest.mark.parametrize("N", [0, 3])
    def test_too_small(self, N):
        with pytest.raises(InvalidParameterError):
            build_two_star(N)

    def test_path_edges(self):
        for N in (4, 7, 50):
            pe = path_edges(build_two_star(N))
            assert pe == {
                ("A1", "B1.1"), ("A1", "B1.2"), ("A1", "B1.3"),
                ("A2", "B1.2"), ("A2", "B1.3"), ("A2", "B2.1"),
            }


class TestThreeStar:
    def test_counts(self):
        g = build_three_star(10, 3)
        outer = [v for v in g.kinds if v.startswith("B")]
        assert len(g.centers) == 3
        assert len(outer) == 26
        assert len(g.edges) == 30
        assert g.num_states == 60

    def test_single_path(self):
        g = build_three_star(10, 2)
        passes = [v for v, k in g.kinds.items() if k is VertexKind.PASS_THROUGH]
        assert sorted(passes) == ["B1.2", "B3.2"]

    @pytest.mark.parametrize("N,m", [(6, 4), (5, 1), (3, 3)])
    def test_invalid(self, N, m):
        with pytest.raises(InvalidParameterError):
            build_three_star(N, m)

    def test_path_edge_counts(self):
        assert len(path_edges(build_three_star(10, 3))) == 10
        pe = path_edges(build_three_star(10, 2))
        assert pe == {
            ("A1", "B1.1"), ("A1", "B1.2"), ("A2", "B1.2"),
            ("A2", "B3.2"), ("A3", "B3.2"), ("A3", "B3.1"),
        }

    @given(three_star_params())
    def test_path_edges_formula(self, params):
        N, m = params
        assert len(path_edges(build_three_star(N, m))) == 2 + 4 * (m - 1)

    def test_middle_star_labels(self):
        # plain middle prongs start at B2.1 and are ordinary reflectors
        g = build_three_star(10, 3)
        assert g.kinds["B2.1"] is VertexKind.REFLECT_PLUS
        assert g.end == "B3.1"


def _all_graphs():
    for N in (5, 10, 50):
        yield build_two_star(N)
        for m in (2, 3, 5):
            if N > 2 * m - 2:
                yield build_three_star(N, m)


@pytest.mark.parametrize("g", list(_all_graphs()), ids=lambda g: f"{g.stars}-{g.N}-{g.m}")
class TestStructure:
    def test_edge_count(self, g):
        assert len(g.edges) == g.stars * g.N

    def test_outer_vertex_count(self, g):
        outer = sum(1 for v in g.kinds if v.startswith("B"))
        expected = 2 * g.N - 2 if g.stars == 2 else 3 * g.N - 2 * g.m + 2
        assert outer == expected

    def test_bipartite(self, g):
        for a, b in g.edges:
            assert a.startswith("A") and b.startswith("B")
        for v, nbrs in g.adjacency.items():
            assert all(n[0] != v[0] for n in nbrs)

    def test_kind_degree(self, g):
        need = {VertexKind.REFLECT_PLUS: 1, VertexKind.REFLECT_MINUS: 1,
                VertexKind.PASS_THROUGH: 2}
        for v, kind in g.kinds.items():
            if kind is VertexKind.SCATTER:
                assert g.degree(v) == g.N >= 3
            else:
                assert g.degree(v) == need[kind]

    def test_one_reflect_minus_per_end(self, g):
        minus = [v for v, k in g.kinds.items() if k is VertexKind.REFLECT_MINUS]
        assert sorted(minus) == sorted([g.start, g.end])
        assert g.start == "B1.1"
        assert g.end.startswith(f"B{g.stars}.")

    def test_index_bijection(self, g):
        assert [s.index for s in g.states] == list(range(2 * len(g.edges)))
        for s in g.states:
            assert g.index(s.source, s.target) == s.index
            r = g.reverse(s.index)
            assert r != s.index
            assert g.reverse(r) == s.index

    def test_canonical_order(self, g):
        # star by star; outgoing block then ingoing block, each sorted
        i = 0
        for c in g.centers:
            deg = g.degree(c)
            out = g.states[i:i + deg]
            inc = g.states[i + deg:i + 2 * deg]
            assert all(s.source == c for s in out)
            assert all(s.target == c for s in inc)
            assert [s.target for s in out] == [s.source for s in inc]
            i += 2 * deg


def test_deterministic_indexing():
    a, b = build_three_star(20, 4), build_three_star(20, 4)
    assert [(s.source, s.target) for s in a.states] == [
        (s.source, s.target) for s in b.states
    ]

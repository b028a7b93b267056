"""hypothesis 전략: 작은 그래프, 행렬, 관계, CSP"""

from hypothesis import strategies as st

from dmcut.digraph import Digraph
from dmcut.generators import random_csp, random_dmc
from dmcut.matrixgrid import ZeroOneMatrix
from dmcut.permcsp import DownclosedRelation, OrderedDomain


@st.composite
def digraphs(draw, min_vertices=2, max_vertices=7, max_arcs_per_vertex=3):
    """정점 v0..v{n-1}, 임의의 호, 임의의 삭제 불가 정점 집합."""
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    names = [f"v{i}" for i in range(n)]
    possible = [(u, v) for u in names for v in names if u != v]
    arcs = draw(
        st.lists(
            st.sampled_from(possible),
            unique=True,
            max_size=min(len(possible), max_arcs_per_vertex * n),
        )
    )
    frozen = draw(st.sets(st.sampled_from(names)))
    return Digraph({v: v not in frozen for v in names}, arcs)


@st.composite
def flow_instances(draw, max_vertices=7):
    """(g, s, t): s, t 는 서로 다르고 삭제 불가."""
    g = draw(digraphs(max_vertices=max_vertices))
    s, t = draw(st.lists(st.sampled_from(g.vertices), min_size=2, max_size=2, unique=True))
    deletable = g.deletable_vertices - {s, t}
    return g.with_deletable(deletable), s, t


@st.composite
def dmc_instances(draw, min_vertices=4, max_vertices=7, max_k=3):
    """시드 생성기로 만든 작은 3-DMC 인스턴스."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    k = draw(st.integers(min_value=0, max_value=max_k))
    density = draw(st.sampled_from([0.2, 0.3, 0.4]))
    return random_dmc(seed, n=n, density=density, k=k, undeletable_probability=0.1)


@st.composite
def matrices(draw, max_rows=6, max_cols=6, min_rows=1, min_cols=1):
    n = draw(st.integers(min_value=min_rows, max_value=max_rows))
    m = draw(st.integers(min_value=min_cols, max_value=max_cols))
    rows = draw(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=1), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
    return ZeroOneMatrix(rows)


@st.composite
def downclosed_relations(draw, max_left=6, max_right=6):
    left = OrderedDomain(range(draw(st.integers(min_value=1, max_value=max_left))))
    right = OrderedDomain(range(draw(st.integers(min_value=1, max_value=max_right))))
    frontier = draw(
        st.lists(
            st.integers(min_value=-1, max_value=len(right) - 1),
            min_size=len(left),
            max_size=len(left),
        )
    )
    return DownclosedRelation(left, right, sorted(frontier, reverse=True))


@st.composite
def csp_instances(draw, max_variables=6, max_domain=8, max_constraints=6):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_csp(
        seed,
        variables=draw(st.integers(min_value=2, max_value=max_variables)),
        max_domain=draw(st.integers(min_value=1, max_value=max_domain)),
        constraints=draw(st.integers(min_value=0, max_value=max_constraints)),
    )

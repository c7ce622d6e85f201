import pytest

from plyp.families import a1_example, trivial_lattice
from plyp.detrop import get_context, gf_context_polytope


@pytest.fixture(scope="session")
def a1():
    return a1_example()


@pytest.fixture(scope="session")
def mdr22():
    ctx = get_context(2, 2)
    return ctx.m, ctx.n, ctx.pair


@pytest.fixture(scope="session")
def mdr23():
    ctx = get_context(2, 3)
    return ctx.m, ctx.n, ctx.pair


@pytest.fixture(scope="session")
def mdr32():
    ctx = get_context(3, 2)
    return ctx.m, ctx.n, ctx.pair


@pytest.fixture(scope="session")
def trivial2():
    return trivial_lattice(2)


@pytest.fixture(scope="session")
def gf22():
    return gf_context_polytope(2, 2)

import pytest
from hypothesis import strategies as st

from sharegraph import graph, load_example
from sharegraph.terms import App, FunSym, Var

A, B = FunSym("a", 0), FunSym("b", 0)
F, G = FunSym("f", 1), FunSym("g", 1)
H = FunSym("h", 2)


def terms(max_leaves=8, var_names=("x", "y")):
    leaves = st.sampled_from([App(A, ()), App(B, ())] + [Var(v) for v in var_names])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda t: App(F, (t,)), sub),
            st.builds(lambda t: App(G, (t,)), sub),
            st.builds(lambda s, t: App(H, (s, t)), sub, sub),
        ),
        max_leaves=max_leaves,
    )


def ground_terms(max_leaves=8):
    return terms(max_leaves, var_names=())


@pytest.fixture(scope="session")
def rf():
    return load_example("rf")


@pytest.fixture(scope="session")
def rg():
    return load_example("rg")


@pytest.fixture(scope="session")
def rsat():
    return load_example("rsat")


@pytest.fixture(scope="session")
def mult():
    return load_example("mult")


# the three graphs for (0+0)*(0+0): shared +, unshared +, unshared + with shared 0
@pytest.fixture
def T1():
    return graph({1: ("*", [3, 3]), 3: ("+", [4, 5]), 4: ("0", []), 5: ("0", [])})


@pytest.fixture
def T2():
    return graph({1: ("*", [2, 3]), 2: ("+", [4, 5]), 3: ("+", [4, 5]), 4: ("0", []), 5: ("0", [])})


@pytest.fixture
def T3():
    return graph({1: ("*", [2, 3]), 2: ("+", [5, 5]), 3: ("+", [5, 5]), 5: ("0", [])})


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

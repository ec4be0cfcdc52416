import pytest

from godelstr import godelgen, pvblegen, turing


@pytest.fixture(scope="session")
def machines():
    return {name: turing.fixture(name) for name in ("halt", "loop", "shiftr")}


@pytest.fixture(scope="session")
def templates(machines):
    return {name: pvblegen.gen_pvble(m) for name, m in machines.items()}


@pytest.fixture(scope="session")
def sentences(machines, templates):
    return {name: godelgen.gen_godel(m, templates[name]) for name, m in machines.items()}

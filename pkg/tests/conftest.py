import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lfzeros.characters import find_character  # noqa: E402
from lfzeros.lfunc import LinearCombination, character_spec, dirichlet_spec, zeta_spec  # noqa: E402


@pytest.fixture(scope="session")
def chi5():
    return find_character(5, n2=1j)


@pytest.fixture(scope="session")
def chi5_comb(chi5):
    return LinearCombination([character_spec(chi5), character_spec(chi5.conj())], [1, 1])


@pytest.fixture(scope="session")
def zeta():
    return zeta_spec()


@pytest.fixture(scope="session")
def chi4():
    return dirichlet_spec(4, (1,))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

import numpy as np
import pytest
from hypothesis import strategies as st

from quasibell.coherent_algebra import CoherentSum

finite = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False, allow_infinity=False)
complex_amp = st.builds(complex, finite, finite)


@st.composite
def coherent_sums(draw, modes=None, max_terms=4):
    m = draw(st.integers(1, 3)) if modes is None else modes
    t = draw(st.integers(1, max_terms))
    coeffs = [draw(complex_amp) for _ in range(t)]
    amps = [[draw(complex_amp) for _ in range(m)] for _ in range(t)]
    return CoherentSum(m, coeffs, np.array(amps).reshape(t, m))


def random_coeffs(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(20190605)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def check(label: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

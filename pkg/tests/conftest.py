import numpy as np
import pytest

from qpuf import _accel, channel, quantizer
from qpuf import puf_model as pm
from qpuf.polar.construction import genie_construct

CONSTRUCTION_SEED = 7
GENIE_FRAMES = 100_000

needs_numba = pytest.mark.skipif(not _accel.USE_NUMBA, reason="numba backend disabled")


@pytest.fixture(scope="session")
def sram_channels():
    """(W_m, additive channel) for the default device at 1000 trials."""
    t = quantizer.thresholds_for_uniform()
    w, joint = channel.main_matrix_expected(pm.SRAM, t, 1000)
    return w, channel.additive_channel(joint)


@pytest.fixture(scope="session")
def constructions(sram_channels):
    cache = {}

    def get(n_len, frames=GENIE_FRAMES):
        key = (n_len, frames)
        if key not in cache:
            cache[key] = genie_construct(sram_channels[1], n_len, frames, CONSTRUCTION_SEED)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test when the check fails."""

    def record(num, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

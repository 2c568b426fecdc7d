import numpy as np
import pytest

from chanwit.channels import Channel
from chanwit.matcore import random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20201017)


def random_channel(rng, din=2, dout=2, rank=3):
    """Random CPTP map from a Haar isometry (Stinespring dilation)."""
    iso = random_unitary(dout * rank, rng)[:, :din]
    return Channel(din, dout, tuple(iso.reshape(rank, dout, din)), {"kind": "kraus", "params": {}})


def trine_povm():
    rot = np.array([[np.cos(2 * np.pi / 3), -np.sin(2 * np.pi / 3)],
                    [np.sin(2 * np.pi / 3), np.cos(2 * np.pi / 3)]])  # exp(-i 2pi/3 sigma_Y)
    vecs = [np.linalg.matrix_power(rot, y) @ np.array([1.0, 0.0]) for y in range(3)]
    return [2.0 / 3.0 * np.outer(v, v) for v in vecs], vecs


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaagm.rng import XorShift64Star, cell_seed, splitmix64


def test_splitmix64_reference_vector():
    # published splitmix64 test vector: first output from seed 0
    _, out = splitmix64(0)
    assert out == 0xE220A8397B1DCDAF


def test_stream_is_pinned():
    # regression pin: these exact values must hold on every platform
    g = XorShift64Star(0)
    assert [g.next_u64() for _ in range(3)] == [
        8916199331640804048,
        16032783972208265725,
        12954103179475586193,
    ]


def test_uniform_stream_pinned():
    g = XorShift64Star(42)
    assert [g.uniform() for _ in range(3)] == pytest.approx(
        [0.19410591753418271, 0.5626318272656208, 0.4861061377100523],
        abs=0.0,
    )


def test_same_seed_same_stream():
    a, b = XorShift64Star(123), XorShift64Star(123)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]


@given(st.integers(0, 2 ** 64 - 1))
@settings(max_examples=50)
def test_uniform_in_half_open_unit_interval(seed):
    g = XorShift64Star(seed)
    for _ in range(20):
        u = g.uniform()
        assert 0.0 < u <= 1.0


def test_normals_have_sane_moments():
    g = XorShift64Star(2024)
    xs = g.normal_vector(20000)
    assert abs(float(np.mean(xs))) < 0.03
    assert abs(float(np.std(xs)) - 1.0) < 0.03


def test_normal_vector_scale():
    a = XorShift64Star(5).normal_vector(8, scale=1.0)
    b = XorShift64Star(5).normal_vector(8, scale=2.5)
    assert np.allclose(b, 2.5 * a)


def test_cell_seed_separates_coordinates():
    seeds = {
        cell_seed(0, 0, 0), cell_seed(1, 0, 0),
        cell_seed(0, 1, 0), cell_seed(0, 0, 1),
        cell_seed(1, 1, 0), cell_seed(0, 1, 1),
    }
    assert len(seeds) == 6


def test_zero_seed_state_is_nonzero():
    # xorshift64* has an absorbing all-zero state; seeding must avoid it
    g = XorShift64Star(0)
    assert g._state != 0
    assert g.next_u64() != 0

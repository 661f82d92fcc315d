import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffusim import (
    NonConvergentError,
    ValidationError,
    continuous_run,
    convergence_time,
    custom_matrix,
    discrepancy,
    gen_cycle,
    gen_hypercube,
    gen_torus,
    lazy_rw_matrix,
    metropolis_matrix,
    second_eigenvalue,
)
from diffusim.verify import random_connected_graph


def test_continuous_run_t0(lazy_k2):
    x0 = np.array([4.0, 0.0])
    out = continuous_run(x0, lazy_k2, 0)
    assert np.array_equal(out, x0)
    out[0] = -1  # returned copy must not alias the input
    assert x0[0] == 4.0


def test_continuous_run_k2_fixed_point(lazy_k2):
    assert np.allclose(continuous_run([4, 0], lazy_k2, 1), [2, 2])
    assert np.allclose(continuous_run([4, 0], lazy_k2, 2), [2, 2])


def test_continuous_run_validates(lazy_k2):
    with pytest.raises(ValidationError):
        continuous_run([1.0, -0.5], lazy_k2, 1)
    with pytest.raises(ValidationError):
        continuous_run([1.0, 0.0, 0.0], lazy_k2, 1)
    with pytest.raises(ValidationError):
        continuous_run([1.0, 0.0], lazy_k2, -1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), t=st.integers(0, 30))
def test_continuous_sum_conserved(seed, t):
    rng = np.random.default_rng(seed)
    P = metropolis_matrix(random_connected_graph(int(rng.integers(2, 16)), rng))
    x0 = rng.uniform(0, 50, size=P.n)
    out = continuous_run(x0, P, t)
    assert abs(out.sum() - x0.sum()) <= 1e-9 * max(1.0, x0.sum())


def test_convergence_time_k2(lazy_k2):
    # lambda = 0: T = ceil(ln(4 * 4 * 2)) = ceil(ln 32) = 4
    assert convergence_time(lazy_k2, disc0=4, eps=1) == 4


def test_convergence_time_cycle4_circulant_oracle():
    P = lazy_rw_matrix(gen_cycle(4))
    lam_oracle = 0.5  # 1/2 + cos(2 pi / 4)/2
    assert second_eigenvalue(P) == pytest.approx(lam_oracle, abs=1e-12)
    # T = ceil(2 ln 16) = 6
    assert convergence_time(P, disc0=1, eps=1) == 6
    assert convergence_time(P, disc0=1, eps=1, lam=lam_oracle) == 6


@settings(max_examples=25, deadline=None)
@given(disc0=st.floats(0.5, 1e6), eps=st.floats(0.01, 1.0))
def test_convergence_time_monotone_in_eps(disc0, eps):
    P = lazy_rw_matrix(gen_cycle(16))
    lam = second_eigenvalue(P)
    t_full = convergence_time(P, disc0, eps, lam=lam)
    t_half = convergence_time(P, disc0, eps / 2, lam=lam)
    assert t_half >= t_full
    assert t_half - t_full <= math.ceil(math.log(2) / (1 - lam))


def test_convergence_time_validates(lazy_k2):
    with pytest.raises(ValidationError):
        convergence_time(lazy_k2, disc0=0, eps=1)
    with pytest.raises(ValidationError):
        convergence_time(lazy_k2, disc0=1, eps=0)


def test_convergence_time_periodic_chain_rejected():
    swap = custom_matrix([(0, 1, 1.0), (1, 0, 1.0)])
    assert second_eigenvalue(swap) == pytest.approx(1.0)
    with pytest.raises(NonConvergentError):
        convergence_time(swap, disc0=1, eps=1)


@pytest.mark.parametrize("graph", [gen_cycle(16), gen_hypercube(4), gen_torus(4, 4)])
@pytest.mark.parametrize("eps", [1.0, 0.1])
def test_proposition_end_to_end(graph, eps):
    P = lazy_rw_matrix(graph)
    x0 = np.zeros(P.n)
    x0[0] = 1000.0
    T = convergence_time(P, discrepancy(x0), eps)
    assert discrepancy(continuous_run(x0, P, T)) <= eps

import numpy as np
import pytest

from heisenberg_mpo.mpo import MPO, canonicalize
from heisenberg_mpo.params import XYParameters


def random_mpo(n_sites, chi, rng, canonical=True):
    dims = [1] + [chi] * (n_sites - 1) + [1]
    ts = [rng.normal(size=(dims[i], 4, dims[i + 1])) + 1j * rng.normal(size=(dims[i], 4, dims[i + 1]))
          for i in range(n_sites)]
    m = MPO(ts, [np.ones(chi) for _ in range(n_sites - 1)], 0.0j, center=1, canonical=False)
    return canonicalize(m) if canonical else m


def random_params(n_sites, rng, open_system=True):
    rates = rng.uniform(0.1, 1.0, size=4) if open_system else np.zeros(4)
    return XYParameters(n_sites, J=1.0, gamma=float(rng.uniform(0, 1)), B=float(rng.uniform(0, 1.5)),
                        gamma_L_plus=float(rates[0]), gamma_L_minus=float(rates[1]),
                        gamma_R_plus=float(rates[2]), gamma_R_minus=float(rates[3]))


def random_density(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    w = rng.normal(size=2) + 1j * rng.normal(size=2)
    r = 0.7 * np.outer(v, v.conj()) / np.vdot(v, v) + 0.3 * np.outer(w, w.conj()) / np.vdot(w, w)
    return r / np.trace(r)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


BENCHMARK_CHAIN = dict(n_sites=50, J=1.0, gamma=0.75, B=1.0, gamma_L_minus=0.5, gamma_L_plus=0.3,
            gamma_R_minus=0.5, gamma_R_plus=0.7)

# data/simulator.py
"""Generowanie pomiarów w stanie równowagi f(t) = L₁u(t) i zaszumianie ich.

Generator: numpy.random.default_rng (PCG64) zainicjowany ziarnem; ten sam seed
daje identyczne dane.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from models.graph_model import EdgeChangeSet, Laplacian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Prawdziwe i zaszumione macierze U_T, F_T (n×T); pomiar = prawda − błąd."""
    u_true: np.ndarray = field(repr=False)
    f_true: np.ndarray = field(repr=False)
    u_noisy: np.ndarray = field(repr=False)
    f_noisy: np.ndarray = field(repr=False)
    noise_variance: float = 0.0
    seed: object = None

    @property
    def n(self):
        return self.u_true.shape[0]

    @property
    def T(self):
        return self.u_true.shape[1]

    @property
    def delta_u(self):
        return self.u_true - self.u_noisy

    @property
    def delta_f(self):
        return self.f_true - self.f_noisy


def _readonly(a):
    a.setflags(write=False)
    return a


def simulate(L1, T, noise_variance, seed):
    """Potencjały u(t) ~ N(0, I), f(t) = L₁u(t), błędy N(0, σ²) na U i F."""
    if T < 1:
        raise ValueError(f"Horyzont T musi być dodatni, T={T}")
    if noise_variance < 0:
        raise ValueError(f"Wariancja szumu nie może być ujemna: {noise_variance}")
    matrix = L1.matrix if isinstance(L1, Laplacian) else np.asarray(L1, dtype=float)
    n = matrix.shape[0]
    rng = np.random.default_rng(seed)
    u_true = rng.standard_normal((n, T))
    f_true = np.asarray(matrix @ u_true)
    sigma = np.sqrt(noise_variance)
    delta_u = sigma * rng.standard_normal((n, T))
    delta_f = sigma * rng.standard_normal((n, T))
    logger.debug("Symulacja: n=%d, T=%d, sigma^2=%g, seed=%s", n, T, noise_variance, seed)
    return MeasurementSet(
        u_true=_readonly(u_true),
        f_true=_readonly(f_true),
        u_noisy=_readonly(u_true - delta_u),
        f_noisy=_readonly(f_true - delta_f),
        noise_variance=float(noise_variance),
        seed=seed,
    )


def random_removal_scenario(net, k, seed):
    """Losuje k różnych istniejących krawędzi do usunięcia (bez zwracania)."""
    if k < 0 or k > net.m:
        raise ValueError(f"Nie można usunąć {k} krawędzi z sieci o {net.m} krawędziach")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(net.m, size=k, replace=False) if k else []
    pairs = net.pairs()
    return EdgeChangeSet(removed=frozenset(pairs[int(i)] for i in chosen))


def random_addition_scenario(net, k, seed, weight=1.0):
    """Losuje k nieistniejących par węzłów i dodaje je z podaną wagą."""
    existing = set(net.pairs())
    absent = [(i, j) for i in range(1, net.n + 1) for j in range(i + 1, net.n + 1)
              if (i, j) not in existing]
    if k < 0 or k > len(absent):
        raise ValueError(f"Nie można dodać {k} krawędzi, wolnych par jest {len(absent)}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(absent), size=k, replace=False) if k else []
    return EdgeChangeSet(added=tuple((absent[int(i)], weight) for i in chosen))

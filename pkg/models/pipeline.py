# models/pipeline.py
"""Scenariusz zmiany krawędzi -> pomiary -> układ regresji -> estymacja β."""
import logging
from dataclasses import dataclass, field

import numpy as np

from data.simulator import random_removal_scenario, simulate
from models.graph_model import EdgeChangeSet, apply_changes, laplacian
from models.solvers import LassoConfig, TlsConfig, lasso, tls_proximal_gradient
from models.vectorize import build_design, support_reduce, vech, vech_length
from utils.utils import normalize_pair

logger = logging.getLogger(__name__)

# osobny strumień losowy dla wyboru usuwanych krawędzi
REMOVAL_STREAM = 1


@dataclass(frozen=True)
class Scenario:
    """Sieć odniesienia i sposób wyznaczania zmian (jawne pary albo k losowych usunięć)."""
    network: object
    changes: EdgeChangeSet = None
    random_k: int = None
    T: int = 30
    noise_variance: float = 0.1
    reduced: bool = False
    labels: tuple = None

    def __post_init__(self):
        if (self.changes is None) == (self.random_k is None):
            raise ValueError("Podaj dokładnie jedno: jawne zmiany albo liczbę losowych usunięć")
        if self.reduced and self.changes is not None and self.changes.added:
            raise ValueError("Dodawanie krawędzi wymaga pełnego (niezredukowanego) modelu")

    def changes_for(self, seed):
        if self.changes is not None:
            return self.changes
        return random_removal_scenario(self.network, self.random_k, seed=[seed, REMOVAL_STREAM])

    def label(self, node):
        """Oryginalny identyfikator węzła (np. numer szyny) dla węzła numerowanego od 1."""
        return self.labels[node - 1] if self.labels is not None else node


@dataclass(frozen=True, eq=False)
class ScenarioRun:
    seed: int
    changes: EdgeChangeSet
    L0: object = field(repr=False)
    L1: object = field(repr=False)
    delta: object = field(repr=False)
    measurements: object = field(repr=False)
    design: object = field(repr=False)
    beta_true: np.ndarray = field(repr=False)


def realize(scenario, seed):
    """Jedno losowanie scenariusza: zmiany, pomiary, układ regresji i prawdziwe β."""
    changes = scenario.changes_for(seed)
    L0 = laplacian(scenario.network)
    _, L1, delta = apply_changes(scenario.network, changes)
    ms = simulate(L1, scenario.T, scenario.noise_variance, seed)
    design = build_design(ms, L0)
    if scenario.reduced:
        design = support_reduce(design, L0)
    beta_true = design.restrict(vech(delta.toarray()))
    return ScenarioRun(seed=seed, changes=changes, L0=L0, L1=L1, delta=delta,
                       measurements=ms, design=design, beta_true=beta_true)


def solve(design, solver, lam, standardize=False, lambda_scale=1.0, tls_init="zero"):
    """Uruchamia wybrany estymator ("lasso" albo "tls") dla jednej wartości λ."""
    if solver == "lasso":
        return lasso(design, LassoConfig(lam=lam, standardize=standardize, lambda_scale=lambda_scale))
    if solver == "tls":
        if standardize:
            raise ValueError("Estymator TLS nie obsługuje standaryzacji kolumn, użyj --no-standardize")
        return tls_proximal_gradient(design, TlsConfig(lam=lam, init=tls_init, lambda_scale=lambda_scale))
    raise ValueError(f"Nieznany estymator: {solver}")


def recovered_changes(beta_full, index_map, eps):
    """Pary (i, j) poza przekątną ΔL̂ z |wartością| > eps; dodatnia wartość = usunięcie."""
    found = []
    for k in np.flatnonzero(np.abs(beta_full) > eps):
        i, j = index_map.pair(k)
        if i != j:
            found.append((normalize_pair(i + 1, j + 1), float(beta_full[k])))
    return sorted(found)


def dimension_ledger(net, changes):
    """Długości i liczby niezerowych wpisów Vec(ΔL), β = Vech(ΔL) oraz β_s."""
    L0 = laplacian(net).toarray()
    _, _, delta = apply_changes(net, changes)
    dL = delta.toarray()
    beta = vech(dL)
    support = np.flatnonzero(vech(L0) != 0)
    off = ~np.eye(net.n, dtype=bool)
    return {
        "vec_length": net.n ** 2,
        "vec_nonzeros": int(np.count_nonzero(dL)),
        "vec_offdiagonal_nonzeros": int(np.count_nonzero(dL[off])),
        "beta_length": vech_length(net.n),
        "beta_nonzeros": int(np.count_nonzero(beta)),
        "beta_s_length": int(support.size),
        "beta_s_nonzeros": int(np.count_nonzero(beta[support])),
    }

# models/graph_model.py
"""Sieci ważone nieskierowane: macierz incydencji, laplasjan i zmiany krawędzi.

Węzły numerowane są od 1 (tak jak w plikach z listą krawędzi), macierze
indeksowane od 0. Dla n <= DENSE_LIMIT macierze są gęste (numpy), powyżej
tej granicy rzadkie (scipy.sparse, format CSR).
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from utils.utils import normalize_pair

DENSE_LIMIT = 200
SYMMETRY_TOL = 1e-12


class NetworkError(ValueError):
    """Niepoprawna sieć albo zbiór zmian niezgodny z siecią."""


class DimensionError(ValueError):
    """Niezgodne wymiary danych wejściowych."""


def _store(matrix, n):
    """Gęsta macierz dla małych sieci, CSR dla dużych; wynik tylko do odczytu."""
    if n <= DENSE_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        dense.setflags(write=False)
        return dense
    return sp.csr_matrix(matrix)


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    weight: float

    @property
    def pair(self):
        return normalize_pair(self.tail, self.head)


@dataclass(frozen=True)
class Network:
    """Sieć o n węzłach i zorientowanych krawędziach (tail, head, waga > 0)."""
    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise NetworkError(f"Sieć musi mieć co najmniej jeden węzeł, n={self.n}")
        edges = tuple(e if isinstance(e, Edge) else Edge(int(e[0]), int(e[1]), float(e[2]))
                      for e in self.edges)
        seen = set()
        for e in edges:
            if e.tail == e.head:
                raise NetworkError(f"Pętla własna w węźle {e.tail} jest niedozwolona")
            if not (1 <= e.tail <= self.n and 1 <= e.head <= self.n):
                raise NetworkError(f"Krawędź {(e.tail, e.head)} wychodzi poza węzły 1..{self.n}")
            if not (np.isfinite(e.weight) and e.weight > 0):
                raise NetworkError(f"Waga krawędzi {(e.tail, e.head)} musi być dodatnia: {e.weight}")
            if e.pair in seen:
                raise NetworkError(f"Powtórzona para węzłów {e.pair}")
            seen.add(e.pair)
        object.__setattr__(self, 'edges', edges)

    @classmethod
    def from_triples(cls, n, triples):
        return cls(n, tuple(Edge(int(t), int(h), float(w)) for t, h, w in triples))

    @property
    def m(self):
        return len(self.edges)

    @property
    def weights(self):
        return np.array([e.weight for e in self.edges], dtype=float)

    def pairs(self):
        return [e.pair for e in self.edges]

    def has_pair(self, i, j):
        return normalize_pair(i, j) in self._pair_index()

    def weight_of(self, i, j):
        return self.edges[self._pair_index()[normalize_pair(i, j)]].weight

    def _pair_index(self):
        return {e.pair: k for k, e in enumerate(self.edges)}


@dataclass(frozen=True, eq=False)
class Laplacian:
    """Symetryczna macierz n×n o zerowych sumach wierszy.

    Dla różnicy laplasjanów (is_difference=True) nie sprawdzamy znaków wpisów.
    """
    n: int
    matrix: object = field(repr=False)
    is_difference: bool = False

    def __post_init__(self):
        if self.matrix.shape != (self.n, self.n):
            raise DimensionError(f"Laplasjan ma wymiar {self.matrix.shape}, oczekiwano {(self.n, self.n)}")

    def toarray(self):
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.array(self.matrix)

    def __matmul__(self, other):
        return self.matrix @ other

    def check_invariants(self, tol=SYMMETRY_TOL):
        """Zwraca listę naruszonych własności (pusta lista = poprawny laplasjan)."""
        dense = self.toarray()
        problems = []
        if np.max(np.abs(dense - dense.T), initial=0.0) > tol:
            problems.append("macierz nie jest symetryczna")
        if np.max(np.abs(dense.sum(axis=1)), initial=0.0) > tol * max(1.0, np.abs(dense).max(initial=0.0)):
            problems.append("sumy wierszy nie są zerowe")
        if not self.is_difference:
            off = dense - np.diag(np.diag(dense))
            if np.any(off > tol):
                problems.append("dodatni wpis poza przekątną")
            if np.any(np.diag(dense) < -tol):
                problems.append("ujemny wpis na przekątnej")
        return problems

    def nonzero_pairs(self, tol=0.0):
        """Pary (i, j), i < j, numerowane od 1, dla niezerowych wpisów poza przekątną."""
        dense = self.toarray()
        rows, cols = np.nonzero(np.tril(np.abs(dense) > tol, k=-1))
        return sorted(normalize_pair(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols))


@dataclass(frozen=True)
class EdgeChangeSet:
    """Usunięte pary oraz dodane pary z wagami (numeracja od 1)."""
    removed: frozenset = frozenset()
    added: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'removed', frozenset(normalize_pair(*p) for p in self.removed))
        added = tuple((normalize_pair(*pair), float(w)) for pair, w in self.added)
        for pair, w in added:
            if pair[0] == pair[1]:
                raise NetworkError(f"Dodawana krawędź {pair} jest pętlą własną")
            if not (np.isfinite(w) and w > 0):
                raise NetworkError(f"Waga dodawanej krawędzi {pair} musi być dodatnia: {w}")
        if len({pair for pair, _ in added}) != len(added):
            raise NetworkError("Ta sama para dodana więcej niż raz")
        object.__setattr__(self, 'added', tuple(sorted(added)))

    @property
    def added_pairs(self):
        return frozenset(pair for pair, _ in self.added)

    def is_empty(self):
        return not self.removed and not self.added

    def validate_against(self, net):
        for pair in sorted(self.removed):
            if not net.has_pair(*pair):
                raise NetworkError(f"Nie można usunąć nieistniejącej krawędzi {pair}")
        for pair, _ in self.added:
            if not (1 <= pair[0] and pair[1] <= net.n):
                raise NetworkError(f"Dodawana krawędź {pair} wychodzi poza węzły 1..{net.n}")
            if net.has_pair(*pair):
                raise NetworkError(f"Nie można dodać istniejącej krawędzi {pair}")
        common = self.removed & self.added_pairs
        if common:
            raise NetworkError(f"Para jednocześnie usuwana i dodawana: {sorted(common)[0]}")


def incidence_matrix(net):
    """Macierz incydencji m×n: -1 w kolumnie tail, +1 w kolumnie head."""
    rows = np.repeat(np.arange(net.m), 2)
    cols = np.array([[e.tail - 1, e.head - 1] for e in net.edges], dtype=int).reshape(-1)
    vals = np.tile([-1.0, 1.0], net.m)
    A = sp.coo_matrix((vals, (rows, cols)), shape=(net.m, net.n))
    return _store(A, net.n)


def _laplacian_from_incidence(net):
    A = sp.csr_matrix(incidence_matrix(net))
    idx = np.arange(net.m)
    C = sp.csr_matrix((net.weights, (idx, idx)), shape=(net.m, net.m))
    return (A.T @ C @ A).tocsr()


def _laplacian_entrywise(net):
    L = sp.lil_matrix((net.n, net.n))
    for e in net.edges:
        i, j = e.tail - 1, e.head - 1
        L[i, j] = -e.weight
        L[j, i] = -e.weight
        L[i, i] += e.weight
        L[j, j] += e.weight
    return L.tocsr()


def laplacian(net, method="incidence"):
    """Laplasjan L = AᵀCA ("incidence") albo złożony wpis po wpisie ("entrywise")."""
    if method == "incidence":
        L = _laplacian_from_incidence(net)
    elif method == "entrywise":
        L = _laplacian_entrywise(net)
    else:
        raise ValueError(f"Nieznana metoda budowy laplasjanu: {method}")
    return Laplacian(net.n, _store(L, net.n))


def _change_delta(n, changes, net):
    # usunięcie krawędzi o wadze c: +c poza przekątną, -c na przekątnej
    D = sp.lil_matrix((n, n))
    signed = [(pair, net.weight_of(*pair)) for pair in sorted(changes.removed)]
    signed += [(pair, -w) for pair, w in changes.added]
    for (i, j), c in signed:
        i, j = i - 1, j - 1
        D[i, j] += c
        D[j, i] += c
        D[i, i] -= c
        D[j, j] -= c
    return D.tocsr()


def apply_changes(net, changes):
    """Stosuje zmiany do sieci; zwraca (sieć po zmianie, L₁, ΔL = L₁ − L₀)."""
    changes.validate_against(net)
    kept = [e for e in net.edges if e.pair not in changes.removed]
    kept += [Edge(pair[0], pair[1], w) for pair, w in changes.added]
    new_net = Network(net.n, tuple(kept))
    L1 = laplacian(new_net)
    delta = Laplacian(net.n, _store(_change_delta(net.n, changes, net), net.n), is_difference=True)
    return new_net, L1, delta


def edge_flows(net, u):
    """Przepływy krawędziowe w = C·A·u; spełniają Aᵀw = L·u."""
    u = np.asarray(u, dtype=float)
    if u.shape != (net.n,):
        raise DimensionError(f"Wektor potencjałów ma długość {u.shape[0]}, oczekiwano {net.n}")
    return net.weights * (incidence_matrix(net) @ u)

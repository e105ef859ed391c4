# models/vectorize.py
"""Wektoryzacja modelu EIV: Vec/Vech, macierze duplikacji i eliminacji, układ regresji.

Porządek Vech: kolumnami dolnego trójkąta (z przekątną). Pozycja (i, j), i >= j,
ma w Vec indeks j*n + i.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from models.graph_model import DimensionError, Laplacian

logger = logging.getLogger(__name__)

# Powyżej tej liczby wpisów X nie jest materializowana gęsto.
DENSE_ENTRIES_LIMIT = 10 ** 7


def vech_length(n):
    return n * (n + 1) // 2


def vec(matrix):
    """Wektor kolumn macierzy (kolejność kolumnowa)."""
    return np.asarray(matrix, dtype=float).reshape(-1, order='F')


class VechIndexMap:
    """Bijekcja między pozycjami Vech a parami węzłów (i >= j), indeksy od 0."""

    def __init__(self, n):
        if n < 1:
            raise DimensionError(f"Rozmiar macierzy musi być dodatni, n={n}")
        self.n = n
        rows, cols = np.tril_indices(n)
        perm = np.argsort(cols * n + rows, kind='stable')
        self.rows = rows[perm]
        self.cols = cols[perm]
        self.rows.setflags(write=False)
        self.cols.setflags(write=False)

    @property
    def p(self):
        return vech_length(self.n)

    def index(self, i, j):
        if i < j:
            i, j = j, i
        if not (0 <= j <= i < self.n):
            raise IndexError(f"Para {(i, j)} poza macierzą {self.n}×{self.n}")
        return j * self.n - j * (j - 1) // 2 + (i - j)

    def pair(self, k):
        return int(self.rows[k]), int(self.cols[k])

    @property
    def diagonal(self):
        """Maska pozycji Vech leżących na przekątnej."""
        return self.rows == self.cols

    @property
    def vec_lower(self):
        return self.cols * self.n + self.rows

    @property
    def vec_upper(self):
        return self.rows * self.n + self.cols


def vech(matrix):
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
    idx = VechIndexMap(dense.shape[0])
    return dense[idx.rows, idx.cols].astype(float)


def unvech(v, n):
    """Symetryczna macierz n×n odtworzona z Vech."""
    v = np.asarray(v, dtype=float)
    if v.shape != (vech_length(n),):
        raise DimensionError(f"Wektor Vech ma długość {v.shape}, oczekiwano {vech_length(n)} dla n={n}")
    idx = VechIndexMap(n)
    matrix = np.zeros((n, n))
    matrix[idx.rows, idx.cols] = v
    matrix[idx.cols, idx.rows] = v
    return matrix


def duplication_matrix(n):
    """Macierz duplikacji D (n² × n(n+1)/2): D·Vech(M) = Vec(M) dla symetrycznej M."""
    idx = VechIndexMap(n)
    p = idx.p
    target = np.empty(n * n, dtype=int)
    target[idx.vec_lower] = np.arange(p)
    target[idx.vec_upper] = np.arange(p)
    return sp.csr_matrix((np.ones(n * n), (np.arange(n * n), target)), shape=(n * n, p))


def elimination_matrix(n):
    """Macierz eliminacji E (n(n+1)/2 × n²): E·Vec(M) = Vech(M)."""
    idx = VechIndexMap(n)
    p = idx.p
    return sp.csr_matrix((np.ones(p), (np.arange(p), idx.vec_lower)), shape=(p, n * n))


def _design_columns(u_tilde, idx):
    """X = (Ũᵀ ⊗ I)D jako macierz rzadka CSC o wymiarze nT × p.

    Kolumna (i, j), i > j: wiersze t*n+i z wartościami Ũ[j, t] oraz t*n+j z Ũ[i, t].
    Kolumna (i, i): wiersze t*n+i z wartościami Ũ[i, t].
    """
    n, T = u_tilde.shape
    t = np.arange(T)
    rows_i = idx.rows[:, None] + n * t[None, :]
    vals_i = u_tilde[idx.cols, :]
    off = ~idx.diagonal
    rows_j = idx.cols[off][:, None] + n * t[None, :]
    vals_j = u_tilde[idx.rows[off], :]
    col_i = np.repeat(np.arange(idx.p), T)
    col_j = np.repeat(np.flatnonzero(off), T)
    rows = np.concatenate([rows_i.reshape(-1), rows_j.reshape(-1)])
    cols = np.concatenate([col_i, col_j])
    vals = np.concatenate([vals_i.reshape(-1), vals_j.reshape(-1)])
    return sp.csc_matrix((vals, (rows, cols)), shape=(n * T, idx.p))


@dataclass(frozen=True, eq=False)
class DesignSystem:
    """Układ regresji y + Δy = (X + ΔX)(β₀ + β) w aktywnych współrzędnych.

    Bez redukcji aktywne są wszystkie pozycje Vech; po redukcji tylko `support`.
    `beta0` ma długość równą liczbie aktywnych współrzędnych.
    """
    u_tilde: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    beta0: np.ndarray = field(repr=False)
    index_map: VechIndexMap = field(repr=False)
    columns: sp.csc_matrix = field(repr=False)
    support: np.ndarray = None

    @property
    def n(self):
        return self.index_map.n

    @property
    def T(self):
        return self.u_tilde.shape[1]

    @property
    def n_samples(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.index_map.p

    @property
    def dim(self):
        return self.columns.shape[1]

    @property
    def is_reduced(self):
        return self.support is not None

    @property
    def active(self):
        """Indeksy Vech aktywnych współrzędnych."""
        return self.support if self.is_reduced else np.arange(self.p)

    @property
    def X(self):
        """Gęsta X, o ile mieści się w limicie; inaczej operator bez materializacji."""
        if self.n_samples * self.dim <= DENSE_ENTRIES_LIMIT:
            return self.columns.toarray()
        return self.as_operator()

    def matvec(self, beta):
        return self.columns @ beta

    def rmatvec(self, w):
        return self.columns.T @ w

    def kron_matvec(self, beta):
        """X·β liczone z tożsamości Kroneckera: Vec(unvech(β)·Ũ)."""
        M = unvech(self.expand(beta), self.n)
        return vec(M @ self.u_tilde)

    def kron_rmatvec(self, w):
        """Xᵀ·w = Dᵀ Vec(W Ũᵀ), W = macierz n×T z wektora w."""
        W = np.asarray(w, dtype=float).reshape(self.n, self.T, order='F')
        S = W @ self.u_tilde.T
        full = S[self.index_map.rows, self.index_map.cols]
        off = ~self.index_map.diagonal
        full[off] += S[self.index_map.cols[off], self.index_map.rows[off]]
        return self.restrict(full)

    def as_operator(self):
        return LinearOperator((self.n_samples, self.dim), matvec=self.kron_matvec,
                              rmatvec=self.kron_rmatvec, dtype=float)

    def residual0(self):
        """r = y − Xβ₀."""
        return self.y - self.matvec(self.beta0)

    def expand(self, beta):
        """Wektor aktywnych współrzędnych uzupełniony zerami do pełnej długości p."""
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.dim,):
            raise DimensionError(f"Wektor β ma długość {beta.shape}, oczekiwano {self.dim}")
        if not self.is_reduced:
            return beta.copy()
        full = np.zeros(self.p)
        full[self.support] = beta
        return full

    def restrict(self, beta_full):
        beta_full = np.asarray(beta_full, dtype=float)
        return beta_full[self.support] if self.is_reduced else beta_full

    def describe(self):
        return {
            "n": self.n,
            "T": self.T,
            "rows": int(self.n_samples),
            "columns": int(self.dim),
            "p": int(self.p),
            "reduced": self.is_reduced,
            "operator_mode": self.n_samples * self.dim > DENSE_ENTRIES_LIMIT,
        }


def build_design(ms, L0):
    """Buduje X = (Ũᵀ ⊗ I)D, y = Vec(F̃), β₀ = Vech(L₀) z pomiarów."""
    L0_dense = L0.toarray() if isinstance(L0, Laplacian) else np.asarray(L0, dtype=float)
    n = L0_dense.shape[0]
    if ms.u_noisy.shape[0] != n or ms.f_noisy.shape != ms.u_noisy.shape:
        raise DimensionError(
            f"Pomiary {ms.u_noisy.shape}/{ms.f_noisy.shape} niezgodne z laplasjanem {n}×{n}")
    idx = VechIndexMap(n)
    u_tilde = np.array(ms.u_noisy, dtype=float)
    ds = DesignSystem(u_tilde=u_tilde, y=vec(ms.f_noisy), beta0=vech(L0_dense),
                      index_map=idx, columns=_design_columns(u_tilde, idx))
    logger.info("Układ regresji: X %d×%d (n=%d, T=%d)", ds.n_samples, ds.dim, n, ds.T)
    return ds


def support_reduce(ds, L0):
    """Ogranicza układ do pozycji Vech niezerowych w L₀ (krawędzie i przekątna)."""
    if ds.is_reduced:
        raise ValueError("Układ regresji jest już zredukowany")
    beta0_full = vech(L0.toarray() if isinstance(L0, Laplacian) else L0)
    if beta0_full.shape != (ds.p,):
        raise DimensionError(f"Laplasjan L₀ nie pasuje do układu o p={ds.p}")
    support = np.flatnonzero(beta0_full != 0)
    support.setflags(write=False)
    reduced = replace(ds, beta0=beta0_full[support], columns=ds.columns[:, support].tocsc(),
                      support=support)
    logger.info("Redukcja nośnika: %d -> %d współrzędnych", ds.p, reduced.dim)
    return reduced

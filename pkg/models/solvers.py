# models/solvers.py
"""Estymatory wektora zmian β.

- LASSO: ½‖r − Xβ‖² + λ‖β‖₁, r = y − Xβ₀, cykliczny spadek po współrzędnych
  z aktywnym zbiorem.
- Rzadki TLS po przeformułowaniu: ‖X(β₀+β) − y‖² / (1 + ‖β₀+β‖²) + λ‖β‖₁,
  metoda gradientu proksymalnego (ISTA) z backtrackingiem.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import svds

from models.graph_model import DimensionError

logger = logging.getLogger(__name__)

LASSO_OBJECTIVE = "0.5*||y - X*beta0 - X*beta||^2 + lambda*||beta||_1"
TLS_OBJECTIVE = "||X*(beta0+beta) - y||^2 / (1 + ||beta0+beta||^2) + lambda*||beta||_1"


def scaled_lambda(lam, lambda_scale, n_samples):
    """λ w skali solvera; "n_samples" mnoży przez liczbę obserwacji N = nT."""
    if lambda_scale == "n_samples":
        return lam * n_samples
    return lam * float(lambda_scale)


@dataclass(frozen=True)
class LassoConfig:
    lam: float
    tol: float = 1e-8
    max_iters: int = 100_000
    standardize: bool = False
    lambda_scale: object = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"Lambda nie może być ujemna: {self.lam}")
        if self.tol <= 0:
            raise ValueError(f"Tolerancja musi być dodatnia: {self.tol}")


@dataclass(frozen=True)
class TlsConfig:
    lam: float
    step: str = "backtracking"
    step_size: float = None
    shrink: float = 0.5
    init: str = "zero"
    tol: float = 1e-6
    max_iters: int = 10_000
    lambda_scale: object = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"Lambda nie może być ujemna: {self.lam}")
        if not 0 < self.shrink < 1:
            raise ValueError(f"Współczynnik zmniejszania kroku musi leżeć w (0, 1): {self.shrink}")
        if self.step not in ("fixed", "backtracking"):
            raise ValueError(f"Nieznana reguła kroku: {self.step}")
        if self.init not in ("zero", "lasso"):
            raise ValueError(f"Nieznana inicjalizacja: {self.init}")
        if self.tol <= 0:
            raise ValueError(f"Tolerancja musi być dodatnia: {self.tol}")


@dataclass(frozen=True, eq=False)
class Estimate:
    beta: np.ndarray = field(repr=False)
    objective_trace: tuple = field(repr=False)
    iterations: int
    converged: bool
    solver: str
    lam: float
    lam_effective: float
    settings: dict = field(default_factory=dict)

    @property
    def objective(self):
        return self.objective_trace[-1] if self.objective_trace else float('nan')

    def to_dict(self, ds):
        """Eksport: wartości niezerowe β̂ jako pary (indeks Vech, para węzłów, wartość)."""
        full = ds.expand(self.beta)
        nz = np.flatnonzero(full)
        return {
            "solver": self.solver,
            "lambda": self.lam,
            "lambda_effective": self.lam_effective,
            "iterations": self.iterations,
            "converged": self.converged,
            "objective": self.objective,
            "settings": dict(self.settings),
            "beta": [
                {"index": int(k), "pair": [ds.index_map.pair(k)[0] + 1, ds.index_map.pair(k)[1] + 1],
                 "value": float(full[k])}
                for k in nz
            ],
        }


def soft_threshold(z, t):
    """sign(z)·max(|z| − t, 0)."""
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def _column_scales(ds, standardize):
    col_sq = np.asarray(ds.columns.multiply(ds.columns).sum(axis=0)).ravel()
    if not standardize:
        return np.ones(ds.dim), col_sq
    # kolumny o jednostkowej średniej kwadratowej: ‖x̃_j‖² = N
    scales = np.sqrt(col_sq / ds.n_samples)
    scales[scales == 0] = 1.0
    return scales, col_sq / scales ** 2


def lambda_max(ds, standardize=False):
    """Najmniejsza λ (w skali solvera), dla której β̂ = 0."""
    scales, _ = _column_scales(ds, standardize)
    return float(np.max(np.abs(ds.rmatvec(ds.residual0()) / scales), initial=0.0))


def lasso(ds, cfg):
    """LASSO metodą spadku po współrzędnych; przy braku zbieżności converged=False."""
    X = ds.columns
    scales, col_sq = _column_scales(ds, cfg.standardize)
    norms = np.sqrt(col_sq)
    lam = scaled_lambda(cfg.lam, cfg.lambda_scale, ds.n_samples)
    indptr, indices, data = X.indptr, X.indices, X.data

    beta = np.zeros(ds.dim)
    resid = ds.residual0().copy()
    live = col_sq > 0

    def objective():
        return 0.5 * float(resid @ resid) + lam * float(np.abs(beta).sum())

    def sweep(coords):
        biggest = 0.0
        for j in coords:
            lo, hi = indptr[j], indptr[j + 1]
            rows = indices[lo:hi]
            vals = data[lo:hi] / scales[j]
            old = beta[j]
            rho = vals @ resid[rows] + col_sq[j] * old
            new = soft_threshold(rho, lam) / col_sq[j]
            if new != old:
                resid[rows] -= vals * (new - old)
                beta[j] = new
                biggest = max(biggest, abs(new - old) * norms[j])
        return biggest

    trace = [objective()]
    active = np.array([], dtype=int)
    converged = False
    iterations = 0
    while iterations < cfg.max_iters:
        grad = (X.T @ resid) / scales
        zero = beta == 0
        violators = np.flatnonzero(zero & live & (np.abs(grad) > lam + cfg.tol * norms))
        on = ~zero
        kkt_active = np.all(np.abs(grad[on] - lam * np.sign(beta[on])) <= cfg.tol * norms[on])
        if violators.size == 0 and kkt_active:
            converged = True
            break
        active = np.union1d(np.flatnonzero(on), violators)
        # spadek po aktywnym zbiorze aż do ustabilizowania
        while iterations < cfg.max_iters:
            change = sweep(active)
            iterations += 1
            trace.append(objective())
            if change <= cfg.tol:
                break

    if not converged:
        logger.warning("LASSO: brak zbieżności po %d iteracjach (lambda=%g)", iterations, cfg.lam)
    else:
        logger.debug("LASSO: zbieżność po %d iteracjach, %d niezerowych", iterations,
                     int(np.count_nonzero(beta)))
    return Estimate(
        beta=beta / scales,
        objective_trace=tuple(trace),
        iterations=iterations,
        converged=converged,
        solver="lasso",
        lam=float(cfg.lam),
        lam_effective=float(lam),
        settings={"objective": LASSO_OBJECTIVE, "tol": cfg.tol, "max_iters": cfg.max_iters,
                  "standardize": cfg.standardize, "lambda_scale": cfg.lambda_scale},
    )


def _check_beta(beta, ds):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (ds.dim,):
        raise DimensionError(f"Wektor β ma długość {beta.shape}, oczekiwano {ds.dim}")
    return beta


def _smooth_value(beta, ds):
    b = ds.beta0 + beta
    r = ds.matvec(b) - ds.y
    return float(r @ r) / (1.0 + float(b @ b))


def tls_objective(beta, ds, lam):
    """Funkcja celu rzadkiego TLS po eliminacji błędów danych."""
    beta = _check_beta(beta, ds)
    return _smooth_value(beta, ds) + lam * float(np.abs(beta).sum())


def tls_smooth_gradient(beta, ds):
    """Gradient części gładkiej: 2Xᵀr/d − (2‖r‖²/d²)·b, b = β₀+β, r = Xb − y, d = 1+‖b‖²."""
    beta = _check_beta(beta, ds)
    b = ds.beta0 + beta
    r = ds.matvec(b) - ds.y
    d = 1.0 + float(b @ b)
    return 2.0 * ds.rmatvec(r) / d - (2.0 * float(r @ r) / d ** 2) * b


def least_norm_errors(beta, ds):
    """Błędy danych o najmniejszej normie dla ustalonego β.

    G(β) = [(β₀+β)ᵀ, −1] ⊗ I, v = G(β)ᵀ(y − X(β₀+β)) / (1 + ‖β₀+β‖²),
    v = Vec([ΔX Δy]). Zwraca (ΔX̂, Δŷ, v); ΔX̂ jest gęsta.
    """
    beta = _check_beta(beta, ds)
    b = ds.beta0 + beta
    z = ds.y - ds.matvec(b)
    d = 1.0 + float(b @ b)
    delta_x = np.outer(z, b) / d
    delta_y = -z / d
    v = np.concatenate([delta_x.reshape(-1, order='F'), delta_y])
    return delta_x, delta_y, v


def tls_lambda_max(ds):
    """Najmniejsza λ (w skali solvera), dla której β = 0 jest punktem stacjonarnym TLS."""
    return float(np.max(np.abs(tls_smooth_gradient(np.zeros(ds.dim), ds)), initial=0.0))


def _initial_step(ds):
    # 1 / (2σ_max(X)²) ogranicza z góry stałą Lipschitza członu ‖Xb − y‖²
    if min(ds.columns.shape) > 1:
        smax = svds(ds.columns, k=1, return_singular_vectors=False, random_state=0)[0]
    else:
        smax = np.linalg.norm(ds.columns.toarray())
    return 1.0 / (2.0 * smax ** 2) if smax > 0 else 1.0


def tls_proximal_gradient(ds, cfg, beta_init=None):
    """Gradient proksymalny dla rzadkiego TLS; bez gwarancji optimum globalnego."""
    lam = scaled_lambda(cfg.lam, cfg.lambda_scale, ds.n_samples)
    if beta_init is not None:
        beta = _check_beta(beta_init, ds).copy()
    elif cfg.init == "lasso":
        warm = lasso(ds, LassoConfig(lam=cfg.lam, lambda_scale=cfg.lambda_scale))
        beta = warm.beta.copy()
    else:
        beta = np.zeros(ds.dim)
    if beta_init is None and cfg.init == "zero":
        lmax = tls_lambda_max(ds)
        if lam >= lmax:
            logger.warning("TLS: lambda=%g (w skali solvera %g) >= lambda_max=%g, estymata będzie zerowa",
                           cfg.lam, lam, lmax)
    step = cfg.step_size if cfg.step_size is not None else _initial_step(ds)

    def total(value, x):
        return value + lam * float(np.abs(x).sum())

    f = _smooth_value(beta, ds)
    trace = [total(f, beta)]
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        grad = tls_smooth_gradient(beta, ds)
        while True:
            candidate = soft_threshold(beta - step * grad, step * lam)
            diff = candidate - beta
            f_new = _smooth_value(candidate, ds)
            if cfg.step == "fixed":
                break
            if f_new <= f + float(grad @ diff) + float(diff @ diff) / (2.0 * step):
                break
            step *= cfg.shrink
            if step < 1e-300:
                break
        beta, f = candidate, f_new
        trace.append(total(f, beta))
        if np.linalg.norm(diff) <= cfg.tol:
            converged = True
            break

    if not converged:
        logger.warning("TLS: brak zbieżności po %d iteracjach (lambda=%g)", iterations, cfg.lam)
    return Estimate(
        beta=beta,
        objective_trace=tuple(trace),
        iterations=iterations,
        converged=converged,
        solver="tls",
        lam=float(cfg.lam),
        lam_effective=float(lam),
        settings={"objective": TLS_OBJECTIVE, "tol": cfg.tol, "max_iters": cfg.max_iters,
                  "step": cfg.step, "step_size": step, "shrink": cfg.shrink, "init": cfg.init,
                  "standardize": False, "lambda_scale": cfg.lambda_scale},
    )

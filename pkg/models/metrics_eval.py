# models/metrics_eval.py
"""Ocena nośnika β̂ względem prawdy (TP/TN/FP/FN, acc) i przeglądy po siatce λ."""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from models.pipeline import realize, solve

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["lambda", "tp", "tn", "fp", "fn", "acc", "runs", "solver"]


@dataclass(frozen=True)
class ConfusionCounts:
    """Odsetki współrzędnych β (normowane długością wektora); sumują się do 1."""
    tp: float
    tn: float
    fp: float
    fn: float
    size: int

    @property
    def tpr(self):
        """Odsetek zmienionych współrzędnych wykrytych poprawnie."""
        positives = self.tp + self.fn
        return self.tp / positives if positives > 0 else 1.0

    @property
    def tnr(self):
        negatives = self.tn + self.fp
        return self.tn / negatives if negatives > 0 else 1.0


def zero_threshold(beta_hat):
    """ε = 1e-6·max(1, ‖β̂‖∞)."""
    return 1e-6 * max(1.0, float(np.max(np.abs(beta_hat), initial=0.0)))


def classify_support(beta_hat, beta_true, eps=None):
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_true = np.asarray(beta_true, dtype=float)
    if beta_hat.shape != beta_true.shape:
        raise ValueError(f"Wektory mają różne długości: {beta_hat.shape} i {beta_true.shape}")
    if eps is None:
        eps = zero_threshold(beta_hat)
    size = beta_hat.size
    found = np.abs(beta_hat) > eps
    changed = beta_true != 0
    if size == 0:
        return ConfusionCounts(0.0, 1.0, 0.0, 0.0, 0)
    return ConfusionCounts(
        tp=np.count_nonzero(found & changed) / size,
        tn=np.count_nonzero(~found & ~changed) / size,
        fp=np.count_nonzero(found & ~changed) / size,
        fn=np.count_nonzero(~found & changed) / size,
        size=size,
    )


def accuracy(c):
    total = c.tp + c.tn + c.fp + c.fn
    return (c.tp + c.tn) / total if total > 0 else 1.0


@dataclass(frozen=True)
class SweepRow:
    lam: float
    tp: float
    tn: float
    fp: float
    fn: float
    acc: float
    tpr: float
    tnr: float
    runs: int
    seeds: tuple
    solver: str
    nonconverged: int = 0
    std: dict = field(default=None, compare=False)

    def as_record(self):
        return {"lambda": self.lam, "tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
                "acc": self.acc, "runs": self.runs, "solver": self.solver}


def _run_cells(scenario, lambdas, seed, solver, standardize, lambda_scale):
    """Wszystkie komórki (λ, seed) dla jednego losowania scenariusza."""
    run = realize(scenario, seed)
    cells = []
    for lam in lambdas:
        est = solve(run.design, solver, lam, standardize=standardize, lambda_scale=lambda_scale)
        counts = classify_support(est.beta, run.beta_true)
        logger.info("Komórka lambda=%g seed=%d: acc=%.4f, zbieżność=%s",
                    lam, seed, accuracy(counts), est.converged)
        cells.append((counts, est.converged))
    return cells


def lambda_sweep(scenario, lambdas, runs, solver="lasso", seed0=0, jobs=1,
                 standardize=False, lambda_scale=1.0, with_std=False):
    """Uśrednia wskaźniki po `runs` losowaniach (seed0 … seed0+runs−1) dla każdej λ."""
    lambdas = np.unique(np.asarray(lambdas, dtype=float))
    if lambdas.size == 0:
        raise ValueError("Siatka lambda jest pusta")
    if runs < 1:
        raise ValueError(f"Liczba powtórzeń musi być dodatnia: {runs}")
    seeds = tuple(range(seed0, seed0 + runs))
    args = (solver, standardize, lambda_scale)
    if jobs == 1:
        per_run = [_run_cells(scenario, lambdas, seed, *args) for seed in seeds]
    else:
        per_run = Parallel(n_jobs=jobs)(
            delayed(_run_cells)(scenario, lambdas, seed, *args) for seed in seeds)

    rows = []
    for col, lam in enumerate(lambdas):
        cells = [run_cells[col] for run_cells in per_run]
        table = pd.DataFrame([{"tp": c.tp, "tn": c.tn, "fp": c.fp, "fn": c.fn,
                               "acc": accuracy(c), "tpr": c.tpr, "tnr": c.tnr}
                              for c, _ in cells])
        means = table.mean()
        nonconverged = sum(1 for _, ok in cells if not ok)
        if nonconverged:
            logger.warning("lambda=%g: %d z %d przebiegów bez zbieżności", lam, nonconverged, runs)
        rows.append(SweepRow(
            lam=float(lam), tp=float(means.tp), tn=float(means.tn), fp=float(means.fp),
            fn=float(means.fn), acc=float(means.acc), tpr=float(means.tpr), tnr=float(means.tnr),
            runs=runs, seeds=seeds, solver=solver, nonconverged=nonconverged,
            std=table.std(ddof=0).to_dict() if with_std else None,
        ))
    return rows


def sweep_frame(rows):
    """Tabela przeglądu w kolumnach lambda,tp,tn,fp,fn,acc,runs,solver."""
    return pd.DataFrame([row.as_record() for row in rows], columns=SWEEP_COLUMNS)

import unittest

import numpy as np

from data.data_loader import SYNTHETIC8_REMOVED, builtin_network
from data.simulator import simulate
from models.graph_model import EdgeChangeSet, Network, apply_changes, laplacian
from models.solvers import (
    LassoConfig, TlsConfig, lambda_max, lasso, least_norm_errors, scaled_lambda, soft_threshold,
    tls_lambda_max, tls_objective, tls_proximal_gradient, tls_smooth_gradient,
)
from models.vectorize import build_design, support_reduce, vech

SMALL_NET = Network.from_triples(4, [(1, 2, 1.0), (2, 3, 2.0), (3, 4, 0.5), (1, 3, 1.5)])


def synthetic_system(noise=0.1, seed=0, reduced=False, T=30):
    net = builtin_network("synthetic8")
    L0 = laplacian(net)
    _, L1, delta = apply_changes(net, EdgeChangeSet(removed=frozenset(SYNTHETIC8_REMOVED)))
    ds = build_design(simulate(L1, T, noise, seed), L0)
    if reduced:
        ds = support_reduce(ds, L0)
    return ds, ds.restrict(vech(delta.toarray()))


def small_system(seed):
    L0 = laplacian(SMALL_NET)
    return build_design(simulate(L0, 6, 0.1, seed), L0)


class TestLasso(unittest.TestCase):

    def test_soft_threshold(self):
        np.testing.assert_array_equal(soft_threshold(np.array([-3.0, -0.5, 0.0, 0.5, 3.0]), 1.0),
                                      [-2.0, 0.0, 0.0, 0.0, 2.0])

    def test_scaled_lambda(self):
        self.assertEqual(scaled_lambda(0.5, 1.0, 240), 0.5)
        self.assertEqual(scaled_lambda(0.5, "n_samples", 240), 120.0)

    def test_negative_lambda(self):
        with self.assertRaises(ValueError):
            LassoConfig(lam=-1.0)

    def test_zero_above_lambda_max(self):
        ds, _ = synthetic_system()
        est = lasso(ds, LassoConfig(lam=lambda_max(ds) * 1.001))
        self.assertTrue(est.converged)
        np.testing.assert_array_equal(est.beta, np.zeros(ds.dim))

    def test_zero_above_lambda_max_standardized(self):
        ds, _ = synthetic_system()
        lam = lambda_max(ds, standardize=True) * 1.001 / ds.n_samples
        est = lasso(ds, LassoConfig(lam=lam, standardize=True, lambda_scale="n_samples"))
        self.assertEqual(np.count_nonzero(est.beta), 0)

    def test_nonzero_below_lambda_max(self):
        ds, _ = synthetic_system()
        est = lasso(ds, LassoConfig(lam=lambda_max(ds) * 0.9))
        self.assertGreater(np.count_nonzero(est.beta), 0)

    def test_noiseless_recovery(self):
        for seed in range(20):
            ds, beta_true = synthetic_system(noise=0.0, seed=seed)
            est = lasso(ds, LassoConfig(lam=1e-8))
            self.assertTrue(est.converged, seed)
            self.assertLess(np.max(np.abs(est.beta - beta_true)), 1e-4, seed)
            np.testing.assert_array_equal(np.abs(est.beta) > 1e-6, beta_true != 0)

    def test_noiseless_matches_least_squares_on_support(self):
        ds, beta_true = synthetic_system(noise=0.0, seed=11, reduced=True)
        support = np.flatnonzero(beta_true)
        X = ds.columns.toarray()[:, support]
        oracle, *_ = np.linalg.lstsq(X, ds.residual0(), rcond=None)
        est = lasso(ds, LassoConfig(lam=1e-8))
        np.testing.assert_allclose(est.beta[support], oracle, atol=1e-4)

    def test_kkt_conditions(self):
        ds, _ = synthetic_system(seed=4)
        lam = 5.0
        est = lasso(ds, LassoConfig(lam=lam))
        grad = ds.rmatvec(ds.residual0() - ds.matvec(est.beta))
        on = est.beta != 0
        self.assertTrue(np.all(np.abs(grad) <= lam + 1e-5))
        np.testing.assert_allclose(grad[on], lam * np.sign(est.beta[on]), atol=1e-5)

    def test_objective_trace_non_increasing(self):
        ds, _ = synthetic_system(seed=2)
        trace = np.array(lasso(ds, LassoConfig(lam=2.0)).objective_trace)
        self.assertTrue(np.all(np.diff(trace) <= 1e-9 * np.abs(trace[:-1])))

    def test_l1_norm_monotone_in_lambda(self):
        ds, _ = synthetic_system(seed=6)
        norms = [np.abs(lasso(ds, LassoConfig(lam=lam)).beta).sum() for lam in (1.0, 5.0, 20.0, 80.0)]
        for before, after in zip(norms, norms[1:]):
            self.assertLessEqual(after, before + 1e-6)

    def test_iteration_cap(self):
        ds, _ = synthetic_system(seed=1)
        est = lasso(ds, LassoConfig(lam=1e-3, max_iters=1))
        self.assertFalse(est.converged)
        self.assertEqual(est.iterations, 1)

    def test_export(self):
        ds, _ = synthetic_system(noise=0.0, seed=0)
        report = lasso(ds, LassoConfig(lam=1e-8)).to_dict(ds)
        pairs = {tuple(entry["pair"]) for entry in report["beta"]}
        self.assertIn((3, 2), pairs)
        self.assertEqual(report["solver"], "lasso")


class TestTotalLeastSquares(unittest.TestCase):

    def test_objective_matches_error_norm(self):
        rng = np.random.default_rng(0)
        for k in range(100):
            ds = small_system(k)
            beta = rng.standard_normal(ds.dim)
            lam = float(rng.uniform(0.0, 2.0))
            _, _, v = least_norm_errors(beta, ds)
            expected = float(v @ v) + lam * np.abs(beta).sum()
            value = tls_objective(beta, ds, lam)
            self.assertLess(abs(value - expected), 1e-8 * max(1.0, abs(expected)))

    def test_errors_satisfy_constraint(self):
        rng = np.random.default_rng(1)
        for k in range(100):
            ds = small_system(k)
            b = ds.beta0 + rng.standard_normal(ds.dim)
            delta_x, delta_y, _ = least_norm_errors(b - ds.beta0, ds)
            lhs = (ds.columns.toarray() + delta_x) @ b
            np.testing.assert_allclose(lhs, ds.y + delta_y, atol=1e-8)

    def test_errors_match_pseudoinverse(self):
        rng = np.random.default_rng(2)
        for k in range(100):
            ds = small_system(k)
            beta = rng.standard_normal(ds.dim)
            b = ds.beta0 + beta
            G = np.kron(np.append(b, -1.0)[None, :], np.eye(ds.n_samples))
            oracle = np.linalg.pinv(G) @ (ds.y - ds.matvec(b))
            _, _, v = least_norm_errors(beta, ds)
            np.testing.assert_allclose(v, oracle, atol=1e-8)

    def test_gradient_finite_differences(self):
        rng = np.random.default_rng(3)
        h = 1e-6
        for k in range(20):
            ds = small_system(k)
            beta = rng.standard_normal(ds.dim)
            numeric = np.empty(ds.dim)
            for j in range(ds.dim):
                e = np.zeros(ds.dim)
                e[j] = h
                numeric[j] = (tls_objective(beta + e, ds, 0.0) - tls_objective(beta - e, ds, 0.0)) / (2 * h)
            grad = tls_smooth_gradient(beta, ds)
            self.assertLess(np.linalg.norm(grad - numeric) / np.linalg.norm(grad), 1e-5, k)

    def test_stops_at_true_beta_without_noise(self):
        ds, beta_true = synthetic_system(noise=0.0, seed=3)
        est = tls_proximal_gradient(ds, TlsConfig(lam=0.0), beta_init=beta_true)
        self.assertTrue(est.converged)
        self.assertEqual(est.iterations, 1)
        self.assertLess(np.max(np.abs(est.beta - beta_true)), 1e-6)

    def test_descent_trace(self):
        ds, _ = synthetic_system(seed=5)
        est = tls_proximal_gradient(ds, TlsConfig(lam=1.0, max_iters=500))
        trace = np.array(est.objective_trace)
        self.assertTrue(np.all(np.diff(trace) <= 1e-10 * np.abs(trace[:-1])))
        self.assertEqual(est.solver, "tls")

    def test_zero_for_large_lambda(self):
        ds = small_system(0)
        with self.assertLogs("models.solvers", level="WARNING"):
            est = tls_proximal_gradient(ds, TlsConfig(lam=tls_lambda_max(ds) * 1.001))
        self.assertTrue(est.converged)
        np.testing.assert_array_equal(est.beta, np.zeros(ds.dim))
        self.assertFalse(est.settings["standardize"])

    def test_zero_under_sample_scaling(self):
        ds, _ = synthetic_system()
        lam = tls_lambda_max(ds) * 1.001 / ds.n_samples
        est = tls_proximal_gradient(ds, TlsConfig(lam=lam, lambda_scale="n_samples"))
        self.assertEqual(np.count_nonzero(est.beta), 0)
        self.assertAlmostEqual(est.lam_effective, tls_lambda_max(ds) * 1.001)

    def test_nonzero_below_tls_lambda_max(self):
        ds, _ = synthetic_system()
        est = tls_proximal_gradient(ds, TlsConfig(lam=tls_lambda_max(ds) * 0.5, max_iters=500))
        self.assertGreater(np.count_nonzero(est.beta), 0)

    def test_lasso_warm_start(self):
        ds, _ = synthetic_system(seed=7, reduced=True)
        start = lasso(ds, LassoConfig(lam=1.0)).beta
        warm = tls_proximal_gradient(ds, TlsConfig(lam=1.0, init="lasso", max_iters=200))
        self.assertEqual(warm.settings["init"], "lasso")
        at_start = tls_objective(start, ds, 1.0)
        self.assertAlmostEqual(warm.objective_trace[0], at_start, delta=1e-9 * abs(at_start))
        self.assertLessEqual(warm.objective, at_start + 1e-9 * abs(at_start))

    def test_invalid_config(self):
        with self.assertRaises(ValueError):
            TlsConfig(lam=1.0, shrink=1.5)
        with self.assertRaises(ValueError):
            TlsConfig(lam=1.0, init="random")


if __name__ == "__main__":
    unittest.main()

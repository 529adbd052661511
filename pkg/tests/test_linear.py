import numpy as np
import pytest
from scipy.optimize import minimize
from sklearn.svm import LinearSVC

from harstack.linear import (
    LinearSVMOvR,
    LogisticRegressionOvR,
    decision_scores,
    logistic_loss_and_grad,
    sigmoid,
    train_linear_svm_ovr,
    train_logreg_ovr,
)

from conftest import blobs


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(2.0) == pytest.approx(1.0 / (1.0 + np.exp(-2.0)), abs=1e-15)
    assert sigmoid(2.0) == pytest.approx(0.8807970779778823, abs=1e-15)


@pytest.mark.parametrize("x", [0.1, 3.0, 30.0])
def test_sigmoid_symmetry(x):
    assert abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-12


def test_sigmoid_extremes_do_not_overflow():
    with np.errstate(over="raise"):
        out = sigmoid(np.array([-700.0, -50.0, 50.0, 700.0]))
    assert np.all((out >= 0) & (out <= 1))
    assert out[0] > 0 and out[-1] == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_central_differences(seed):
    rng = np.random.default_rng(seed)
    n, d, K = 30, 5, 3
    X = rng.normal(size=(n, d))
    T = np.eye(K)[rng.integers(0, K, n)]
    W = rng.normal(size=(d, K))
    b = rng.normal(size=K)
    _, gW, gb = logistic_loss_and_grad(W, b, X, T)
    h = 1e-5
    num_W = np.zeros_like(W)
    for i in range(d):
        for k in range(K):
            E = np.zeros_like(W)
            E[i, k] = h
            up = logistic_loss_and_grad(W + E, b, X, T)[0][k]
            down = logistic_loss_and_grad(W - E, b, X, T)[0][k]
            num_W[i, k] = (up - down) / (2 * h)
    num_b = np.zeros(K)
    for k in range(K):
        e = np.zeros(K)
        e[k] = h
        num_b[k] = (
            logistic_loss_and_grad(W, b + e, X, T)[0][k] - logistic_loss_and_grad(W, b - e, X, T)[0][k]
        ) / (2 * h)
    analytic = np.r_[gW.ravel(), gb]
    numeric = np.r_[num_W.ravel(), num_b]
    assert np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric) <= 1e-6


def separable(seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(60, 2))
    X[:, 0] += np.where(np.arange(60) < 30, -3.0, 3.0)
    y = (np.arange(60) >= 30).astype(int)
    return X, y


def test_logistic_separable_toy():
    X, y = separable()
    model = train_logreg_ovr(X, y, l1_lambda=1e-4)
    assert np.mean(model.predict(X) == y) == 1.0


def test_logistic_total_shrinkage_gives_prior():
    X, y = blobs(n_per_class=10, n_classes=3)
    y = np.r_[y, np.full(7, 1)]
    X = np.r_[X, X[:7]]
    model = train_logreg_ovr(X, y, l1_lambda=1e6)
    assert np.all(model.coef_ == 0.0)
    assert np.all(model.predict(X) == 1)


def l1_logistic_oracle(X, t, lam):
    """Split w = u - v with u, v >= 0 and solve the smooth bound-constrained problem."""
    n, d = X.shape

    def f(z):
        u, v, b = z[:d], z[d : 2 * d], z[-1]
        w = u - v
        m = X @ w + b
        loss = np.mean(np.logaddexp(0, m) - t * m)
        g = (1 / (1 + np.exp(-m)) - t) / n
        gw = X.T @ g
        return loss + lam * (u.sum() + v.sum()), np.r_[gw + lam, -gw + lam, g.sum()]

    bounds = [(0, None)] * (2 * d) + [(None, None)]
    res = minimize(f, np.zeros(2 * d + 1), jac=True, method="L-BFGS-B", bounds=bounds,
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 20000})
    return res.fun, res.x[:d] - res.x[d : 2 * d], res.x[-1]


def test_logistic_matches_independent_optimum():
    X, y = blobs(n_per_class=30, n_classes=3, spread=2.5, seed=7)
    lam = 0.01
    model = LogisticRegressionOvR(l1_lambda=lam, max_iter=20000, tol=1e-8).fit(X, y)
    ours = model.objective(X, y)
    for c in range(3):
        ref, w, b = l1_logistic_oracle(X, (y == c).astype(float), lam)
        assert ours[c] <= ref + 1e-7
        np.testing.assert_allclose(model.coef_[c], w, atol=1e-3)
        assert model.intercept_[c] == pytest.approx(b, abs=1e-3)


def test_logistic_first_order_stationarity():
    X, y = blobs(n_per_class=25, n_classes=3, spread=2.0, seed=1)
    lam, tol = 0.005, 1e-6
    model = LogisticRegressionOvR(l1_lambda=lam, max_iter=50000, tol=tol).fit(X, y)
    assert model.n_iter_ < 50000
    T = np.eye(3)[y]
    _, gW, gb = logistic_loss_and_grad(model.coef_.T, model.intercept_, X, T)
    W = model.coef_.T
    assert np.all(np.abs(gb) <= 10 * tol)
    active = W != 0
    assert np.all(np.abs(gW[active] + lam * np.sign(W[active])) <= 10 * tol)
    assert np.all(np.abs(gW[~active]) <= lam + 10 * tol)


def test_l1_zero_count_non_decreasing_in_lambda():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(80, 12))
    y = (X[:, 0] + 0.5 * X[:, 1] - X[:, 2] + 0.3 * rng.normal(size=80) > 0).astype(int)
    y[X[:, 3] > 1.2] = 2
    zeros = []
    for lam in [1e-4, 1e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0]:
        m = LogisticRegressionOvR(l1_lambda=lam, max_iter=20000, tol=1e-9).fit(X, y)
        zeros.append(int(np.sum(m.coef_ == 0.0)))
    assert zeros == sorted(zeros)
    assert zeros[-1] == 36 and zeros[0] < zeros[-1]


def test_negative_lambda_rejected():
    X, y = separable()
    with pytest.raises(ValueError):
        LogisticRegressionOvR(l1_lambda=-1).fit(X, y)


def test_svm_separable_toy():
    X, y = separable(seed=3)
    model = train_linear_svm_ovr(X, y, C=2.0, epochs=40, seed=0)
    assert np.mean(model.predict(X) == y) == 1.0


def test_svm_objective_history_non_increasing():
    X, y = blobs(n_per_class=30, n_classes=3, spread=2.0, seed=3)
    hist = LinearSVMOvR(C=2.0, epochs=30).fit(X, y).objective_history_
    assert len(hist) == 30
    assert np.all(np.diff(hist) <= 1e-6)


def test_svm_reaches_independent_optimum():
    """Same primal (bias as a penalised constant feature) solved by liblinear's dual."""
    X, y = blobs(n_per_class=40, n_classes=3, spread=2.0, seed=2)
    C = 0.5
    ours = LinearSVMOvR(C=C, epochs=300).fit(X, y).objective(X, y)
    Xa = np.c_[X, np.ones(len(X))]
    for c in range(3):
        s = np.where(y == c, 1.0, -1.0)
        ref = LinearSVC(C=C, loss="hinge", dual=True, tol=1e-10, max_iter=500000,
                        intercept_scaling=1.0).fit(X, s)
        V = np.r_[ref.coef_.ravel(), ref.intercept_]
        best = 0.5 * V @ V + C * np.maximum(0, 1 - s * (Xa @ V)).sum()
        assert best <= ours[c] <= 1.02 * best


def test_svm_violations_non_increasing_in_c():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(50, 2))
    y = (X[:, 0] + X[:, 1] + 0.8 * rng.normal(size=50) > 0).astype(int)
    counts = []
    for C in [0.01, 0.1, 1.0, 10.0]:
        m = LinearSVMOvR(C=C, epochs=200).fit(X, y)
        margins = np.where(y == 1, 1.0, -1.0) * (X @ m.coef_[1] + m.intercept_[1])
        counts.append(int(np.sum(margins < 1)))
    assert all(a >= b for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("kwargs", [{"C": 0}, {"C": -1}, {"epochs": 0}])
def test_svm_parameter_validation(kwargs):
    X, y = separable()
    with pytest.raises(ValueError):
        LinearSVMOvR(**kwargs).fit(X, y)


def test_zero_weights_give_uniform_probabilities():
    X, y = blobs(n_per_class=5, n_classes=4)
    model = train_logreg_ovr(X, y, l1_lambda=1e6)
    model.intercept_ = np.zeros(4)
    np.testing.assert_allclose(model.predict_proba(X), 0.25)


def test_raising_a_score_raises_its_probability():
    X, y = blobs(n_per_class=10, n_classes=3, seed=1)
    model = train_logreg_ovr(X, y)
    before = model.predict_proba(X[:5])
    model.intercept_ = model.intercept_ + np.array([0.0, 0.5, 0.0])
    after = model.predict_proba(X[:5])
    assert np.all(after[:, 1] > before[:, 1])


def test_decision_scores_shape_and_mismatch():
    X, y = blobs(n_per_class=10, n_classes=3)
    model = train_linear_svm_ovr(X, y, epochs=3)
    assert decision_scores(model, X).shape == (30, 3)
    with pytest.raises(ValueError):
        decision_scores(model, X[:, :2])


@pytest.mark.parametrize("cls", [LogisticRegressionOvR, LinearSVMOvR])
def test_single_class_rejected(cls):
    with pytest.raises(ValueError):
        cls().fit(np.zeros((4, 2)), np.zeros(4, dtype=int))

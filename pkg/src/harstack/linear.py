"""One-vs-rest linear classifiers: L1 logistic regression and a linear SVM.

Both expose raw per-class scores ``X @ coef_.T + intercept_`` through
``decision_function``; class probabilities are the softmax of those scores.
"""

import numpy as np

from ._core import ProbabilisticClassifier, check_X, rng_stream, softmax


def sigmoid(x):
    """Logistic function ``1 / (1 + exp(-x))`` without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def logistic_loss_and_grad(W, b, X, T):
    """Mean logistic loss of every one-vs-rest column and its gradient.

    ``W`` is ``(d, K)``, ``b`` is ``(K,)`` and ``T`` holds 0/1 targets of shape
    ``(n, K)``. Returns ``(loss per column, dW, db)``; the penalty is not
    included.
    """
    n = X.shape[0]
    Z = X @ W + b
    loss = (_log1pexp(Z) - T * Z).mean(axis=0)
    G = (sigmoid(Z) - T) / n
    return loss, X.T @ G, G.sum(axis=0)


def soft_threshold(W, t):
    return np.sign(W) * np.maximum(np.abs(W) - t, 0.0)


class _LinearOvR(ProbabilisticClassifier):
    kind = None

    def decision_function(self, X):
        X = self._validate_predict_input(X)
        return X @ self.coef_.T + self.intercept_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))


class LogisticRegressionOvR(_LinearOvR):
    """One-vs-rest logistic regression with an L1 penalty on the weights.

    For every class ``c`` minimises
    ``mean(log(1 + exp(-s * (w.x + b)))) + l1_lambda * ||w||_1`` with
    ``s = +1`` for class ``c`` and ``-1`` otherwise; the intercept is not
    penalised. Solved by accelerated proximal gradient with the fixed step
    ``1/L`` (``L = ||[X, 1]||_2^2 / 4n``) and gradient-based momentum
    restarts. Stops once every entry of the proximal gradient mapping is
    below ``tol``.
    """

    kind = "logistic"

    def __init__(self, l1_lambda=1e-4, max_iter=3000, tol=1e-5):
        self.l1_lambda = l1_lambda
        self.max_iter = max_iter
        self.tol = tol

    def _fit(self, X, y):
        if self.l1_lambda < 0:
            raise ValueError("l1_lambda must be >= 0")
        n, d = X.shape
        K = self.n_classes_
        T = np.eye(K)[y]
        sigma = np.linalg.norm(np.hstack([X, np.ones((n, 1))]), 2)
        step = 4.0 * n / sigma**2
        lam = self.l1_lambda

        W = np.zeros((d, K))
        b = np.zeros(K)
        VW, vb = W.copy(), b.copy()
        momentum = 1.0
        self.n_iter_ = self.max_iter
        for it in range(self.max_iter):
            _, gW, gb = logistic_loss_and_grad(VW, vb, X, T)
            W_new = soft_threshold(VW - step * gW, step * lam)
            b_new = vb - step * gb
            gap = max(np.abs(VW - W_new).max(), np.abs(vb - b_new).max()) / step
            if gap <= self.tol:
                W, b = W_new, b_new
                self.n_iter_ = it + 1
                break
            # restart when the step and the momentum direction disagree
            if np.sum((VW - W_new) * (W_new - W)) + np.sum((vb - b_new) * (b_new - b)) > 0:
                momentum = 1.0
            m_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum**2))
            beta = (momentum - 1.0) / m_new
            VW = W_new + beta * (W_new - W)
            vb = b_new + beta * (b_new - b)
            W, b, momentum = W_new, b_new, m_new
        self.coef_ = W.T.copy()
        self.intercept_ = b

    def objective(self, X, y):
        """Penalised loss of every one-vs-rest problem at the fitted weights."""
        X = check_X(X, self.n_features_in_)
        T = np.eye(self.n_classes_)[np.asarray(y)]
        loss, _, _ = logistic_loss_and_grad(self.coef_.T, self.intercept_, X, T)
        return loss + self.l1_lambda * np.abs(self.coef_).sum(axis=1)


class LinearSVMOvR(_LinearOvR):
    """One-vs-rest soft-margin linear SVM trained by stochastic subgradient descent.

    For every class minimises ``0.5 * ||w||^2 + C * sum(hinge(1 - s * (w.x + b)))``.
    The bias is carried as an extra weight on a constant input column (and
    therefore shares the small ``0.5 * ||.||^2`` penalty). Updates follow the
    Pegasos schedule ``eta_t = 1 / (lam * t)`` with ``lam = 1 / (C * n)``
    over seeded per-epoch shuffles; the candidate at the end of each epoch is
    the average of that epoch's iterates. A candidate replaces the current
    solution only if it lowers the objective, so ``objective_history_`` is
    non-increasing and the returned weights are the best epoch-end solution.
    """

    kind = "svm"

    def __init__(self, C=2.0, epochs=40, random_state=0):
        self.C = C
        self.epochs = epochs
        self.random_state = random_state

    def _fit(self, X, y):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        n, d = X.shape
        K = self.n_classes_
        Xa = np.hstack([X, np.ones((n, 1))])
        S = np.where(np.eye(K, dtype=bool)[y], 1.0, -1.0)  # (n, K) signs
        lam = 1.0 / (self.C * n)
        radius = 1.0 / np.sqrt(lam)

        V = np.zeros((K, d + 1))
        best = V.copy()
        best_obj = _svm_objective(best, Xa, S, self.C)
        history = []
        t = 0
        for epoch in range(self.epochs):
            order = rng_stream(self.random_state, "svm-epoch", epoch).permutation(n)
            acc = np.zeros_like(V)
            for i in order:
                t += 1
                eta = 1.0 / (lam * t)
                x = Xa[i]
                s = S[i]
                viol = s * (V @ x) < 1.0
                V *= 1.0 - eta * lam
                if viol.any():
                    V[viol] += eta * np.outer(s[viol], x)
                norm = np.sqrt((V * V).sum(axis=1))
                over = norm > radius
                if over.any():
                    V[over] *= (radius / norm[over])[:, None]
                acc += V
            candidate = acc / n
            obj = _svm_objective(candidate, Xa, S, self.C)
            improved = obj < best_obj
            best = np.where(improved[:, None], candidate, best)
            best_obj = np.where(improved, obj, best_obj)
            history.append(best_obj.sum())
        self.objective_history_ = np.asarray(history)
        self.coef_ = best[:, :d].copy()
        self.intercept_ = best[:, d].copy()

    def objective(self, X, y):
        X = check_X(X, self.n_features_in_)
        Xa = np.hstack([X, np.ones((X.shape[0], 1))])
        S = np.where(np.eye(self.n_classes_, dtype=bool)[np.asarray(y)], 1.0, -1.0)
        V = np.hstack([self.coef_, self.intercept_[:, None]])
        return _svm_objective(V, Xa, S, self.C)


def _svm_objective(V, Xa, S, C):
    margins = S * (Xa @ V.T)
    return 0.5 * (V * V).sum(axis=1) + C * np.maximum(0.0, 1.0 - margins).sum(axis=0)


def train_logreg_ovr(X, y, l1_lambda=1e-4, max_iters=3000, tol=1e-5):
    return LogisticRegressionOvR(l1_lambda=l1_lambda, max_iter=max_iters, tol=tol).fit(X, y)


def train_linear_svm_ovr(X, y, C=2.0, epochs=40, seed=0):
    return LinearSVMOvR(C=C, epochs=epochs, random_state=seed).fit(X, y)


def decision_scores(model, X):
    return model.decision_function(X)

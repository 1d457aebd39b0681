"""Feed-forward network with softmax output, trained by minibatch Adam."""

from __future__ import annotations

import numpy as np

from .base import TrainedLabeler, one_hot, softmax

_EPS = 1e-8


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0).astype(np.float64)


def _tanh_grad(z, a):
    return 1.0 - a * a


def _logistic(z):
    return 1.0 / (1.0 + np.exp(-z))


def _logistic_grad(z, a):
    return a * (1.0 - a)


def _identity(z):
    return z


def _identity_grad(z, a):
    return np.ones_like(z)


# named module-level functions keep trained models picklable
_ACTIVATIONS = {
    "relu": (_relu, _relu_grad),
    "tanh": (np.tanh, _tanh_grad),
    "logistic": (_logistic, _logistic_grad),
    "identity": (_identity, _identity_grad),
}


class MLPClassifier(TrainedLabeler):
    def __init__(self, spec, input_dim, num_classes, hidden, activation):
        super().__init__(spec, input_dim, num_classes)
        self.hidden = tuple(int(w) for w in hidden)
        if activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.activation = activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []

    @property
    def _act(self):
        return _ACTIVATIONS[self.activation][0]

    @property
    def _act_grad(self):
        return _ACTIVATIONS[self.activation][1]

    def init_params(self, rng: np.random.Generator) -> None:
        sizes = [self.input_dim, *self.hidden, self.num_classes]
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / (fan_in + fan_out))
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def _forward(self, X: np.ndarray):
        acts = [X]
        pre = []
        h = X
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ W + b
            pre.append(z)
            h = z if i == last else self._act(z)
            acts.append(h)
        return pre, acts

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        _, acts = self._forward(X)
        return softmax(acts[-1])

    def loss_and_grads(self, X: np.ndarray, Y: np.ndarray):
        """Mean cross-entropy and its gradients w.r.t. all weights/biases.

        Y is one-hot. Exposed so gradients can be checked against finite
        differences.
        """
        n = len(X)
        pre, acts = self._forward(X)
        probs = softmax(acts[-1])
        loss = float(-np.sum(Y * np.log(np.clip(probs, 1e-300, None))) / n)

        grads_w = [np.zeros_like(W) for W in self.weights]
        grads_b = [np.zeros_like(b) for b in self.biases]
        delta = (probs - Y) / n
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = acts[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * self._act_grad(pre[i - 1], acts[i])
        return loss, grads_w, grads_b

    def fit(self, X, y, learning_rate, epochs, batch_size, rng: np.random.Generator):
        self.init_params(rng)
        Y = one_hot(y, self.num_classes)
        n = len(X)
        batch = min(int(batch_size), n) if batch_size else n

        m_w = [np.zeros_like(W) for W in self.weights]
        v_w = [np.zeros_like(W) for W in self.weights]
        m_b = [np.zeros_like(b) for b in self.biases]
        v_b = [np.zeros_like(b) for b in self.biases]
        beta1, beta2 = 0.9, 0.999
        step = 0
        for _ in range(int(epochs)):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                idx = order[start : start + batch]
                _, gw, gb = self.loss_and_grads(X[idx], Y[idx])
                step += 1
                corr1 = 1.0 - beta1**step
                corr2 = 1.0 - beta2**step
                for i in range(len(self.weights)):
                    m_w[i] = beta1 * m_w[i] + (1 - beta1) * gw[i]
                    v_w[i] = beta2 * v_w[i] + (1 - beta2) * gw[i] ** 2
                    self.weights[i] -= learning_rate * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + _EPS)
                    m_b[i] = beta1 * m_b[i] + (1 - beta1) * gb[i]
                    v_b[i] = beta2 * v_b[i] + (1 - beta2) * gb[i] ** 2
                    self.biases[i] -= learning_rate * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + _EPS)
        return self

    # -- persistence -------------------------------------------------------

    def params_to_dict(self) -> dict:
        return {
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    def params_from_dict(self, data: dict) -> None:
        self.weights = [np.asarray(W, dtype=np.float64) for W in data["weights"]]
        self.biases = [np.asarray(b, dtype=np.float64) for b in data["biases"]]

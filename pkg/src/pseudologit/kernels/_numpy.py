"""Pure-numpy implementations of the hot kernels."""

import numpy as np


def logistic_logpdf_std(z):
    a = np.abs(z)
    return -a - 2.0 * np.log1p(np.exp(-a))


def _logpdf_and_half_tanh(z):
    a = np.abs(z)
    m = np.expm1(-a)
    d = 2.0 + m
    return -a - 2.0 * np.log(d), np.copysign(-m / d, z)


def loglik(xs, ys, mu, s0, a, b, s1):
    zx = (xs - mu) / s0
    zy = (ys - a - b * xs) / s1
    n = xs.shape[0]
    return float(
        np.sum(logistic_logpdf_std(zx)) + np.sum(logistic_logpdf_std(zy))
        - n * (np.log(s0) + np.log(s1))
    )


def loglik_grad(xs, ys, mu, s0, a, b, s1):
    zx = (xs - mu) / s0
    zy = (ys - a - b * xs) / s1
    n = xs.shape[0]
    # 2F(z) - 1 == tanh(z/2), formed from the same expm1 as the log-density
    lx, tx = _logpdf_and_half_tanh(zx)
    ly, ty = _logpdf_and_half_tanh(zy)
    ll = float(np.sum(lx) + np.sum(ly) - n * (np.log(s0) + np.log(s1)))
    grad = np.empty(5)
    grad[0] = np.sum(tx) / s0
    grad[1] = (np.sum(zx * tx) - n) / s0
    grad[2] = np.sum(ty) / s1
    grad[3] = np.sum(xs * ty) / s1
    grad[4] = (np.sum(zy * ty) - n) / s1
    return ll, grad


def pairs_from_uniforms(u, mu, s0, a, b, s1):
    ux = u[0::2]
    uy = u[1::2]
    xs = mu + s0 * (np.log(ux) - np.log1p(-ux))
    ys = a + b * xs + s1 * (np.log(uy) - np.log1p(-uy))
    return xs, ys

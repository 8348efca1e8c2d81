"""Numba-compiled versions of the hot kernels.

Signatures and return values match :mod:`pseudologit.kernels._numpy`
exactly; the loops fuse the log-density and gradient sums so each
likelihood evaluation touches the data once.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _logpdf_std(z):
    a = abs(z)
    return -a - 2.0 * math.log1p(math.exp(-a))


@njit(cache=True, nogil=True)
def _logpdf_and_half_tanh(z):
    # one expm1 serves both terms: with m = expm1(-|z|),
    # log f(z) = -|z| - 2 log(2 + m) and tanh(z/2) = sign(z) * (-m) / (2 + m)
    a = abs(z)
    m = math.expm1(-a)
    d = 2.0 + m
    t = -m / d
    return -a - 2.0 * math.log(d), (t if z >= 0.0 else -t)


@njit(cache=True, nogil=True)
def logistic_logpdf_std(z):
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        out[i] = _logpdf_std(z[i])
    return out


@njit(cache=True, nogil=True)
def loglik(xs, ys, mu, s0, a, b, s1):
    n = xs.shape[0]
    acc = 0.0
    for i in range(n):
        zx = (xs[i] - mu) / s0
        zy = (ys[i] - a - b * xs[i]) / s1
        acc += _logpdf_std(zx) + _logpdf_std(zy)
    return acc - n * (math.log(s0) + math.log(s1))


@njit(cache=True, nogil=True)
def loglik_grad(xs, ys, mu, s0, a, b, s1):
    n = xs.shape[0]
    acc = 0.0
    g_mu = 0.0
    g_s0 = 0.0
    g_a = 0.0
    g_b = 0.0
    g_s1 = 0.0
    r0 = 1.0 / s0
    r1 = 1.0 / s1
    for i in range(n):
        x = xs[i]
        zx = (x - mu) * r0
        zy = (ys[i] - a - b * x) * r1
        lx, tx = _logpdf_and_half_tanh(zx)
        ly, ty = _logpdf_and_half_tanh(zy)
        acc += lx + ly
        g_mu += tx
        g_s0 += zx * tx
        g_a += ty
        g_b += x * ty
        g_s1 += zy * ty
    grad = np.empty(5)
    grad[0] = g_mu / s0
    grad[1] = (g_s0 - n) / s0
    grad[2] = g_a / s1
    grad[3] = g_b / s1
    grad[4] = (g_s1 - n) / s1
    return acc - n * (math.log(s0) + math.log(s1)), grad


@njit(cache=True, nogil=True)
def pairs_from_uniforms(u, mu, s0, a, b, s1):
    n = u.shape[0] // 2
    xs = np.empty(n)
    ys = np.empty(n)
    for i in range(n):
        ux = u[2 * i]
        uy = u[2 * i + 1]
        x = mu + s0 * (math.log(ux) - math.log1p(-ux))
        xs[i] = x
        ys[i] = a + b * x + s1 * (math.log(uy) - math.log1p(-uy))
    return xs, ys

"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The public names (``hilbert``, ``resolvent_sq``, ``phase_sums``) dispatch on
:data:`zenolab._accel.USE_NUMBA`.  Both flavours are importable directly as
``*_numba`` / ``*_numpy`` so they can be cross-checked and benchmarked.

All kernels integrate against the squared form factor

    g(w) = sigma^2 mu^4 w / ((w - w0)^2 + mu^2)^2

on [0, wmax], using composite Gauss-Legendre panels whose edges are supplied
by the caller.  Per evaluation point the panel containing the singular point is
split there, and the first panel is graded geometrically towards 0 when the
point sits just below threshold.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit, prange

GL_ORDER = 16
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@njit(cache=True)
def _g(w, sigma, mu, w0):
    d = (w - w0) * (w - w0) + mu * mu
    return sigma * sigma * mu ** 4 * w / (d * d)


def g_numpy(w, sigma, mu, w0):
    w = np.asarray(w, dtype=float)
    d = (w - w0) ** 2 + mu * mu
    return sigma * sigma * mu ** 4 * w / (d * d)


@njit(cache=True)
def _local_edges(lam, edges, wmax):
    """Base edges plus a break at ``lam`` (inside) or grading towards 0 (just below)."""
    n = edges.shape[0]
    extra = np.empty(64)
    m = 0
    if 0.0 < lam < wmax:
        extra[0] = lam
        m = 1
    elif lam < 0.0:
        eps = -lam
        first = edges[1]
        b = eps
        while b < first and m < 60:
            extra[m] = b
            m += 1
            b *= 4.0
    out = np.empty(n + m)
    out[:n] = edges
    out[n:] = extra[:m]
    out = np.unique(out)
    return out


@njit(cache=True)
def _hilbert_one(lam, edges, xg, wg, sigma, mu, w0, wmax):
    inside = 0.0 < lam < wmax
    c = _g(lam, sigma, mu, w0) if inside else 0.0
    loc = _local_edges(lam, edges, wmax)
    acc = 0.0
    for p in range(loc.shape[0] - 1):
        a = loc[p]
        b = loc[p + 1]
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        s = 0.0
        for k in range(xg.shape[0]):
            x = mid + half * xg[k]
            s += wg[k] * (_g(x, sigma, mu, w0) - c) / (lam - x)
        acc += half * s
    if inside:
        acc += c * math.log(lam / (wmax - lam))
    return acc


@njit(cache=True)
def hilbert_numba(lams, edges, xg, wg, sigma, mu, w0, wmax):
    out = np.empty(lams.shape[0])
    for i in range(lams.shape[0]):
        out[i] = _hilbert_one(lams[i], edges, xg, wg, sigma, mu, w0, wmax)
    return out


@njit(cache=True)
def resolvent_sq_numba(lams, edges, xg, wg, sigma, mu, w0, wmax):
    out = np.empty(lams.shape[0])
    for i in range(lams.shape[0]):
        lam = lams[i]
        loc = _local_edges(lam, edges, wmax)
        acc = 0.0
        for p in range(loc.shape[0] - 1):
            a = loc[p]
            b = loc[p + 1]
            half = 0.5 * (b - a)
            mid = 0.5 * (b + a)
            s = 0.0
            for k in range(xg.shape[0]):
                x = mid + half * xg[k]
                d = lam - x
                s += wg[k] * _g(x, sigma, mu, w0) / (d * d)
            acc += half * s
        out[i] = acc
    return out


def _local_edges_numpy(lam, edges, wmax):
    if 0.0 < lam < wmax:
        return np.unique(np.append(edges, lam))
    if lam < 0.0 and -lam < edges[1]:
        ratio = edges[1] / -lam
        k = min(int(math.ceil(math.log(ratio, 4.0))), 60)
        grading = -lam * 4.0 ** np.arange(k)
        return np.unique(np.concatenate([edges, grading[grading < edges[1]]]))
    return edges


def _nodes(loc, xg, wg):
    a, b = loc[:-1, None], loc[1:, None]
    half = 0.5 * (b - a)
    return (0.5 * (a + b) + half * xg).ravel(), (half * wg).ravel()


def hilbert_numpy(lams, edges, xg, wg, sigma, mu, w0, wmax):
    out = np.empty(len(lams))
    for i, lam in enumerate(lams):
        x, w = _nodes(_local_edges_numpy(lam, edges, wmax), xg, wg)
        inside = 0.0 < lam < wmax
        c = g_numpy(lam, sigma, mu, w0) if inside else 0.0
        acc = np.dot(w, (g_numpy(x, sigma, mu, w0) - c) / (lam - x))
        if inside:
            acc += c * math.log(lam / (wmax - lam))
        out[i] = acc
    return out


def resolvent_sq_numpy(lams, edges, xg, wg, sigma, mu, w0, wmax):
    out = np.empty(len(lams))
    for i, lam in enumerate(lams):
        x, w = _nodes(_local_edges_numpy(lam, edges, wmax), xg, wg)
        out[i] = np.dot(w, g_numpy(x, sigma, mu, w0) / (lam - x) ** 2)
    return out


@njit(cache=True, parallel=True)
def phase_sums_numba(times, offsets, coeffs):
    """Return (sum c cos(d t), -sum c sin(d t), sum c 2 sin^2(d t / 2)) per time."""
    nt = times.shape[0]
    re = np.empty(nt)
    im = np.empty(nt)
    gap = np.empty(nt)
    for j in prange(nt):
        t = times[j]
        sr = 0.0
        si = 0.0
        sg = 0.0
        for k in range(offsets.shape[0]):
            ph = offsets[k] * t
            c = coeffs[k]
            sr += c * math.cos(ph)
            si -= c * math.sin(ph)
            h = math.sin(0.5 * ph)
            sg += 2.0 * c * h * h
        re[j] = sr
        im[j] = si
        gap[j] = sg
    return re, im, gap


def phase_sums_numpy(times, offsets, coeffs, chunk=128):
    times = np.asarray(times, dtype=float)
    re = np.empty(len(times))
    im = np.empty(len(times))
    gap = np.empty(len(times))
    for s in range(0, len(times), chunk):
        ph = np.outer(times[s:s + chunk], offsets)
        re[s:s + chunk] = np.cos(ph) @ coeffs
        im[s:s + chunk] = -(np.sin(ph) @ coeffs)
        gap[s:s + chunk] = (2.0 * np.sin(0.5 * ph) ** 2) @ coeffs
    return re, im, gap


if USE_NUMBA:
    hilbert = hilbert_numba
    resolvent_sq = resolvent_sq_numba
    phase_sums = phase_sums_numba
else:
    hilbert = hilbert_numpy
    resolvent_sq = resolvent_sq_numpy
    phase_sums = phase_sums_numpy

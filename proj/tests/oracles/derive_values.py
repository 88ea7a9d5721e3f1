#!/usr/bin/env python3
"""Independent reference values frozen into the C++ unit tests.

Run: python3 tests/oracles/derive_values.py
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def raised_cosine(t, beta, ts):
    def p(u):
        return mp.sinc(mp.pi * u) * mp.cos(mp.pi * beta * u) / (1 - (2 * beta * u) ** 2)

    x = mp.mpf(t) / ts
    if abs(abs(x) - 1 / (2 * mp.mpf(beta))) < mp.mpf("1e-25"):
        return mp.limit(p, x)
    return p(x)


def mdl(ev, t):
    ev = np.asarray(ev, dtype=float)
    n = len(ev)
    scores = []
    for m in range(n):
        tail = ev[m:]
        g = np.exp(np.mean(np.log(tail)))
        a = np.mean(tail)
        scores.append(-t * (n - m) * np.log(g / a) + 0.5 * m * (2 * n - m) * np.log(t))
    return int(np.argmin(scores))


def gaussian_envelope(d, delta, theta, sigma):
    x = d * 2 * mp.pi * delta * mp.cos(theta) * sigma
    return mp.e ** (-x * x)


def snr_db(power_dbm, fc, bw, d, nf=1, n=3):
    fspl = 20 * mp.log10(4 * mp.pi * fc / 299792458) + 10 * n * mp.log10(d)
    noise = -174 + 10 * mp.log10(bw) + nf
    return power_dbm - fspl - noise


def main():
    print("raised_cosine(0.5, 1, 1) =", mp.nstr(raised_cosine(0.5, 1, 1), 17))
    print("gaussian envelope d=1 sigma=0.05 =", mp.nstr(gaussian_envelope(1, 0.5, 0, 0.05), 17))
    print("mdl [100,90,1x6] T=1000 =", mdl([100, 90] + [1] * 6, 1000))
    print("mdl [50,1x7] T=500 =", mdl([50] + [1] * 7, 500))
    print("mdl [3x8] T=100 =", mdl([3] * 8, 100))
    print("log 9 =", mp.nstr(mp.log(9), 17))

    print("mmwave snr 90 m =", mp.nstr(snr_db(43, 28e9, 850e6, 90), 17))
    sub6_p = 30 + 10 * mp.log10(mp.mpf(150e6) / 25e6)
    print("sub6 snr 90 m =", mp.nstr(snr_db(sub6_p, 3.5e9, 150e6, 90), 17))
    print("log2(1 + 2.5 * 0.64) =", mp.nstr(mp.log(1 + mp.mpf("2.5") * mp.mpf("0.64"), 2), 17))

    # Rate-one SNR-loss construction: dR = c (v u^H + u v^H), v orthogonal
    # to u. The perturbed top eigenvector has |u^H u_hat|^2 = cos^2 of the
    # rotation angle; gamma is its inverse on each side.
    n, s2, ratio = 64, 1.0, 0.25
    lam = n * s2
    c = ratio * n * s2
    block = mp.matrix([[lam, c], [c, 0]])
    vals, vecs = mp.eighe(block)
    top = vecs[:, 1] if vals[1] > vals[0] else vecs[:, 0]
    cos2 = top[0] ** 2 / (top[0] ** 2 + top[1] ** 2)
    side = 1 / cos2
    print("gamma exact (two sides) =", mp.nstr(side * side, 17))
    print("gamma approx (two sides) =", mp.nstr((1 + c * c / (n * n * s2 * s2)) ** 2, 17))


if __name__ == "__main__":
    main()

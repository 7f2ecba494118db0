"""Independent reference computations used to freeze expected values.

None of these share code with the package: high-precision mpmath evaluation
of each defining formula, exact rational binomial sums, and a rejection
sampler plus quadrature for the truncated Gaussian.
"""

from fractions import Fraction
from math import comb

import mpmath
import numpy as np

mpmath.mp.dps = 40


def mp_arcmin(x):
    return mpmath.radians(mpmath.mpf(x) / 60)


def mp_tan_length(z, angle_rad):
    return mpmath.mpf(z) * mpmath.tan(angle_rad)


def exact_binomial_tail(n, k, p=Fraction(1, 2)):
    p = Fraction(p)
    return sum(comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(k, n + 1))


def truncnorm_logpdf(x, mu, sigma):
    return -0.5 * ((x - mu) / sigma) ** 2


def rejection_sample(mu, sigma, lower, upper, size, seed):
    """Uniform-proposal rejection sampling from the truncated density.

    Works for any placement of the Gaussian because only density ratios
    within the window are needed.
    """
    rng = np.random.default_rng(seed)
    peak = min(max(mu, lower), upper)
    log_max = truncnorm_logpdf(peak, mu, sigma)
    out = []
    have = 0
    while have < size:
        x = rng.uniform(lower, upper, size=2 * size)
        keep = x[np.log(rng.random(2 * size)) < truncnorm_logpdf(x, mu, sigma) - log_max]
        out.append(keep)
        have += keep.size
    return np.concatenate(out)[:size]


def quad_sf(x, mu, sigma, lower, upper):
    """P(X > x) by adaptive quadrature of the unnormalized density."""
    mu, sigma = mpmath.mpf(mu), mpmath.mpf(sigma)
    f = lambda t: mpmath.exp(-((t - mu) / sigma) ** 2 / 2)
    total = mpmath.quad(f, [lower, upper])
    x = min(max(x, lower), upper)
    return float(mpmath.quad(f, [x, upper]) / total)

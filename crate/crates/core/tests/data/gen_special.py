"""Regenerate the special-function fixtures with mpmath (50 digits)."""
import csv
import random

import mpmath as mp

mp.mp.dps = 80
rng = random.Random(20240917)


def gamma_cf(a, x):
    """Continued fraction for Q(a, x), valid for x > a."""
    tiny = mp.mpf("1e-200")
    b = x + 1 - a
    c, d = 1 / tiny, 1 / b
    h = d
    i = 1
    while True:
        an = -i * (i - a)
        b += 2
        d = an * d + b
        d = 1 / (d if abs(d) > tiny else tiny)
        c = b + an / c
        c = c if abs(c) > tiny else tiny
        delta = c * d
        h *= delta
        if abs(delta - 1) < mp.mpf("1e-70"):
            break
        i += 1
    return mp.exp(a * mp.log(x) - x - mp.loggamma(a)) * h


def upper_gamma(a, x):
    try:
        return mp.gammainc(a, x, mp.inf, regularized=True)
    except mp.libmp.NoConvergence:
        a, x = mp.mpf(a), mp.mpf(x)
        if x > a:
            return gamma_cf(a, x)
        lower = mp.exp(a * mp.log(x) - x - mp.loggamma(a + 1)) * mp.hyp1f1(1, a + 1, x, maxterms=10**7)
        return 1 - lower


def beta_cf(x, a, b):
    """Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2)."""
    tiny = mp.mpf("1e-200")
    c, d = mp.mpf(1), 1 - (a + b) * x / (a + 1)
    d = 1 / (d if abs(d) > tiny else tiny)
    h = d
    m = 1
    while True:
        m2 = 2 * m
        for num in (m * (b - m) * x / ((a + m2 - 1) * (a + m2)),
                    -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1))):
            d = 1 + num * d
            d = 1 / (d if abs(d) > tiny else tiny)
            c = 1 + num / c
            c = c if abs(c) > tiny else tiny
            delta = c * d
            h *= delta
        if abs(delta - 1) < mp.mpf("1e-70"):
            break
        m += 1
    pre = mp.exp(a * mp.log(x) + b * mp.log1p(-x) - mp.log(a) - mp.log(mp.beta(a, b)))
    return pre * h


def inc_beta(x, a, b):
    a, b = mp.mpf(a), mp.mpf(b)
    if x > (a + 1) / (a + b + 2):
        return 1 - beta_cf(1 - x, b, a)
    return beta_cf(x, a, b)


def gamma_points(count):
    out = []
    while len(out) < count:
        a = 10 ** rng.uniform(-1, 5)
        if rng.random() < 0.5:
            x = a * 10 ** rng.uniform(-2, 1)
        else:
            x = max(0.0, a + a ** 0.5 * rng.uniform(-8, 8))
        q = upper_gamma(a, x)
        if q < mp.mpf("1e-290"):
            continue
        out.append((a, x, float(q)))
    return out


def beta_points(count):
    out = []
    while len(out) < count:
        a = 10 ** rng.uniform(-1, 6)
        b = 0.5 if rng.random() < 1 / 3 else 10 ** rng.uniform(-1, 3)
        if rng.random() < 0.5:
            x = rng.random()
        else:
            mean = a / (a + b)
            sd = (a * b / ((a + b) ** 2 * (a + b + 1))) ** 0.5
            x = mean + sd * rng.uniform(-6, 6)
        if not 0.0 < x < 1.0:
            continue
        v = inc_beta(mp.mpf(x), a, b)
        if v < mp.mpf("1e-290"):
            continue
        out.append((x, a, b, float(v)))
    return out


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) for v in r])


write("upper_gamma.csv", ["a", "x", "q"], gamma_points(1000))
write("inc_beta.csv", ["x", "a", "b", "i"], beta_points(1000))

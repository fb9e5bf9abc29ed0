"""Pure-Python kernel for exact rational and breakpoint-table arithmetic.

Rationals are reduced int pairs ``(n, d)`` with ``d > 0``.  Breakpoint
tables are lists of quads ``(xn, xd, yn, yd)`` with strictly increasing
x.  Everything here is hot-path code shared with the compiled twin in
``core_cy.pyx``; keep the two implementations in sync.
"""

from math import gcd


def q(n, d=1):
    """Reduced rational pair with positive denominator."""
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def qadd(a, b):
    an, ad = a
    bn, bd = b
    n = an * bd + bn * ad
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def qsub(a, b):
    an, ad = a
    bn, bd = b
    n = an * bd - bn * ad
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def qmul(a, b):
    an, ad = a
    bn, bd = b
    n = an * bn
    d = ad * bd
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def qdiv(a, b):
    an, ad = a
    bn, bd = b
    if bn == 0:
        raise ZeroDivisionError("rational division by zero")
    n = an * bd
    d = ad * bn
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def qneg(a):
    return -a[0], a[1]


def qcmp(a, b):
    """Sign of a - b."""
    v = a[0] * b[1] - b[0] * a[1]
    return (v > 0) - (v < 0)


def qfloor(a):
    return a[0] // a[1]


def qceil(a):
    return -((-a[0]) // a[1])


def qshift(a, k):
    """a + integer k."""
    return a[0] + k * a[1], a[1]


def tbl_slope(bps, i):
    """Slope of segment i of a table as a rational pair."""
    x0n, x0d, y0n, y0d = bps[i]
    x1n, x1d, y1n, y1d = bps[i + 1]
    n = (y1n * y0d - y0n * y1d) * x0d * x1d
    d = (x1n * x0d - x0n * x1d) * y0d * y1d
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def tbl_find_segment(bps, t):
    """Index i with x_i <= t <= x_{i+1}; t must lie in the table hull."""
    lo = 0
    hi = len(bps) - 2
    tn, td = t
    while lo < hi:
        mid = (lo + hi + 1) // 2
        xn, xd = bps[mid][0], bps[mid][1]
        if xn * td - tn * xd <= 0:
            lo = mid
        else:
            hi = mid - 1
    return lo


def tbl_eval(bps, t):
    """Exact value of the PL interpolant at t inside the table hull."""
    tn, td = t
    first = bps[0]
    if tn * first[1] - first[0] * td < 0:
        raise ValueError("evaluation left of table hull")
    last = bps[-1]
    if tn * last[1] - last[0] * td > 0:
        raise ValueError("evaluation right of table hull")
    if len(bps) == 1:
        return first[2], first[3]
    i = tbl_find_segment(bps, t)
    x0n, x0d, y0n, y0d = bps[i]
    if tn * x0d == x0n * td:
        return y0n, y0d
    x1n, x1d, y1n, y1d = bps[i + 1]
    if tn * x1d == x1n * td:
        return y1n, y1d
    # y0 + (t - x0) * (y1 - y0) / (x1 - x0)
    dxn = x1n * x0d - x0n * x1d
    dxd = x1d * x0d
    dyn = y1n * y0d - y0n * y1d
    dyd = y1d * y0d
    tn0 = tn * x0d - x0n * td
    td0 = td * x0d
    # value = y0 + (tn0/td0) * (dyn/dyd) / (dxn/dxd)
    num = y0n * td0 * dyd * dxn + y0d * tn0 * dyn * dxd
    den = y0d * td0 * dyd * dxn
    if den < 0:
        num, den = -num, -den
    g = gcd(num, den)
    if g > 1:
        num //= g
        den //= g
    return num, den


def collinear(a, b, c):
    # (yb - ya) * (xc - xb) == (yc - yb) * (xb - xa), coordinates rational
    d1 = qmul(qsub((b[2], b[3]), (a[2], a[3])), qsub((c[0], c[1]), (b[0], b[1])))
    d2 = qmul(qsub((c[2], c[3]), (b[2], b[3])), qsub((b[0], b[1]), (a[0], a[1])))
    return d1 == d2


def tbl_collapse(bps):
    """Drop interior points where adjacent segments are collinear."""
    if len(bps) <= 2:
        return list(bps)
    out = [bps[0]]
    for i in range(1, len(bps) - 1):
        if collinear(out[-1], bps[i], bps[i + 1]):
            continue
        out.append(bps[i])
    out.append(bps[-1])
    return out


def tbl_compose_grid(f_bps, g_bps, xs):
    """Values of f(g(x)) at each x in xs (all inside the hulls)."""
    out = []
    for x in xs:
        gx = tbl_eval(g_bps, x)
        out.append(tbl_eval(f_bps, gx))
    return out

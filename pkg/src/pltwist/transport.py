"""Moving prescribed rationals to prescribed rationals inside F.

The existence test is the arithmetic condition n = q and p = 2^R m
(mod n) on the odd parts; the constructions realize each pair by a
power-of-two slope segment through the point (its intercept is dyadic
exactly when the condition holds) and join segments by dyadic
connectors, so every output is verified exactly before returning.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import FixedBasePoint, PreconditionViolated, UnsortedInput
from .exact import Rat, decompose_odd, is_dyadic, mult_order_2, two_power_residue
from .plmap import PLMap, TailLaw, classify, fixed_set


def transport_exists(alpha: Rat, beta: Rat) -> bool:
    """Is there g in F (equivalently PL2, EP2) with g(alpha) = beta?"""
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if alpha == beta:
        return True
    t, m, n = decompose_odd(alpha)
    k, p, q = decompose_odd(beta)
    if alpha == 0 or beta == 0:
        # zero transports exactly to dyadics
        return n == 1 and q == 1
    if n != q:
        return False
    return two_power_residue(m, p, n) is not None


def dyadic_between(a: Rat, b: Rat) -> Fraction:
    """A dyadic rational in the open interval (a, b), smallest 2-power
    denominator first."""
    a = Fraction(a)
    b = Fraction(b)
    if not a < b:
        raise ValueError("empty interval")
    k = 0
    while True:
        scale = 1 << k
        j = (a.numerator * scale) // a.denominator + 1
        if Fraction(j, scale) == a:
            j += 1
        if Fraction(j, scale) < b:
            return Fraction(j, scale)
        k += 1


def floor_log2(x: Rat) -> int:
    """Largest e with 2^e <= x, for x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    n, d = x.numerator, x.denominator
    e = n.bit_length() - d.bit_length()
    # candidate may be off by one either way
    while not (d << e if e >= 0 else d) <= (n if e >= 0 else n << -e):
        e -= 1
    while (d << (e + 1) if e + 1 >= 0 else d) <= (n if e + 1 >= 0 else n << -(e + 1)):
        e += 1
    return e


def dyadic_interval_map(c: Rat, c2: Rat, v: Rat, v2: Rat) -> List[Tuple[Fraction, Fraction]]:
    """Breakpoints of a PL2 homeomorphism [c, c2] -> [v, v2].

    All four endpoints must be dyadic; at most one interior breakpoint
    is needed (two slopes 2^a, 2^{a+1}).
    """
    c, c2, v, v2 = map(Fraction, (c, c2, v, v2))
    if not (c < c2 and v < v2):
        raise ValueError("need increasing dyadic data")
    for z in (c, c2, v, v2):
        if not is_dyadic(z):
            raise ValueError("dyadic_interval_map needs dyadic endpoints")
    W = c2 - c
    V = v2 - v
    ratio = V / W
    a = floor_log2(ratio)
    if ratio == Fraction(2) ** a:
        return [(c, v), (c2, v2)]
    # slopes 2^a then 2^{a+1}: width w of the first piece
    pa = Fraction(2) ** a
    w = (2 * pa * W - V) / pa
    mid = c + w
    return [(c, v), (mid, v + pa * w), (c2, v2)]


def _anchor_segment(alpha: Fraction, beta: Fraction, lo_x, hi_x, lo_y, hi_y):
    """A power-of-two slope segment through (alpha, beta) with dyadic
    endpoints, confined to the open box (lo_x, hi_x) x (lo_y, hi_y)."""
    if alpha == beta and is_dyadic(alpha):
        # identity germ through the point
        slope = Fraction(1)
    else:
        t, m, n = decompose_odd(alpha)
        k, p, q = decompose_odd(beta)
        if is_dyadic(alpha) and is_dyadic(beta):
            slope = Fraction(1)
        elif n != q:
            return None
        else:
            R = two_power_residue(m, p, n)
            if R is None:
                return None
            s = R + k - t
            r = mult_order_2(n)
            s %= r
            if s > r - s:
                s -= r
            slope = Fraction(2) ** s
    # line ell(t) = slope*(t - alpha) + beta has dyadic intercept
    def ell(t):
        return slope * (t - alpha) + beta

    # choose dyadic c < alpha < c2 with values inside the corridor
    span = min(alpha - lo_x, hi_x - alpha)
    step = span / 2
    while True:
        c_lo = alpha - step
        c_hi = alpha + step
        c = dyadic_between(c_lo, alpha)
        c2 = dyadic_between(alpha, c_hi)
        if lo_y < ell(c) and ell(c2) < hi_y:
            return [(c, ell(c)), (c2, ell(c2))], slope
        step /= 2


def transport_build(
    pairs: Sequence[Tuple[Rat, Rat]],
    context: Optional[Tuple[Rat, Rat]] = None,
) -> Optional[PLMap]:
    """g in F with g(alpha_i) = beta_i for all i, or None.

    With ``context=(eta, zeta)`` (dyadic endpoints) the result is the
    identity outside [eta, zeta].  Raises UnsortedInput unless both
    coordinate lists strictly increase.
    """
    pairs = [(Fraction(a), Fraction(b)) for a, b in pairs]
    if not pairs:
        return PLMap.identity()
    for i in range(len(pairs) - 1):
        if not (pairs[i][0] < pairs[i + 1][0] and pairs[i][1] < pairs[i + 1][1]):
            raise UnsortedInput("transport pairs must strictly increase in both coordinates")
    if context is not None:
        eta, zeta = Fraction(context[0]), Fraction(context[1])
        if not (is_dyadic(eta) and is_dyadic(zeta)):
            raise PreconditionViolated("interval context needs dyadic endpoints")
        for a, b in pairs:
            if not (eta < a < zeta and eta < b < zeta):
                raise PreconditionViolated("pairs must lie inside the open context interval")

    n = len(pairs)
    alphas = [a for a, _ in pairs]
    betas = [b for _, b in pairs]
    # isolation corridors around each constraint
    if context is None:
        x_lo = [alphas[0] - 1] + [(alphas[i - 1] + alphas[i]) / 2 for i in range(1, n)]
        x_hi = [(alphas[i] + alphas[i + 1]) / 2 for i in range(n - 1)] + [alphas[-1] + 1]
        y_lo = [betas[0] - 1] + [(betas[i - 1] + betas[i]) / 2 for i in range(1, n)]
        y_hi = [(betas[i] + betas[i + 1]) / 2 for i in range(n - 1)] + [betas[-1] + 1]
    else:
        x_lo = [eta] + [(alphas[i - 1] + alphas[i]) / 2 for i in range(1, n)]
        x_hi = [(alphas[i] + alphas[i + 1]) / 2 for i in range(n - 1)] + [zeta]
        y_lo = [eta] + [(betas[i - 1] + betas[i]) / 2 for i in range(1, n)]
        y_hi = [(betas[i] + betas[i + 1]) / 2 for i in range(n - 1)] + [zeta]

    segments = []
    for i, (a, b) in enumerate(pairs):
        seg = _anchor_segment(a, b, x_lo[i], x_hi[i], y_lo[i], y_hi[i])
        if seg is None:
            return None
        segments.append(seg[0])

    points: List[Tuple[Fraction, Fraction]] = []

    def add(run):
        for pt in run:
            if not points or points[-1][0] < pt[0]:
                points.append(pt)
            elif points[-1] != pt:
                raise AssertionError("transport assembly produced a clash")

    c1, v1 = segments[0][0]
    cN, vN = segments[-1][-1]
    if context is None:
        # integral translation tails joined by dyadic connectors
        m_minus = (v1 - c1).__floor__() - 1
        a0 = (c1 - 2).__floor__()
        add(dyadic_interval_map(Fraction(a0), c1, Fraction(a0 + m_minus), v1))
    elif (eta, eta) != (c1, v1):
        add(dyadic_interval_map(eta, c1, eta, v1))

    for i, seg in enumerate(segments):
        add(seg)
        if i + 1 < len(segments):
            cnext, vnext = segments[i + 1][0]
            add(dyadic_interval_map(seg[-1][0], cnext, seg[-1][1], vnext))

    if context is None:
        b0 = (cN + 2).__ceil__()
        m_plus = (vN - b0).__floor__() + 1
        add(dyadic_interval_map(cN, Fraction(b0), vN, Fraction(b0 + m_plus)))
        g = PLMap(1, points, TailLaw.translation(m_minus), TailLaw.translation(m_plus))
    else:
        if (cN, vN) != (zeta, zeta):
            add(dyadic_interval_map(cN, zeta, vN, zeta))
        g = PLMap(1, points, TailLaw.translation(0), TailLaw.translation(0))

    for a, b in pairs:
        if g(a) != b:
            raise AssertionError("transport construction failed verification")
    flags = classify(g)
    if not flags.in_F:
        raise AssertionError("transport construction left F")
    return g


def unique_power(g: PLMap, u: Rat, v: Rat) -> Optional[int]:
    """The unique m with g^m(u) = v, or None; u must not be fixed."""
    u = Fraction(u)
    v = Fraction(v)
    if g(u) == u:
        raise FixedBasePoint(f"{u} is fixed by the map")
    if v == u:
        return 0
    gu = g(u)
    increasing = gu > u
    # next fixed boundary in the direction of travel bounds the orbit
    fs = fixed_set(g)
    if increasing:
        if v < u:
            return None
        bound = _next_boundary(fs, u, +1)
        if bound is not None and v >= bound:
            return None
        m = 0
        cur = u
        while cur < v:
            cur = g(cur)
            m += 1
        return m if cur == v else None
    else:
        if v > u:
            return None
        bound = _next_boundary(fs, u, -1)
        if bound is not None and v <= bound:
            return None
        m = 0
        cur = u
        while cur > v:
            cur = g(cur)
            m += 1
        return m if cur == v else None


def unique_power_signed(g: PLMap, u: Rat, v: Rat) -> Optional[int]:
    """Unique m in Z (either sign) with g^m(u) = v, or None."""
    u = Fraction(u)
    v = Fraction(v)
    if g(u) == u:
        raise FixedBasePoint(f"{u} is fixed by the map")
    if v == u:
        return 0
    gu = g(u)
    forward = (gu > u) == (v > u)
    if forward:
        return unique_power(g, u, v)
    m = unique_power(g.invert(), u, v)
    return -m if m is not None else None


def _next_boundary(fs, u: Fraction, direction: int) -> Optional[Fraction]:
    """Nearest fixed-set point strictly beyond u in the given direction.

    Beyond the window the set is empty, a full ray, or 1-periodic, so a
    probe two units past the window edge is conclusive.
    """
    wl = Fraction(fs.window[0][0], fs.window[0][1])
    wr = Fraction(fs.window[1][0], fs.window[1][1])
    if direction > 0:
        hi = max(wr, u) + 2
        for a, _ in fs.comps_in(u, hi):
            av = Fraction(a[0], a[1])
            if av > u:
                return av
        return None
    lo = min(wl, u) - 2
    for _, b in reversed(fs.comps_in(lo, u)):
        bv = Fraction(b[0], b[1])
        if bv < u:
            return bv
    return None

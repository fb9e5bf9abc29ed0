"""Orientation-preserving conjugacy with the conjugator constrained to F.

Everything here uses the functional convention: ``conj_in_F(y, z)``
decides existence of g in F with g o z = y o g (that is,
z = g^-1 o y o g as function composition), and every Yes witness is
re-verified by exact normalized equality before being returned.

Pipeline: tail agreement, fixed-set alignment, then a split on the
boundary structure of the common fixed set -- interval chains solved by
germ propagation (the stair construction), shift candidates for the
bi-infinite case, and the Mather/exponent-equation machinery of the
circle module for the fixed-point-free case.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import NonConvergent, PLMapError, PreconditionViolated
from .exact import Rat, decompose_odd, is_dyadic, log2_exact, mult_order_2
from .plmap import (
    FixSet,
    PLMap,
    TailLaw,
    classify,
    compose,
    fixed_set,
    invert,
    is_strictly_above,
    is_strictly_below,
    reverse_conjugate,
    splice,
)
from .transport import dyadic_between, transport_build, transport_exists

F = Fraction


class PeriodicityBox:
    """Region (-inf, L] u [R, inf) where the two maps coincide and are
    unit-periodic; conjugators in F act as translations there."""

    __slots__ = ("L", "R")

    def __init__(self, L: Rat, R: Rat):
        self.L = F(L)
        self.R = F(R)

    def __repr__(self):
        return f"PeriodicityBox(L={self.L}, R={self.R})"


class Decision:
    __slots__ = ("verdict", "witness", "reason", "trace")

    def __init__(self, verdict, witness=None, reason=None, trace=None):
        self.verdict = verdict
        self.witness = witness
        self.reason = reason
        self.trace = trace or []

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"

    def __repr__(self):
        if self.yes:
            return "Decision(yes)"
        return f"Decision(no, {self.reason})"


REASON_TAILS = "TailMismatch"
REASON_FIX = "FixSetMismatch"
REASON_SLOPE = "SlopeObstruction"
REASON_EXPO = "ExponentEquationUnsolvable"
REASON_EXHAUSTED = "ExhaustedCandidates"
REASON_ORIENT = "OrientationMismatch"


def conjugate_by(f: PLMap, g: PLMap) -> PLMap:
    """g o f o g^-1 (transports Fix(f) by g)."""
    return compose(g, compose(f, invert(g)))


def verify_conjugacy(y: PLMap, z: PLMap, g: PLMap) -> bool:
    """Exact check of z = g^-1 o y o g."""
    return compose(y, g) == compose(g, z)


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------


def tails_agree(y: PLMap, z: PLMap) -> Optional[PeriodicityBox]:
    """A box certifying y = z near both infinities, or None.

    Agreement on one unit strip below both windows propagates downward
    by unit periodicity, so the strip checks are conclusive.
    """
    ly, ry = y.window
    lz, rz = z.window
    L = min(ly, lz)
    R = max(ry, rz)
    if not y.agrees_with(z, L - 1, L):
        return None
    if not y.agrees_with(z, R, R + 1):
        return None
    return PeriodicityBox(L, R)


# ---------------------------------------------------------------------------
# indexable boundary sequences
# ---------------------------------------------------------------------------


class BoundarySeq:
    """The boundary of a fixed set indexed like the paper's a_i.

    Points in [La, Ra) are the core (index 0 .. p-1); the patterns in
    [La-1, La) and [Ra, Ra+1) repeat by integral translation on the two
    sides.
    """

    def __init__(self, fs: FixSet, La: Fraction, Ra: Fraction):
        self.La = La
        self.Ra = Ra
        bp = fs.boundary_points_in(La - 1, Ra + 1)
        self.left_pat = [F(*x) for x in bp if F(*x) < La]
        self.core = [F(*x) for x in bp if La <= F(*x) < Ra]
        self.right_pat = [F(*x) for x in bp if Ra <= F(*x) < Ra + 1]
        self.m = len(self.left_pat)
        self.p = len(self.core)
        self.n = len(self.right_pat)

    def is_empty(self):
        return self.m == 0 and self.p == 0 and self.n == 0

    def point(self, i: int) -> Fraction:
        if 0 <= i < self.p:
            return self.core[i]
        if i >= self.p:
            if self.n == 0:
                raise IndexError(i)
            s = i - self.p
            lam, mu = divmod(s, self.n)
            return self.right_pat[mu] + lam
        # i < 0
        if self.m == 0:
            raise IndexError(i)
        k = -i - 1
        lam, mu = divmod(k, self.m)
        return self.left_pat[self.m - 1 - mu] - lam

    def index_of(self, pt: Fraction) -> Optional[int]:
        pt = F(pt)
        if self.La <= pt < self.Ra:
            try:
                return self.core.index(pt)
            except ValueError:
                return None
        if pt >= self.Ra:
            if self.n == 0:
                return None
            lam = (pt - self.Ra).__floor__()
            base = pt - lam
            try:
                mu = self.right_pat.index(base)
            except ValueError:
                return None
            return self.p + lam * self.n + mu
        if self.m == 0:
            return None
        lam = (self.La - 1 - pt).__ceil__()
        base = pt + lam
        try:
            j = self.left_pat.index(base)
        except ValueError:
            return None
        return -((lam + 1) * self.m - j)


def _work_zone(y: PLMap, z: PLMap) -> Tuple[Fraction, Fraction]:
    """Integers La < Ra with y = z and unit-periodic outside (La, Ra)."""
    ly, ry = y.window
    lz, rz = z.window
    La = F(min(ly, lz).__floor__() - 2)
    Ra = F(max(ry, rz).__ceil__() + 2)
    return La, Ra


# ---------------------------------------------------------------------------
# alignment of fixed-set boundaries (Prop. identify-fixed-points)
# ---------------------------------------------------------------------------


def align_fixed_sets(y: PLMap, z: PLMap, pin=None) -> Optional[Tuple[PLMap, PLMap]]:
    """(g, z') with boundary(Fix y) = g(boundary(Fix z)) and z' = g z g^-1.

    ``pin=(s, t)`` forces g(s) = t for a prescribed boundary pair.
    Returns None when no such g in F exists.
    """
    if tails_agree(y, z) is None:
        return None
    fy = fixed_set(y)
    fz = fixed_set(z)
    La, Ra = _work_zone(y, z)
    Sy = BoundarySeq(fy, La, Ra)
    Sz = BoundarySeq(fz, La, Ra)
    if Sy.is_empty() and Sz.is_empty():
        return (PLMap.identity(), z)
    if Sy.is_empty() != Sz.is_empty():
        return None
    # tails agree, so the two boundary patterns coincide
    if Sy.left_pat != Sz.left_pat or Sy.right_pat != Sz.right_pat:
        raise PLMapError("internal: shared tails with different boundary patterns")
    if Sy.p == 0 and Sy.m == 0 and Sy.n == 0:
        return (PLMap.identity(), z)

    m, n = Sy.m, Sy.n
    p, q = Sz.p, Sy.p

    if m >= 1 and n == 0:
        # mirror through the reversing map to reuse the n >= 1 case
        ry = reverse_conjugate(y)
        rz = reverse_conjugate(z)
        rpin = (-F(pin[0]), -F(pin[1])) if pin else None
        res = align_fixed_sets(ry, rz, pin=rpin)
        if res is None:
            return None
        gr, _ = res
        g = reverse_conjugate(gr)
        return (g, conjugate_by(z, g))

    candidates: List[int] = []
    if pin is not None:
        s, t = F(pin[0]), F(pin[1])
        iz = Sz.index_of(s)
        iy = Sy.index_of(t)
        if iz is None or iy is None:
            return None
        candidates = [iy - iz]
    elif m == 0 and n == 0:
        candidates = [0]
    elif m == 0:
        candidates = [0]
    else:
        lcm = m * n // _gcd(m, n)
        lo = -(p - 1) - 4 * lcm if p else -4 * lcm
        hi = (q - 1) + 4 * lcm if q else 4 * lcm
        raw = sorted(range(lo, hi + 1), key=lambda i: (abs(i), i))
        candidates = [i for i in raw]

    for i0 in candidates:
        g = _align_candidate(y, z, Sy, Sz, i0)
        if g is not None:
            z1 = conjugate_by(z, g)
            if not _boundary_eq(fixed_set(y), fixed_set(z1)):
                raise PLMapError("internal: alignment postcondition failed")
            return (g, z1)
    return None


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def _align_candidate(y, z, Sy: BoundarySeq, Sz: BoundarySeq, i0: int) -> Optional[PLMap]:
    """Try to build g in F with g(a_j) = b_{j + i0} for all j."""
    m, n = Sy.m, Sy.n
    p, q = Sz.p, Sy.p

    # congruences forced by the integral translations at the two ends
    if m == 0 and n == 0:
        if p != q or i0 != 0:
            return None
        pairs = [(Sz.point(j), Sy.point(j)) for j in range(p)]
        return transport_build(pairs)
    if m == 0:
        # minima must correspond: i0 = 0; shift at +inf must be integral
        if i0 != 0 or (q - p) % n != 0:
            return None
        lam = (q - p) // n
        j_lo = 0
        j_hi = max(p, q) - 1
        m_minus = None
        m_plus = -lam
    else:
        if i0 % m != 0 or (q - p - i0) % n != 0:
            return None
        m_minus = i0 // m
        m_plus = (p + i0 - q) // n
        j_lo = min(-1, -1 - i0) - m
        j_hi = max(p, q - i0) - 1 + n

    # one extra matched point on each patched side bounds the
    # connector searches below
    j_lo2 = j_lo - 1 if m >= 1 else j_lo
    j_hi2 = j_hi + 1 if n >= 1 else j_hi
    try:
        pairs = [(Sz.point(j), Sy.point(j + i0)) for j in range(j_lo2, j_hi2 + 1)]
    except IndexError:
        return None
    for a, b in pairs:
        if not transport_exists(a, b):
            return None
    g0 = transport_build(pairs)
    if g0 is None:
        return None

    g = g0
    # right patch: beyond a dyadic cut in the gap (a_{j_hi}, a_{j_hi+1})
    if n >= 1:
        a_hi = Sz.point(j_hi)
        a_next = Sz.point(j_hi + 1)
        b_next = Sy.point(j_hi + 1 + i0)
        if b_next != a_next + m_plus:
            raise PLMapError("internal: right pattern identity failed")
        alpha = dyadic_between(a_hi, a_next)
        # choose beta close enough to a_next that g0(alpha) < beta + m_plus
        lo = alpha
        while True:
            beta = dyadic_between(lo, a_next)
            if g0(alpha) < beta + m_plus:
                break
            lo = beta
        h = transport_build([(alpha, g0(alpha)), (beta, beta + m_plus)])
        if h is None:
            return None
        g = splice(splice(g, alpha, h), beta, PLMap.translation(m_plus))
    if m >= 1:
        a_lo = Sz.point(j_lo)
        a_prev = Sz.point(j_lo - 1)
        b_prev = Sy.point(j_lo - 1 + i0)
        if b_prev != a_prev + m_minus:
            raise PLMapError("internal: left pattern identity failed")
        beta = dyadic_between(a_prev, a_lo)
        hi = beta
        while True:
            alpha = dyadic_between(a_prev, hi)
            if alpha + m_minus < g(beta):
                break
            hi = alpha
        h = transport_build([(alpha, alpha + m_minus), (beta, g(beta))])
        if h is None:
            return None
        g = splice(splice(PLMap.translation(m_minus), alpha, h), beta, g)

    for a, b in pairs:
        if g(a) != b:
            return None
    if not classify(g).in_F:
        return None
    return g


def _boundary_eq(fa: FixSet, fb: FixSet) -> bool:
    lo = min(F(*fa.window[0]), F(*fb.window[0])).__floor__() - 3
    hi = max(F(*fa.window[1]), F(*fb.window[1])).__ceil__() + 3
    return fa.boundary_points_in(lo, hi) == fb.boundary_points_in(lo, hi)


# ---------------------------------------------------------------------------
# reduction map (Claim 2 surgery)
# ---------------------------------------------------------------------------


def reduction_map(g: PLMap, s0: Rat, stepL: Rat, stepR: Rat, gap=None) -> PLMap:
    """The Claim-2 reduction g_- with the non-dyadic patch applied.

    g_-(t) = g(t - stepL) below s0 and g(t) - stepR from s0 on; the
    patch re-interpolates across a small interval around s0 (``gap``
    bounds how far the patch may reach; default min(stepL, stepR, 1)/4).
    """
    s0 = F(s0)
    stepL = F(stepL)
    stepR = F(stepR)
    left = compose(g, PLMap.translation(-stepL))
    right = compose(PLMap.translation(-stepR), g)
    gm = splice(left, s0, right)
    if gap is None:
        gap = min(stepL, stepR, F(1)) / 4
    a1 = dyadic_between(s0 - gap, s0)
    a3 = dyadic_between(s0, s0 + gap)
    h = transport_build([(a1, gm(a1)), (s0, gm(s0)), (a3, gm(a3))])
    if h is None:
        raise PLMapError("reduction patch transport failed")
    return splice(splice(gm, a1, h), a3, gm)

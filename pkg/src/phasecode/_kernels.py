"""Compiled kernels behind :mod:`phasecode.quartic`.

Polynomials are length-5 float64 arrays, highest degree first:
``c[0]*x**4 + c[1]*x**3 + c[2]*x**2 + c[3]*x + c[4]``.

Set ``NUMBA_DISABLE_JIT=1`` to run everything as plain Python.
"""

import cmath
import math

import numpy as np
from numba import njit

TRIM = 1e-12          # leading coefficients below TRIM*max|c| are dropped
RESIDUAL = 1e-11      # |p(r)| <= RESIDUAL * sum_j |c_j||r|^j accepts a root
MERGE = 1e-9          # roots closer than MERGE*(1+|r|) are one root
CLUSTER = 1e-3        # wider merge radius, only when p stays ~0 between the two
DERIV_ZERO = 1e-6     # derivative sign test treats relative values below this as 0
ILL_COND = 1e-10      # scaled-root discriminant below this -> companion fallback
SCALE_GROUP = 1e3     # root magnitudes closer than this are solved together

_FACT = np.array([1.0, 1.0, 2.0, 6.0, 24.0])


@njit(cache=True)
def polyval(c, x):
    return (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]


@njit(cache=True)
def deriv_and_scale(c, x, m):
    """m-th derivative of p at x and the matching rounding scale."""
    val = 0.0
    mag = 0.0
    ax = abs(x)
    for j in range(m, 5):
        coef = c[4 - j] * _FACT[j] / _FACT[j - m]
        pw = x ** (j - m)
        val += coef * pw
        mag += abs(coef) * ax ** (j - m)
    return val, mag


@njit(cache=True)
def _polish(c, x):
    fx = polyval(c, x)
    for _ in range(12):
        d1, _m = deriv_and_scale(c, x, 1)
        if d1 == 0.0 or fx == 0.0:
            break
        xn = x - fx / d1
        fn = polyval(c, xn)
        if abs(fn) >= abs(fx):
            break
        x = xn
        fx = fn
    return x


@njit(cache=True)
def _cubic_real(A, B, C, out):
    """Real-root candidates of z^3 + A z^2 + B z + C; returns count."""
    p = B - A * A / 3.0
    q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C
    shift = -A / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        sd = math.sqrt(disc)
        u = -q / 2.0 + sd if q <= 0.0 else -q / 2.0 - sd
        u = math.copysign(abs(u) ** (1.0 / 3.0), u)
        v = 0.0 if u == 0.0 else -p / (3.0 * u)
        t1 = u + v
        out[0] = t1 + shift
        # real part of the complex pair; kept as a near-double candidate
        out[1] = -t1 / 2.0 + shift
        return 2
    if p == 0.0:
        out[0] = shift
        return 1
    r = math.sqrt(-p / 3.0)
    arg = 3.0 * q / (2.0 * p) / r
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg) / 3.0
    for i in range(3):
        out[i] = 2.0 * r * math.cos(phi - 2.0 * math.pi * i / 3.0) + shift
    return 3


@njit(cache=True)
def _quad_real(B, C, out, start):
    """Candidates of z^2 + B z + C appended at out[start:]; returns new count."""
    disc = B * B - 4.0 * C
    if disc < 0.0:
        out[start] = -B / 2.0
        return start + 1
    sd = math.sqrt(disc)
    q = -0.5 * (B + math.copysign(sd, B))
    if q == 0.0:
        out[start] = 0.0
        return start + 1
    out[start] = q
    out[start + 1] = C / q
    return start + 2


@njit(cache=True)
def _ferrari(a, b, c, d, out, zc):
    """Candidates of monic z^4 + a z^3 + b z^2 + c z + d.

    Also fills ``zc`` with the four complex roots (used for the conditioning
    test).  Returns the candidate count.
    """
    a2 = a * a
    p = b - 3.0 * a2 / 8.0
    q = c - a * b / 2.0 + a2 * a / 8.0
    r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0
    shift = -a / 4.0
    cub = np.empty(3)
    nc = _cubic_real(p, p * p / 4.0 - r, -q * q / 8.0, cub)
    # largest real resolvent root, polished
    mroot = cub[0]
    for i in range(1, nc):
        mroot = max(mroot, cub[i])
    for _ in range(6):
        f = ((mroot + p) * mroot + (p * p / 4.0 - r)) * mroot - q * q / 8.0
        df = (3.0 * mroot + 2.0 * p) * mroot + (p * p / 4.0 - r)
        if df == 0.0:
            break
        mn = mroot - f / df
        fn = ((mn + p) * mn + (p * p / 4.0 - r)) * mn - q * q / 8.0
        if abs(fn) >= abs(f):
            break
        mroot = mn
    scale = max(abs(p), math.sqrt(abs(r)), 1e-300)
    if mroot <= 1e-14 * scale:
        # biquadratic: y^2 = w, w^2 + p w + r = 0
        disc = p * p - 4.0 * r
        k = 0
        if disc >= 0.0:
            sd = math.sqrt(disc)
            ws = ((-p + sd) / 2.0, (-p - sd) / 2.0)
            for w in ws:
                if w >= 0.0:
                    out[k] = math.sqrt(w) + shift
                    out[k + 1] = -math.sqrt(w) + shift
                    k += 2
                else:
                    out[k] = shift
                    k += 1
            zw0 = cmath.sqrt(complex(ws[0]))
            zw1 = cmath.sqrt(complex(ws[1]))
        else:
            out[0] = shift
            k = 1
            w0 = complex(-p / 2.0, math.sqrt(-disc) / 2.0)
            zw0 = cmath.sqrt(w0)
            zw1 = cmath.sqrt(w0.conjugate())
        zc[0] = zw0 + shift
        zc[1] = -zw0 + shift
        zc[2] = zw1 + shift
        zc[3] = -zw1 + shift
        return k
    s = math.sqrt(2.0 * mroot)
    h = p / 2.0 + mroot
    g = q / (2.0 * s)
    # y^2 - s y + (h + g) = 0  and  y^2 + s y + (h - g) = 0
    k = 0
    for sgn in (-1.0, 1.0):
        B = sgn * s
        C = h - sgn * g
        disc = B * B - 4.0 * C
        sq = cmath.sqrt(complex(disc))
        zc[k] = (-B + sq) / 2.0 + shift
        zc[k + 1] = (-B - sq) / 2.0 + shift
        k += 2
    n = 0
    n = _quad_real(-s, h + g, out, n)
    n = _quad_real(s, h - g, out, n)
    for i in range(n):
        out[i] += shift
    return n


@njit(cache=True)
def real_roots(c, out):
    """Distinct real roots of the quartic ``c`` into ``out`` (ascending).

    Returns the count, or -1 for the zero polynomial.
    """
    return real_roots_trim(c, out, TRIM)


@njit(cache=True)
def _candidates(c, cand, nc):
    """Append real-root candidates of ``c`` (leading zeros allowed, c[4] != 0)."""
    lead = 0
    while c[lead] == 0.0:
        lead += 1
    deg = 4 - lead
    if deg == 0:
        return nc
    # x = s*z brings all roots to |z| <= 2
    s = 0.0
    for i in range(1, deg + 1):
        s = max(s, abs(c[lead + i] / c[lead]) ** (1.0 / i))
    if s == 0.0:
        s = 1.0
    mon = np.zeros(5)
    for i in range(1, deg + 1):
        si = s**i
        if si > 0.0:
            mon[i] = c[lead + i] / (c[lead] * si)
    tmp = np.empty(8)
    k = 0
    if deg == 1:
        tmp[0] = -mon[1]
        k = 1
    elif deg == 2:
        k = _quad_real(mon[1], mon[2], tmp, 0)
    elif deg == 3:
        k = _cubic_real(mon[1], mon[2], mon[3], tmp)
        # small roots next to a dominant one lose accuracy in the closed
        # form; deflate by the largest real root (sum and product of the rest)
        big = 0.0
        for i in range(k):
            if abs(tmp[i]) > abs(big):
                big = tmp[i]
        if big != 0.0:
            k = _quad_real(mon[1] + big, -mon[3] / big, tmp, k)
    else:
        zc = np.empty(4, dtype=np.complex128)
        k = _ferrari(mon[1], mon[2], mon[3], mon[4], tmp, zc)
        dprod = 1.0
        for i in range(4):
            for j in range(i + 1, 4):
                dprod *= abs(zc[i] - zc[j]) ** 2
        if dprod < ILL_COND:
            comp = np.zeros((4, 4), dtype=np.complex128)
            for j in range(4):
                comp[0, j] = -mon[j + 1]
            for j in range(1, 4):
                comp[j, j - 1] = 1.0
            ev = np.linalg.eigvals(comp)
            for j in range(4):
                tmp[k] = ev[j].real
                k += 1
    for i in range(k):
        cand[nc] = tmp[i] * s
        nc += 1
    return nc


@njit(cache=True)
def _root_scales(c, lead, scales):
    """Root magnitudes from the upper Newton polygon of ``c[lead:]``.

    Segments whose magnitudes lie within a factor SCALE_GROUP share one
    entry.  Returns the count.
    """
    # points (power, log|coef|) of the nonzero coefficients, power ascending
    pw = np.empty(5)
    lg = np.empty(5)
    m = 0
    for i in range(4, lead - 1, -1):
        if c[i] != 0.0:
            pw[m] = 4 - i
            lg[m] = math.log(abs(c[i]))
            m += 1
    hull = np.empty(5, dtype=np.int64)
    h = 0
    for i in range(m):
        while h >= 2:
            a = hull[h - 2]
            b = hull[h - 1]
            cross = (pw[b] - pw[a]) * (lg[i] - lg[a]) - (lg[b] - lg[a]) * (pw[i] - pw[a])
            if cross >= 0.0:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    n = 0
    for t in range(h - 1):
        a = hull[t]
        b = hull[t + 1]
        mag = math.exp((lg[a] - lg[b]) / (pw[b] - pw[a]))
        if n == 0 or mag > SCALE_GROUP * scales[n - 1]:
            scales[n] = mag
            n += 1
    return n


@njit(cache=True)
def _cluster_root(c, left, right, mean):
    """One representative for candidates of a split multiple root.

    A root of multiplicity m is a simple root of the (m-1)-th derivative, so
    Newton on that derivative recovers it to full precision.  Multiplicities
    4, 3 and 2 are tried in turn; the mean is kept when none fits.
    """
    width = right - left + MERGE * max(1.0, abs(mean))
    for m in range(3, 0, -1):
        x = mean
        for _ in range(8):
            v, _mg = deriv_and_scale(c, x, m)
            d, _md = deriv_and_scale(c, x, m + 1)
            if d == 0.0 or v == 0.0:
                break
            x = x - v / d
            if not abs(x - mean) <= width:
                break
        if not abs(x - mean) <= width:
            continue
        ok = True
        for k in range(m + 1):
            v, mag = deriv_and_scale(c, x, k)
            if abs(v) > RESIDUAL * mag:
                ok = False
                break
        if ok:
            return x
    return mean


@njit(cache=True)
def real_roots_trim(c, out, trim):
    """:func:`real_roots` with an explicit leading-coefficient trim ratio.

    The line is searched once per root magnitude of the Newton polygon, so
    roots of very different sizes are all resolved.  Candidates are polished
    on the full polynomial and kept only if their residual is at rounding
    level; nearby candidates with a vanishing polynomial between them are
    merged into their mean.
    """
    cmax = 0.0
    for i in range(5):
        cmax = max(cmax, abs(c[i]))
    if cmax == 0.0:
        return -1
    c = c / cmax
    lead = 0
    while abs(c[lead]) <= trim:
        lead += 1
    if lead == 4:
        return 0
    cand = np.empty(48)
    nc = 0
    tail = 4
    while c[tail] == 0.0:
        tail -= 1
    if tail < 4:
        cand[nc] = 0.0
        nc += 1
    if tail > lead:
        scales = np.empty(4)
        ns = _root_scales(c, lead, scales)
        e = np.empty(5)
        for t in range(ns):
            ls = math.log(scales[t])
            emax = -np.inf
            for i in range(lead, tail + 1):
                if c[i] != 0.0:
                    emax = max(emax, math.log(abs(c[i])) + (4 - i) * ls)
            # coefficients of p(scale*z), negligible ends trimmed; the
            # polynomial is shifted right so that its constant term is e[4]
            e[:] = 0.0
            for i in range(lead, tail + 1):
                if c[i] != 0.0:
                    v = math.exp(math.log(abs(c[i])) + (4 - i) * ls - emax)
                    e[i] = v if c[i] > 0.0 else -v
            lo = lead
            while abs(e[lo]) <= TRIM:
                lo += 1
            hi = tail
            while abs(e[hi]) <= TRIM:
                hi -= 1
            if hi == lo:
                continue
            sub = np.zeros(5)
            for i in range(lo, hi + 1):
                sub[i + 4 - hi] = e[i]
            n0 = nc
            nc = _candidates(sub, cand, nc)
            for i in range(n0, nc):
                cand[i] *= scales[t]
    # polish on the original polynomial, keep true roots only
    acc = np.empty(48)
    na = 0
    for i in range(nc):
        x = _polish(c, cand[i])
        _v, mag = deriv_and_scale(c, x, 0)
        if abs(polyval(c, x)) <= RESIDUAL * mag:
            acc[na] = x
            na += 1
    if na == 0:
        return 0
    acc = np.sort(acc[:na])
    n = 0
    i = 0
    while i < na:
        j = i + 1
        while j < na:
            gap = acc[j] - acc[j - 1]
            rad = max(abs(acc[j]), abs(acc[j - 1]))
            if gap <= MERGE * rad:
                j += 1
                continue
            if gap <= CLUSTER * rad:
                mid = 0.5 * (acc[j] + acc[j - 1])
                _v, mag = deriv_and_scale(c, mid, 0)
                if abs(polyval(c, mid)) <= RESIDUAL * mag:
                    j += 1
                    continue
            break
        if j - i == 1:
            out[n] = acc[i]
        else:
            out[n] = _cluster_root(c, acc[i], acc[j - 1], acc[i:j].mean())
        n += 1
        if n == 4:
            break
        i = j
    return n



@njit(cache=True)
def _sign_right_of(c, x):
    """Sign of c just right of x from its first non-vanishing derivative."""
    for m in range(5):
        v, mag = deriv_and_scale(c, x, m)
        tol = RESIDUAL * mag if m == 0 else DERIV_ZERO * mag
        if abs(v) > tol:
            return 1.0 if v > 0.0 else -1.0
    return 0.0


@njit(cache=True)
def _probe_sign(c, x):
    """Sign of c(x), or 0 when the value is lost in rounding."""
    v, mag = deriv_and_scale(c, x, 0)
    if abs(v) > RESIDUAL * mag:
        return 1.0 if v > 0.0 else -1.0
    return 0.0


@njit(cache=True)
def _tail_signs(c, roots, L):
    """Signs of c left of the first and right of the last root."""
    cmax = 0.0
    for i in range(5):
        cmax = max(cmax, abs(c[i]))
    lead = 0
    while abs(c[lead]) <= TRIM * cmax:
        lead += 1
    s_hi = 1.0 if c[lead] > 0.0 else -1.0
    s_lo = s_hi if (4 - lead) % 2 == 0 else -s_hi
    if L == 0:
        for x in (0.0, 1.0, -1.0):
            v = _probe_sign(c, x)
            if v != 0.0:
                return v, v
        return s_lo, s_hi
    r = roots[L - 1]
    v = _probe_sign(c, r + max(1.0, abs(r)))
    if v != 0.0:
        s_hi = v
    r = roots[0]
    v = _probe_sign(c, r - max(1.0, abs(r)))
    if v != 0.0:
        s_lo = v
    return s_lo, s_hi


@njit(cache=True)
def positive_intervals(c, lo, hi, start):
    """Append the open intervals where c(x) > 0 at lo/hi[start:].

    The real roots split the line into open pieces of constant sign.  Each
    bounded piece is classified by the value at its midpoint; when that
    value is lost in rounding the first non-vanishing derivative at the left
    root decides.  Unbounded pieces are probed one root-size beyond the
    outer roots, with the leading term as the fallback.
    Returns the new fill count.  The zero polynomial yields no interval.
    """
    roots = np.empty(4)
    L = real_roots(c, roots)
    n = start
    if L < 0:
        return n
    s_lo, s_hi = _tail_signs(c, roots, L)
    if L == 0:
        if s_hi > 0.0:
            lo[n] = -np.inf
            hi[n] = np.inf
            n += 1
        return n
    if s_lo > 0.0:
        lo[n] = -np.inf
        hi[n] = roots[0]
        n += 1
    for i in range(L - 1):
        a = roots[i]
        b = roots[i + 1]
        mid = 0.5 * (a + b)
        v, mag = deriv_and_scale(c, mid, 0)
        if abs(v) > RESIDUAL * mag:
            pos = v > 0.0
        else:
            pos = _sign_right_of(c, a) > 0.0
        if pos:
            lo[n] = a
            hi[n] = b
            n += 1
    if s_hi > 0.0:
        lo[n] = roots[L - 1]
        hi[n] = np.inf
        n += 1
    return n


@njit(cache=True)
def union_sweep(lo, hi, n, out_lo, out_hi):
    """Union of n open intervals by an endpoint sweep with a counter.

    Right endpoints sort before equal left endpoints, so intervals that only
    touch stay separated by that point.  Returns the merged count.
    """
    vals = np.empty(2 * n)
    kind = np.empty(2 * n, dtype=np.int64)
    k = 0
    for i in range(n):
        if lo[i] < hi[i]:
            vals[k] = hi[i]
            kind[k] = 0
            k += 1
    for i in range(n):
        if lo[i] < hi[i]:
            vals[k] = lo[i]
            kind[k] = 1
            k += 1
    order = np.argsort(vals[:k], kind="mergesort")
    count = 0
    m = 0
    for t in range(k):
        e = order[t]
        if kind[e] == 1:
            if count == 0:
                out_lo[m] = vals[e]
            count += 1
        else:
            count -= 1
            if count == 0:
                out_hi[m] = vals[e]
                m += 1
    return m


@njit(cache=True)
def first_gap(lo, hi, m):
    """Lowest point outside a merged union; (found, point)."""
    if m == 0:
        return True, 0.0
    if lo[0] > -np.inf:
        return True, lo[0] - 1.0
    for j in range(m - 1):
        return True, 0.5 * (hi[j] + lo[j + 1])
    if hi[m - 1] < np.inf:
        return True, hi[m - 1] + 1.0
    return False, 0.0


@njit(cache=True)
def feasibility_gap(P, gamma, bound):
    """Is there a beta with P[k](beta) <= gamma*(1+beta^2)^2 for every k?

    Rows whose ``bound`` is <= gamma are skipped: their superlevel set is
    empty.  Returns (found, beta) with the lowest complement point.
    """
    K = P.shape[0]
    lo = np.empty(5 * K)
    hi = np.empty(5 * K)
    c = np.empty(5)
    n = 0
    for k in range(K):
        if bound[k] <= gamma:
            continue
        c[0] = P[k, 0] - gamma
        c[1] = P[k, 1]
        c[2] = P[k, 2] - 2.0 * gamma
        c[3] = P[k, 3]
        c[4] = P[k, 4] - gamma
        n0 = n
        n = positive_intervals(c, lo, hi, n)
        if n == n0 + 1 and lo[n0] == -np.inf and hi[n0] == np.inf:
            return False, 0.0
    out_lo = np.empty(max(n, 1))
    out_hi = np.empty(max(n, 1))
    m = union_sweep(lo, hi, n, out_lo, out_hi)
    return first_gap(out_lo, out_hi, m)


@njit(cache=True)
def bisect_minmax(P, bound, u0, eps1, g_pi):
    """Bisection on the min-max of the rows of ``P`` over (1+beta^2)^2.

    Returns (iterations, witness kind, beta, w, u) where kind is 0 for no
    feasible witness, 1 for a finite beta and 2 for phi = pi.
    """
    w = 0.0
    u = u0
    iters = 0
    width = u0
    while width > eps1:
        width *= 0.5
        iters += 1
    kind = 0
    beta = 0.0
    for _ in range(iters):
        gamma = 0.5 * (u + w)
        found, b = feasibility_gap(P, gamma, bound)
        if found:
            kind = 1
            beta = b
            u = gamma
        elif g_pi <= gamma:
            kind = 2
            u = gamma
        else:
            w = gamma
    return iters, kind, beta, w, u

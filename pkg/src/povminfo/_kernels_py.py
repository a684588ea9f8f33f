"""Pure-Python kernels; reference implementation and fallback for ``_kernels``.

Objectives share one calling convention: ``f(x, consts)`` with
``consts = (alpha, prior_p, n, balance_weight)``. They return ``-inf`` for
points outside the feasible set.
"""

import math

KIND_PROJECTIVE = 0
KIND_GENERALIZED = 1
KIND_MATRIX = 2

NEG_INF = float("-inf")
OVERLAP_SLACK = 1e-12
SINGULAR_DET = 1e-14


def channel_mi(row_p, row_q, prior_p):
    prior_q = 1.0 - prior_p
    total = 0.0
    for cp, cq in zip(row_p, row_q):
        jp = prior_p * cp
        jq = prior_q * cq
        m = jp + jq
        if jp > 0.0:
            total += jp * math.log2(cp / m)
        if jq > 0.0:
            total += jq * math.log2(cq / m)
    return total


def projective_objective(x, consts):
    alpha, prior_p = consts[0], consts[1]
    half = 0.5 * alpha
    theta = x[0]
    a0 = math.cos(theta - half)
    a1 = math.sin(theta - half)
    b0 = math.cos(theta + half)
    b1 = math.sin(theta + half)
    return channel_mi((a0 * a0, a1 * a1), (b0 * b0, b1 * b1), prior_p)


def _softmax(v):
    top = max(v)
    e = [math.exp(t - top) for t in v]
    s = 0.0
    for t in e:
        s += t
    return [t / s for t in e]


def generalized_decode(x, n, cos_alpha):
    """Map unconstrained coordinates to (weights_p, weights_q, cosines, thetas).

    Layout: n logits for p, n logits for q, n-1 angles whose cosines are the
    first n-1 post-overlaps, then n readout angles. The last post-overlap is
    eliminated by overlap preservation; returns None when it leaves [-1, 1].
    """
    wp = _softmax(x[0:n])
    wq = _softmax(x[n:2 * n])
    cos = [math.cos(x[2 * n + i]) for i in range(n - 1)]
    acc = 0.0
    for i in range(n - 1):
        acc += math.sqrt(wp[i] * wq[i]) * cos[i]
    root = math.sqrt(wp[n - 1] * wq[n - 1])
    if root <= 0.0:
        return None
    last = (cos_alpha - acc) / root
    if last > 1.0 + OVERLAP_SLACK or last < -1.0 - OVERLAP_SLACK:
        return None
    cos.append(min(1.0, max(-1.0, last)))
    thetas = list(x[3 * n - 1:4 * n - 1])
    return wp, wq, cos, thetas


def generalized_objective(x, consts):
    alpha, prior_p, n, balance = consts[0], consts[1], int(consts[2]), consts[3]
    dec = generalized_decode(x, n, math.cos(alpha))
    if dec is None:
        return NEG_INF
    wp, wq, cos, thetas = dec
    row_p = []
    row_q = []
    bal = 0.0
    for i in range(n):
        half = 0.5 * math.acos(cos[i])
        t = thetas[i]
        a0 = math.cos(t - half)
        a1 = math.sin(t - half)
        b0 = math.cos(t + half)
        b1 = math.sin(t + half)
        row_p.append(wp[i] * a0 * a0)
        row_p.append(wp[i] * a1 * a1)
        row_q.append(wq[i] * b0 * b0)
        row_q.append(wq[i] * b1 * b1)
        bal += math.sqrt(wp[i] * wq[i])
    return channel_mi(row_p, row_q, prior_p) + balance * bal


def matrix_decode(x, n):
    """Elements E_k = R F_k^T F_k R with R the inverse square root of sum F^T F.

    Each F_k is a row-major 2x2 block of ``x``. Returns a list of
    (e00, e01, e11) triples, or None when the sum is singular.
    """
    s00 = s01 = s11 = 0.0
    grams = []
    for k in range(n):
        f00, f01, f10, f11 = x[4 * k], x[4 * k + 1], x[4 * k + 2], x[4 * k + 3]
        g00 = f00 * f00 + f10 * f10
        g01 = f00 * f01 + f10 * f11
        g11 = f01 * f01 + f11 * f11
        grams.append((g00, g01, g11))
        s00 += g00
        s01 += g01
        s11 += g11
    det = s00 * s11 - s01 * s01
    tr = s00 + s11
    if det <= SINGULAR_DET * tr * tr:
        return None
    sd = math.sqrt(det)
    t = math.sqrt(tr + 2.0 * sd)
    # sqrt(S) = (S + sqrt(det) I) / t, then invert the 2x2.
    m00 = (s00 + sd) / t
    m01 = s01 / t
    m11 = (s11 + sd) / t
    mdet = m00 * m11 - m01 * m01
    r00 = m11 / mdet
    r01 = -m01 / mdet
    r11 = m00 / mdet
    out = []
    for g00, g01, g11 in grams:
        # R G R for symmetric R, G.
        h00 = r00 * g00 + r01 * g01
        h01 = r00 * g01 + r01 * g11
        h10 = r01 * g00 + r11 * g01
        h11 = r01 * g01 + r11 * g11
        e00 = h00 * r00 + h01 * r01
        e01 = h00 * r01 + h01 * r11
        e11 = h10 * r01 + h11 * r11
        out.append((e00, e01, e11))
    return out


def matrix_objective(x, consts):
    alpha, prior_p, n = consts[0], consts[1], int(consts[2])
    elems = matrix_decode(x, n)
    if elems is None:
        return NEG_INF
    half = 0.5 * alpha
    c = math.cos(half)
    s = math.sin(half)
    row_p = []
    row_q = []
    for e00, e01, e11 in elems:
        cc = c * c * e00
        ss = s * s * e11
        cross = 2.0 * c * s * e01
        row_p.append(max(cc + cross + ss, 0.0))
        row_q.append(max(cc - cross + ss, 0.0))
    return channel_mi(row_p, row_q, prior_p)


_OBJECTIVES = {
    KIND_PROJECTIVE: projective_objective,
    KIND_GENERALIZED: generalized_objective,
    KIND_MATRIX: matrix_objective,
}


def objective(kind, x, consts):
    return _OBJECTIVES[kind](list(x), list(consts))


def _explore(f, z, fz, h):
    y = list(z)
    fy = fz
    for i in range(len(y)):
        old = y[i]
        y[i] = old + h
        ft = f(y)
        if ft > fy:
            fy = ft
            continue
        y[i] = old - h
        ft = f(y)
        if ft > fy:
            fy = ft
            continue
        y[i] = old
    return y, fy


def hooke_jeeves(f, x0, step, min_step, max_iter):
    """Maximize ``f`` by Hooke-Jeeves pattern search.

    One iteration is one exploratory sweep over all coordinates. The step
    halves after an unproductive sweep; ``converged`` means the step fell
    below ``min_step`` before ``max_iter`` sweeps were used.
    """
    x = list(x0)
    fx = f(x)
    h = step
    it = 0
    while it < max_iter:
        y, fy = _explore(f, x, fx, h)
        it += 1
        if fy > fx:
            while True:
                z = [2.0 * yi - xi for yi, xi in zip(y, x)]
                x, fx = y, fy
                if it >= max_iter:
                    break
                y, fy = _explore(f, z, f(z), h)
                it += 1
                if not fy > fx:
                    break
            continue
        h *= 0.5
        if h < min_step:
            return x, fx, it, True
    return x, fx, it, False


def pattern_search(kind, x0, consts, step, min_step, max_iter):
    f = _OBJECTIVES[kind]
    c = list(consts)
    return hooke_jeeves(lambda v: f(v, c), x0, step, min_step, max_iter)

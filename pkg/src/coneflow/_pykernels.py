"""Pure-Python integration kernel; used when the compiled ``_kernels`` is absent.

Mirrors ``_kernels.pyx`` step for step: same flow codes, status codes and
stopping rules, so the two backends agree to rounding.
"""

import math

import numpy as np

# flow codes
RICCI_ROUND, DIRAC, RICCI_BERGER, NORMALIZED_BERGER, ASD, FLOW9, HITCHIN, BERGER_CONTINUATION = range(8)

# rhs status
OK, VIOLATION, EXIT, NONFINITE = 0, 1, 2, 3

# stop reasons
REACHED_T_END, COLLAPSE, DOMAIN_EXIT, STEP_UNDERFLOW, BUDGET, NOT_FINITE = range(6)

DIM = (1, 2, 2, 2, 2, 2, 2, 2)
MASK = (
    (True,),
    (True, False),
    (True, True),
    (True, True),
    (True, True),
    (True, True),
    (True, True),
    (False, False),
)


def rhs(code, k, y):
    """Return ``(status, component, dy)``; ``dy`` is None unless status is OK."""
    if code == RICCI_ROUND:
        f = y[0]
        if not f > 0.0:
            return VIOLATION, 0, None
        return OK, -1, (-4.0 / f,)
    if code == DIRAC:
        return OK, -1, (y[1], -k * y[0])
    a, b = y[0], y[1]
    if code == BERGER_CONTINUATION:
        if a == 0.0:
            return OK, -1, (0.0, -16.0)
        q = a / b
        return OK, -1, (-8.0 * q * q, 8.0 * q - 16.0)
    if not b > 0.0:
        return VIOLATION, 1, None
    if code == RICCI_BERGER:
        if a < 0.0:
            return VIOLATION, 0, None
        q = a / b
        return OK, -1, (-8.0 * q * q, 8.0 * q - 16.0)
    if code == NORMALIZED_BERGER:
        if not a > 0.0:
            return VIOLATION, 0, None
        gap = a * a - b * b
        return OK, -1, (-16.0 / 3.0 * a / b**4 * gap, 8.0 / 3.0 * gap / b**3)
    if code == ASD:
        if a < 0.0:
            return VIOLATION, 0, None
        q = a / b
        return OK, -1, (2.0 - q * q, q)
    if code == FLOW9:
        if not a > 0.0:
            return EXIT, 0, None
        q = a * a / (b * b)
        ric11 = 4.0 * q / (b * b)
        ric22 = 4.0 / (b * b) * (2.0 - q)
        if not ric22 > 0.0:
            return EXIT, 0, None
        root = math.sqrt(ric11)
        return OK, -1, (a * 0.5 * ric22 / root, b * 0.5 * root)
    if code == HITCHIN:
        if a < 0.0:
            return VIOLATION, 0, None
        det = -2.0 * b * b
        return OK, -1, ((2.0 * a * a - 4.0 * b * b) / det, (-2.0 * a * b) / det)
    raise ValueError(f"unknown flow code {code}")


def _rk4(code, k, y, h):
    st, c, k1 = rhs(code, k, y)
    if st:
        return st, c, None
    st, c, k2 = rhs(code, k, [y[i] + 0.5 * h * k1[i] for i in range(len(y))])
    if st:
        return st, c, None
    st, c, k3 = rhs(code, k, [y[i] + 0.5 * h * k2[i] for i in range(len(y))])
    if st:
        return st, c, None
    st, c, k4 = rhs(code, k, [y[i] + h * k3[i] for i in range(len(y))])
    if st:
        return st, c, None
    out = [y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(len(y))]
    mask = MASK[code]
    for i, v in enumerate(out):
        if not math.isfinite(v):
            return NONFINITE, i, None
        if mask[i] and v < 0.0:
            return VIOLATION, i, None
    return OK, -1, out


def run(code, k, y0, t0, t_end, h_max, adaptive, rtol, atol,
        collapse_eps, collapse_tol, h_min, max_samples):
    """Integrate from ``y0``; return ``(ts, ys, reason, component, t_stop)``."""
    d = DIM[code]
    mask = MASK[code]
    y = [float(v) for v in y0]
    armed = [mask[i] and y[i] >= collapse_eps for i in range(d)]
    t = float(t0)
    h = h_max
    ts = [t]
    ys = [list(y)]
    reason, comp = REACHED_T_END, -1
    span_eps = 1e-14 * max(1.0, abs(t_end))
    # t = anchor + m * h while h is unchanged, so uniform grids carry no drift
    anchor, m, h_anchor = t, 0, h

    while t_end - t > span_eps:
        last = h * (1.0 + 1e-9) >= t_end - t
        hh = t_end - t if last else h
        err = 0.0
        st, c, full = _rk4(code, k, y, hh)
        if st == OK and adaptive:
            st, c, mid = _rk4(code, k, y, 0.5 * hh)
            if st == OK:
                st, c, half = _rk4(code, k, mid, 0.5 * hh)
            if st == OK:
                for i in range(d):
                    e = abs(half[i] - full[i]) / (atol + rtol * abs(half[i]))
                    if e > err:
                        err = e
                full = half
        if st != OK:
            if hh <= collapse_tol:
                if st == VIOLATION and armed[c]:
                    reason, comp = COLLAPSE, c
                elif st == NONFINITE:
                    reason, comp = NOT_FINITE, c
                else:
                    reason, comp = DOMAIN_EXIT, c
                break
            h = 0.5 * hh
            continue
        if err > 1.0:
            h = 0.5 * hh
            if h < h_min:
                reason = STEP_UNDERFLOW
                break
            continue

        if last:
            t = t_end
        else:
            if hh != h_anchor:
                anchor, m, h_anchor = t, 0, hh
            m += 1
            t = anchor + m * hh
        y = full
        ts.append(t)
        ys.append(list(y))
        if len(ts) > max_samples:
            reason = BUDGET
            break
        for i in range(d):
            if mask[i] and not armed[i] and y[i] >= collapse_eps:
                armed[i] = True
        st, c, dy = rhs(code, k, y)
        if st == OK:
            for i in range(d):
                if armed[i] and (y[i] < collapse_eps or (dy[i] < 0.0 and y[i] < -dy[i] * collapse_tol)):
                    reason, comp = COLLAPSE, i
                    break
            if reason == COLLAPSE:
                break
        if adaptive and err < 1.0 / 64.0:
            h = min(2.0 * hh, h_max)

    return np.array(ts), np.array(ys, dtype=float).reshape(len(ts), d), reason, comp, t

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel. Same contract as ``_pykernels``."""

from libc.math cimport fabs, sqrt, isfinite
from libc.stdlib cimport malloc, realloc, free

import numpy as np

cdef enum:
    MAXDIM = 2

cdef enum:
    RICCI_ROUND = 0
    DIRAC = 1
    RICCI_BERGER = 2
    NORMALIZED_BERGER = 3
    ASD = 4
    FLOW9 = 5
    HITCHIN = 6
    BERGER_CONTINUATION = 7

cdef enum:
    OK = 0
    VIOLATION = 1
    EXIT = 2
    NONFINITE = 3

cdef enum:
    REACHED_T_END = 0
    COLLAPSE = 1
    DOMAIN_EXIT = 2
    STEP_UNDERFLOW = 3
    BUDGET = 4
    NOT_FINITE = 5


cdef inline int dim_of(int code) nogil:
    return 1 if code == RICCI_ROUND else 2


cdef inline bint metric(int code, int i) nogil:
    if code == BERGER_CONTINUATION:
        return False
    if code == DIRAC:
        return i == 0
    return True


cdef int c_rhs(int code, double k, const double* y, double* dy, int* comp) nogil:
    cdef double a, b, q, gap, ric11, ric22, root, det
    if code == RICCI_ROUND:
        if not y[0] > 0.0:
            comp[0] = 0
            return VIOLATION
        dy[0] = -4.0 / y[0]
        return OK
    if code == DIRAC:
        dy[0] = y[1]
        dy[1] = -k * y[0]
        return OK
    a = y[0]
    b = y[1]
    if code == BERGER_CONTINUATION:
        if a == 0.0:
            dy[0] = 0.0
            dy[1] = -16.0
        else:
            q = a / b
            dy[0] = -8.0 * q * q
            dy[1] = 8.0 * q - 16.0
        return OK
    if not b > 0.0:
        comp[0] = 1
        return VIOLATION
    if code == RICCI_BERGER:
        if a < 0.0:
            comp[0] = 0
            return VIOLATION
        q = a / b
        dy[0] = -8.0 * q * q
        dy[1] = 8.0 * q - 16.0
        return OK
    if code == NORMALIZED_BERGER:
        if not a > 0.0:
            comp[0] = 0
            return VIOLATION
        gap = a * a - b * b
        dy[0] = -16.0 / 3.0 * a / (b * b * b * b) * gap
        dy[1] = 8.0 / 3.0 * gap / (b * b * b)
        return OK
    if code == ASD:
        if a < 0.0:
            comp[0] = 0
            return VIOLATION
        q = a / b
        dy[0] = 2.0 - q * q
        dy[1] = q
        return OK
    if code == FLOW9:
        if not a > 0.0:
            comp[0] = 0
            return EXIT
        q = a * a / (b * b)
        ric11 = 4.0 * q / (b * b)
        ric22 = 4.0 / (b * b) * (2.0 - q)
        if not ric22 > 0.0:
            comp[0] = 0
            return EXIT
        root = sqrt(ric11)
        dy[0] = a * 0.5 * ric22 / root
        dy[1] = b * 0.5 * root
        return OK
    if code == HITCHIN:
        if a < 0.0:
            comp[0] = 0
            return VIOLATION
        det = -2.0 * b * b
        dy[0] = (2.0 * a * a - 4.0 * b * b) / det
        dy[1] = (-2.0 * a * b) / det
        return OK
    comp[0] = -1
    return EXIT


cdef int rk4(int code, double k, int d, const double* y, double h, double* out, int* comp) nogil:
    cdef double k1[MAXDIM]
    cdef double k2[MAXDIM]
    cdef double k3[MAXDIM]
    cdef double k4[MAXDIM]
    cdef double tmp[MAXDIM]
    cdef int i, st
    st = c_rhs(code, k, y, k1, comp)
    if st != OK:
        return st
    for i in range(d):
        tmp[i] = y[i] + 0.5 * h * k1[i]
    st = c_rhs(code, k, tmp, k2, comp)
    if st != OK:
        return st
    for i in range(d):
        tmp[i] = y[i] + 0.5 * h * k2[i]
    st = c_rhs(code, k, tmp, k3, comp)
    if st != OK:
        return st
    for i in range(d):
        tmp[i] = y[i] + h * k3[i]
    st = c_rhs(code, k, tmp, k4, comp)
    if st != OK:
        return st
    for i in range(d):
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    for i in range(d):
        if not isfinite(out[i]):
            comp[0] = i
            return NONFINITE
        if metric(code, i) and out[i] < 0.0:
            comp[0] = i
            return VIOLATION
    return OK


def rhs(int code, double k, y):
    cdef double yy[MAXDIM]
    cdef double dy[MAXDIM]
    cdef int comp = -1, st, i, d = dim_of(code)
    for i in range(d):
        yy[i] = y[i]
    st = c_rhs(code, k, yy, dy, &comp)
    if st != OK:
        return st, comp, None
    return OK, -1, tuple(dy[i] for i in range(d))


def run(int code, double k, y0, double t0, double t_end, double h_max, bint adaptive,
        double rtol, double atol, double collapse_eps, double collapse_tol,
        double h_min, Py_ssize_t max_samples):
    cdef int d = dim_of(code)
    cdef double y[MAXDIM]
    cdef double full[MAXDIM]
    cdef double mid[MAXDIM]
    cdef double half[MAXDIM]
    cdef double dy[MAXDIM]
    cdef bint armed[MAXDIM]
    cdef double t = t0, h = h_max, hh, err, e
    cdef double anchor = t0, h_anchor = h_max
    cdef Py_ssize_t m = 0
    cdef double span_eps = 1e-14 * (fabs(t_end) if fabs(t_end) > 1.0 else 1.0)
    cdef int reason = REACHED_T_END, comp = -1, c = -1, st, i
    cdef bint last
    cdef Py_ssize_t n = 0, cap = 1024, j
    cdef double* buf
    cdef double* grown
    cdef double[:, ::1] view

    for i in range(d):
        y[i] = y0[i]
        armed[i] = metric(code, i) and y[i] >= collapse_eps

    buf = <double*> malloc(cap * (d + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            buf[0] = t
            for i in range(d):
                buf[1 + i] = y[i]
            n = 1
            while t_end - t > span_eps:
                last = h * (1.0 + 1e-9) >= t_end - t
                hh = t_end - t if last else h
                err = 0.0
                st = rk4(code, k, d, y, hh, full, &c)
                if st == OK and adaptive:
                    st = rk4(code, k, d, y, 0.5 * hh, mid, &c)
                    if st == OK:
                        st = rk4(code, k, d, mid, 0.5 * hh, half, &c)
                    if st == OK:
                        for i in range(d):
                            e = fabs(half[i] - full[i]) / (atol + rtol * fabs(half[i]))
                            if e > err:
                                err = e
                            full[i] = half[i]
                if st != OK:
                    if hh <= collapse_tol:
                        if st == VIOLATION and armed[c]:
                            reason = COLLAPSE
                        elif st == NONFINITE:
                            reason = NOT_FINITE
                        else:
                            reason = DOMAIN_EXIT
                        comp = c
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
                        anchor = t
                        m = 0
                        h_anchor = hh
                    m += 1
                    t = anchor + m * hh
                for i in range(d):
                    y[i] = full[i]
                if n == cap:
                    cap *= 2
                    grown = <double*> realloc(buf, cap * (d + 1) * sizeof(double))
                    if grown == NULL:
                        reason = -1
                        break
                    buf = grown
                buf[n * (d + 1)] = t
                for i in range(d):
                    buf[n * (d + 1) + 1 + i] = y[i]
                n += 1
                if n > max_samples:
                    reason = BUDGET
                    break
                for i in range(d):
                    if metric(code, i) and not armed[i] and y[i] >= collapse_eps:
                        armed[i] = True
                st = c_rhs(code, k, y, dy, &c)
                if st == OK:
                    for i in range(d):
                        if armed[i] and (y[i] < collapse_eps or (dy[i] < 0.0 and y[i] < -dy[i] * collapse_tol)):
                            reason = COLLAPSE
                            comp = i
                            break
                    if reason == COLLAPSE:
                        break
                if adaptive and err < 1.0 / 64.0:
                    h = 2.0 * hh if 2.0 * hh < h_max else h_max
        if reason == -1:
            raise MemoryError()
        out = np.empty((n, d + 1), dtype=np.float64)
        view = out
        for j in range(n):
            for i in range(d + 1):
                view[j, i] = buf[j * (d + 1) + i]
    finally:
        free(buf)
    return out[:, 0].copy(), out[:, 1:].copy(), reason, comp, t

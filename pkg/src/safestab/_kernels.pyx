# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch evaluation of the feedback laws.

Mirrors :mod:`safestab._kernels_py` entry point for entry point; selection
between the two happens in :mod:`safestab.kernels`.
"""

import numpy as np

from libc.math cimport cos, exp, fabs, hypot, isfinite, isinf, isnan, nextafter, pow, sin, INFINITY, NAN

DEF MAX_NUDGE = 8
DEF B1_TOL = 1e-12

cdef enum Law:
    KL = 0
    KM = 1
    KL_STAR = 2
    KM_STAR = 3
    KL_SHARP = 4
    KM_SHARP = 5

_LAWS = {"kl": KL, "km": KM, "kl_star": KL_STAR, "km_star": KM_STAR,
         "kl_sharp": KL_SHARP, "km_sharp": KM_SHARP}
_FORMULAS = {"sontag": 0, "freeman": 1}
_LAMBDAS = {"logistic": 0, "tanh": 1, "algebraic": 2}


cdef inline double c_sontag(double a, double b) noexcept nogil:
    cdef double r
    if b == 0.0:
        return 0.0
    r = hypot(a, b * b)
    if a > 0.0:
        return -(a + r) / b
    return -(b * b * b) / (r - a)


cdef inline double c_freeman(double a, double b) noexcept nogil:
    cdef double s
    if b == 0.0:
        return 0.0
    s = a + b * b
    if s < 0.0:
        s = 0.0
    return -s / b


cdef inline double c_phi(int formula, double a, double b) noexcept nogil:
    if formula == 0:
        return c_sontag(a, b)
    return c_freeman(a, b)


cdef inline void c_logistic_pair(double z, double* w_lo, double* w_hi) noexcept nogil:
    cdef double e
    if z >= 0.0:
        e = exp(-z)
        w_lo[0] = e / (1.0 + e)
        w_hi[0] = 1.0 / (1.0 + e)
    else:
        e = exp(z)
        w_lo[0] = 1.0 / (1.0 + e)
        w_hi[0] = e / (1.0 + e)


cdef inline void c_lambda_pair(int kind, double z, double* w_lo, double* w_hi) noexcept nogil:
    cdef double r, small, big, az
    if isnan(z):
        w_lo[0] = 0.5
        w_hi[0] = 0.5
    elif kind == 0:
        c_logistic_pair(z, w_lo, w_hi)
    elif kind == 1:
        c_logistic_pair(2.0 * z, w_lo, w_hi)
    elif isinf(z):
        if z > 0:
            w_lo[0] = 0.0
            w_hi[0] = 1.0
        else:
            w_lo[0] = 1.0
            w_hi[0] = 0.0
    else:
        az = fabs(z)
        r = hypot(1.0, z)
        small = 1.0 / (2.0 * r * (r + az))
        big = 0.5 + 0.5 * az / r
        if z >= 0.0:
            w_lo[0] = small
            w_hi[0] = big
        else:
            w_lo[0] = big
            w_hi[0] = small


cdef inline double c_interior(double u, double ai, double bi, double aj, double bj,
                              double lo, double hi) noexcept nogil:
    cdef int k
    for k in range(MAX_NUDGE):
        if u >= hi or ai + bi * u >= 0.0:
            u = nextafter(u, -INFINITY)
        elif u <= lo or aj + bj * u >= 0.0:
            u = nextafter(u, INFINITY)
        else:
            break
    return u


cdef inline bint c_mixed(double b0, double b1) noexcept nogil:
    return (b0 > 0.0 and b1 < 0.0) or (b0 < 0.0 and b1 > 0.0)


cdef double c_law(int law, int formula, int lam, double eta,
                  double a0, double b0, double a1, double b1) noexcept nogil:
    """Blended law value; NaN where the law is undefined."""
    cdef double p0, p1, ai, bi, aj, bj, lo, hi, phi_i, phi_j, w_lo, w_hi, u, target
    cdef bint use_m = (law == KM or law == KM_STAR or law == KM_SHARP)
    cdef bint star = law >= KL_STAR
    if not c_mixed(b0, b1):
        if b0 == 0.0 and b1 == 0.0:
            return 0.0
        p0 = c_phi(formula, a0, b0)
        p1 = c_phi(formula, a1, b1)
        if b0 >= 0.0 and b1 >= 0.0:
            return p0 if p0 < p1 else p1
        return p0 if p0 > p1 else p1
    if b0 > 0.0:
        ai = a0; bi = b0; aj = a1; bj = b1
    else:
        ai = a1; bi = b1; aj = a0; bj = b0
    lo = -aj / bj
    hi = -ai / bi
    if not lo < hi:
        if not star or fabs(b1) < B1_TOL:
            return NAN
        return -a1 / b1
    phi_i = c_phi(formula, ai, bi)
    phi_j = c_phi(formula, aj, bj)
    if use_m:
        target = (1.0 - eta) * hi + eta * lo
        if isnan(target):
            target = 0.0
        u = phi_i if phi_i > target else target
        if phi_j < u:
            u = phi_j
    else:
        c_lambda_pair(lam, lo + hi, &w_lo, &w_hi)
        u = w_lo * (phi_i if phi_i > lo else lo) + w_hi * (phi_j if phi_j < hi else hi)
    return c_interior(u, ai, bi, aj, bj, lo, hi)


def _code(table, name, what):
    try:
        return table[str(getattr(name, "value", name))]
    except KeyError:
        raise ValueError(f"unknown {what} {name!r}; expected one of {sorted(table)}") from None


def evaluate(a0, b0, a1, b1, law="kl", formula="sontag", lambda_kind="logistic",
             double eta=0.5, sq_norm=None, double c=1e5):
    cdef int law_c = _code(_LAWS, law, "law")
    cdef int formula_c = _code(_FORMULAS, formula, "formula")
    cdef int lam_c = _code(_LAMBDAS, lambda_kind, "lambda kind")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    arrs = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (a0, b0, a1, b1)))
    shape = arrs[0].shape
    cdef const double[::1] A0 = np.ascontiguousarray(arrs[0]).reshape(-1)
    cdef const double[::1] B0 = np.ascontiguousarray(arrs[1]).reshape(-1)
    cdef const double[::1] A1 = np.ascontiguousarray(arrs[2]).reshape(-1)
    cdef const double[::1] B1 = np.ascontiguousarray(arrs[3]).reshape(-1)
    cdef Py_ssize_t n = A0.shape[0], k
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef const double[::1] R2
    cdef bint sharp = law_c >= KL_SHARP
    cdef double cr2, phi0
    if sharp:
        if sq_norm is None:
            raise ValueError("sharp laws need sq_norm (squared state norms)")
        R2 = np.ascontiguousarray(np.broadcast_to(np.asarray(sq_norm, dtype=np.float64), shape)).reshape(-1)
    with nogil:
        for k in range(n):
            out[k] = c_law(law_c, formula_c, lam_c, eta, A0[k], B0[k], A1[k], B1[k])
            if sharp:
                cr2 = c * R2[k]
                phi0 = c_phi(formula_c, A0[k], B0[k])
                if cr2 == 0.0:
                    out[k] = phi0
                else:
                    out[k] = (cr2 / (1.0 + cr2)) * out[k] + (1.0 / (1.0 + cr2)) * phi0
    return out_arr.reshape(shape)


def phi(a, b, formula="sontag"):
    cdef int formula_c = _code(_FORMULAS, formula, "formula")
    arrs = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    shape = arrs[0].shape
    cdef const double[::1] A = np.ascontiguousarray(arrs[0]).reshape(-1)
    cdef const double[::1] B = np.ascontiguousarray(arrs[1]).reshape(-1)
    cdef Py_ssize_t n = A.shape[0], k
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for k in range(n):
            out[k] = c_phi(formula_c, A[k], B[k])
    return out_arr.reshape(shape)


def compatible(a0, b0, a1, b1):
    arrs = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (a0, b0, a1, b1)))
    shape = arrs[0].shape
    cdef const double[::1] A0 = np.ascontiguousarray(arrs[0]).reshape(-1)
    cdef const double[::1] B0 = np.ascontiguousarray(arrs[1]).reshape(-1)
    cdef const double[::1] A1 = np.ascontiguousarray(arrs[2]).reshape(-1)
    cdef const double[::1] B1 = np.ascontiguousarray(arrs[3]).reshape(-1)
    cdef Py_ssize_t n = A0.shape[0], k
    out_arr = np.empty(n, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    with nogil:
        for k in range(n):
            if not c_mixed(B0[k], B1[k]):
                out[k] = 1
            elif B0[k] > 0.0:
                out[k] = (-A1[k] / B1[k]) < (-A0[k] / B0[k])
            else:
                out[k] = (-A0[k] / B0[k]) < (-A1[k] / B1[k])
    return out_arr.reshape(shape)


_SIM_LAWS = {"kl": KL, "km": KM, "kl_star": KL_STAR, "km_star": KM_STAR,
             "kl_sharp": KL_SHARP, "km_sharp": KM_SHARP,
             "clf_only_sontag": 6, "clf_only_freeman": 7}

cdef struct Params:
    double k1, k2, q, d1, d2


cdef inline void ex_rhs(Params* p, double x1, double x2, double u,
                        double* dx1, double* dx2) noexcept nogil:
    dx1[0] = x1 + sin(x1) + x2
    dx2[0] = pow(x1, 3.0) + (1.0 + x1 * x1) * u


def simulate_example(params, double x1, double x2, law="kl_sharp", formula="sontag",
                     lambda_kind="logistic", double eta=0.5, double c=1e5, double dt=1e-3,
                     Py_ssize_t steps=10000, double stop_tol=1e-6, double h_abort=1.0,
                     bint abort_on_violation=False):
    """Closed loop of the builtin planar example under one law.

    Returns ``(columns, stop_reason)`` where ``columns`` is a float array of
    shape ``(m, 9)`` holding ``t, x1, x2, u, V, h, mode, F0, F1`` per sample.
    """
    cdef int law_c = _code(_SIM_LAWS, law, "law")
    cdef int formula_c = _code(_FORMULAS, formula, "formula")
    cdef int lam_c = _code(_LAMBDAS, lambda_kind, "lambda kind")
    cdef Params p
    p.k1, p.k2, p.q, p.d1, p.d2 = (float(params[k]) for k in ("k1", "k2", "q", "d1", "d2"))
    out_arr = np.empty((steps + 1, 9), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t k = 0
    # 0 t_end, 1 converged, 2 safety_abort, 3 diverged, 4 undefined law, 5 non-finite Lie data
    cdef int reason = 0
    cdef bint aborted = False
    cdef double s, gv0, gv1, f0, f1, g1, alpha, hx, gh0, a0, b0, a1, b1, u, cr2, phi0, V
    cdef double ka1, ka2, kb1, kb2, kc1, kc2, kd1, kd2, n1, n2, lo, hi
    cdef bint mixed, compat
    with nogil:
        while True:
            s = x2 + (p.k1 + 1.0) * x1 + sin(x1)
            gv0 = x1 + s * (p.k1 + 1.0 + cos(x1))
            gv1 = s
            f0 = x1 + sin(x1) + x2
            f1 = pow(x1, 3.0)
            g1 = 1.0 + x1 * x1
            alpha = 0.5 * (p.k1 * pow(x1, 2.0) + p.k2 * s * s)
            hx = x2 + p.q * pow(x1 - p.d1, 2.0) + p.d2
            gh0 = 2.0 * p.q * (x1 - p.d1)
            a0 = gv0 * f0 + gv1 * f1 + alpha
            b0 = gv0 * 0.0 + gv1 * g1
            a1 = -(gh0 * f0 + 1.0 * f1) - hx
            b1 = -(gh0 * 0.0 + 1.0 * g1)
            V = 0.5 * pow(x1, 2.0) + 0.5 * s * s
            if not (isfinite(a0) and isfinite(b0) and isfinite(a1) and isfinite(b1)
                    and isfinite(V) and isfinite(hx)):
                reason = 5
                break
            if law_c == 6:
                u = c_sontag(a0, b0)
            elif law_c == 7:
                u = c_freeman(a0, b0)
            else:
                u = c_law(law_c, formula_c, lam_c, eta, a0, b0, a1, b1)
                if law_c >= KL_SHARP:
                    cr2 = c * (x1 * x1 + x2 * x2)
                    phi0 = c_phi(formula_c, a0, b0)
                    if cr2 == 0.0:
                        u = phi0
                    else:
                        u = (cr2 / (1.0 + cr2)) * u + (1.0 / (1.0 + cr2)) * phi0
            if isnan(u):
                reason = 4
                break
            mixed = c_mixed(b0, b1)
            compat = True
            if mixed:
                if b0 > 0.0:
                    compat = (-a1 / b1) < (-a0 / b0)
                else:
                    compat = (-a0 / b0) < (-a1 / b1)
            out[k, 0] = k * dt
            out[k, 1] = x1
            out[k, 2] = x2
            out[k, 3] = u
            out[k, 4] = V
            out[k, 5] = hx
            out[k, 6] = 1.0 if compat else 0.0
            out[k, 7] = a0 + b0 * u
            out[k, 8] = a1 + b1 * u
            if hypot(x1, x2) < stop_tol:
                reason = 1
                break
            if hx < -h_abort and not aborted:
                aborted = True
                if abort_on_violation:
                    reason = 2
                    break
            if k == steps:
                break
            ex_rhs(&p, x1, x2, u, &ka1, &ka2)
            ex_rhs(&p, x1 + 0.5 * dt * ka1, x2 + 0.5 * dt * ka2, u, &kb1, &kb2)
            ex_rhs(&p, x1 + 0.5 * dt * kb1, x2 + 0.5 * dt * kb2, u, &kc1, &kc2)
            ex_rhs(&p, x1 + dt * kc1, x2 + dt * kc2, u, &kd1, &kd2)
            n1 = x1 + (dt / 6.0) * (ka1 + 2.0 * kb1 + 2.0 * kc1 + kd1)
            n2 = x2 + (dt / 6.0) * (ka2 + 2.0 * kb2 + 2.0 * kc2 + kd2)
            if not (isfinite(n1) and isfinite(n2)):
                reason = 3
                break
            x1 = n1
            x2 = n2
            k += 1
    names = ("t_end", "converged", "safety_abort", "diverged", "undefined", "nonfinite")
    m = k if reason >= 4 else k + 1
    return out_arr[:m], names[reason]

"""Numpy implementation of the batch law kernels.

Same entry points and semantics as the compiled module: ``evaluate``,
``phi`` and ``compatible`` over broadcastable arrays of Lie data. Entries
where a law is undefined come back as NaN instead of raising.
"""

import math

import numpy as np

_MAX_NUDGE = 8
_B1_TOL = 1e-12

_LAWS = ("kl", "km", "kl_star", "km_star", "kl_sharp", "km_sharp")
_FORMULAS = ("sontag", "freeman")
_LAMBDAS = ("logistic", "tanh", "algebraic")


def _name(value, allowed, what):
    name = str(getattr(value, "value", value))
    if name not in allowed:
        raise ValueError(f"unknown {what} {value!r}; expected one of {sorted(allowed)}")
    return name


def _arrays(*vals):
    return np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in vals))


def _phi(formula, a, b):
    out = np.zeros(np.broadcast(a, b).shape)
    nz = b != 0.0
    a, b = np.broadcast_to(a, out.shape)[nz], np.broadcast_to(b, out.shape)[nz]
    if formula == "sontag":
        r = np.hypot(a, b * b)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out[nz] = np.where(a > 0.0, -(a + r) / b, -(b * b * b) / (r - a))
    else:
        with np.errstate(over="ignore"):
            out[nz] = -np.maximum(a + b * b, 0.0) / b
    return out


def _logistic_pair(z):
    with np.errstate(over="ignore"):
        e = np.exp(-np.abs(z))
    small = e / (1.0 + e)
    big = 1.0 / (1.0 + e)
    pos = z >= 0.0
    return np.where(pos, small, big), np.where(pos, big, small)


def _lambda_pair(kind, z):
    if kind == "logistic":
        w_lo, w_hi = _logistic_pair(z)
    elif kind == "tanh":
        w_lo, w_hi = _logistic_pair(2.0 * z)
    else:
        az = np.abs(z)
        r = np.hypot(1.0, z)
        with np.errstate(invalid="ignore", over="ignore"):
            small = 1.0 / (2.0 * r * (r + az))
            big = np.where(np.isinf(z), 1.0, 0.5 + 0.5 * az / r)
        pos = z >= 0.0
        w_lo, w_hi = np.where(pos, small, big), np.where(pos, big, small)
    nan = np.isnan(z)
    return np.where(nan, 0.5, w_lo), np.where(nan, 0.5, w_hi)


def _interior(u, ai, bi, aj, bj, lo, hi):
    for _ in range(_MAX_NUDGE):
        down = (u >= hi) | (ai + bi * u >= 0.0)
        up = ~down & ((u <= lo) | (aj + bj * u >= 0.0))
        if not (down.any() or up.any()):
            break
        u = np.where(down, np.nextafter(u, -np.inf), np.where(up, np.nextafter(u, np.inf), u))
    return u


def _law(law, formula, lam, eta, a0, b0, a1, b1):
    use_m = law in ("km", "km_star", "km_sharp")
    star = law != "kl" and law != "km"
    p0 = _phi(formula, a0, b0)
    p1 = _phi(formula, a1, b1)
    mixed = ((b0 > 0.0) & (b1 < 0.0)) | ((b0 < 0.0) & (b1 > 0.0))
    both_nonneg = (b0 >= 0.0) & (b1 >= 0.0)
    out = np.where(both_nonneg, np.minimum(p0, p1), np.maximum(p0, p1))
    out = np.where((b0 == 0.0) & (b1 == 0.0), 0.0, out)
    if not mixed.any():
        return out

    pos0 = b0 > 0.0
    ai, bi = np.where(pos0, a0, a1), np.where(pos0, b0, b1)
    aj, bj = np.where(pos0, a1, a0), np.where(pos0, b1, b0)
    phi_i, phi_j = np.where(pos0, p0, p1), np.where(pos0, p1, p0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lo = -aj / bj
        hi = -ai / bi
        ok = lo < hi
        if use_m:
            target = (1.0 - eta) * hi + eta * lo
            target = np.where(np.isnan(target), 0.0, target)
            u = np.minimum(phi_j, np.maximum(phi_i, target))
        else:
            w_lo, w_hi = _lambda_pair(lam, lo + hi)
            u = w_lo * np.maximum(phi_i, lo) + w_hi * np.minimum(phi_j, hi)
        u = _interior(u, ai, bi, aj, bj, lo, hi)
        if star:
            track = np.where(np.abs(b1) < _B1_TOL, np.nan, -a1 / b1)
        else:
            track = np.nan
    blended = np.where(ok, u, track)
    return np.where(mixed, blended, out)


def evaluate(a0, b0, a1, b1, law="kl", formula="sontag", lambda_kind="logistic",
             eta=0.5, sq_norm=None, c=1e5):
    law = _name(law, _LAWS, "law")
    formula = _name(formula, _FORMULAS, "formula")
    lam = _name(lambda_kind, _LAMBDAS, "lambda kind")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    a0, b0, a1, b1 = _arrays(a0, b0, a1, b1)
    out = _law(law, formula, lam, float(eta), a0, b0, a1, b1)
    if law.endswith("_sharp"):
        if sq_norm is None:
            raise ValueError("sharp laws need sq_norm (squared state norms)")
        cr2 = c * np.broadcast_to(np.asarray(sq_norm, dtype=np.float64), out.shape)
        phi0 = _phi(formula, a0, b0)
        with np.errstate(invalid="ignore"):
            mixed = (cr2 / (1.0 + cr2)) * out + (1.0 / (1.0 + cr2)) * phi0
        out = np.where(cr2 == 0.0, phi0, mixed)
    return np.asarray(out, dtype=np.float64).reshape(a0.shape)


def phi(a, b, formula="sontag"):
    formula = _name(formula, _FORMULAS, "formula")
    a, b = _arrays(a, b)
    return _phi(formula, a, b).reshape(a.shape)


def compatible(a0, b0, a1, b1):
    a0, b0, a1, b1 = _arrays(a0, b0, a1, b1)
    mixed = ((b0 > 0.0) & (b1 < 0.0)) | ((b0 < 0.0) & (b1 > 0.0))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r0 = -a0 / b0
        r1 = -a1 / b1
    ordered = np.where(b0 > 0.0, r1 < r0, r0 < r1)
    return np.where(mixed, ordered, True)


_SIM_LAWS = _LAWS + ("clf_only_sontag", "clf_only_freeman")
_STOP = ("t_end", "converged", "safety_abort", "diverged", "undefined", "nonfinite")


def _scalar_law(law, cfg, c):
    from .blend import k_l, k_m
    from .errors import SafeStabError
    from .formulas import universal
    from .plant import LieData
    from .priority import k_l_star, k_m_star

    base = {"kl": k_l, "km": k_m, "kl_star": k_l_star, "km_star": k_m_star,
            "kl_sharp": k_l_star, "km_sharp": k_m_star}.get(law)

    def control(a0, b0, a1, b1, r2):
        if law == "clf_only_sontag":
            return universal("sontag", a0, b0)
        if law == "clf_only_freeman":
            return universal("freeman", a0, b0)
        try:
            u = base(LieData(a0, b0, a1, b1), cfg)
        except SafeStabError:
            return math.nan
        if law.endswith("_sharp"):
            cr2 = c * r2
            phi0 = universal(cfg.formula, a0, b0)
            if cr2 == 0.0:
                return phi0
            return (cr2 / (1.0 + cr2)) * u + (1.0 / (1.0 + cr2)) * phi0
        return u

    return control


def _example_lie(k1, k2, q, d1, d2, x1, x2):
    """``(a0, b0, a1, b1, V, h)`` of the builtin example, or None on overflow."""
    try:
        s = x2 + (k1 + 1.0) * x1 + math.sin(x1)
        gv0 = x1 + s * (k1 + 1.0 + math.cos(x1))
        f0 = x1 + math.sin(x1) + x2
        f1 = x1 ** 3
        g1 = 1.0 + x1 * x1
        hx = x2 + q * (x1 - d1) ** 2 + d2
        gh0 = 2.0 * q * (x1 - d1)
        a0 = gv0 * f0 + s * f1 + 0.5 * (k1 * x1 ** 2 + k2 * s * s)
        b0 = gv0 * 0.0 + s * g1
        a1 = -(gh0 * f0 + 1.0 * f1) - hx
        b1 = -(gh0 * 0.0 + 1.0 * g1)
        V = 0.5 * x1 ** 2 + 0.5 * s * s
    except OverflowError:
        return None
    vals = (a0, b0, a1, b1, V, hx)
    return vals if all(math.isfinite(v) for v in vals) else None


def _example_step(x1, x2, u, dt):
    def rhs(y1, y2):
        return y1 + math.sin(y1) + y2, y1 ** 3 + (1.0 + y1 * y1) * u

    try:
        ka = rhs(x1, x2)
        kb = rhs(x1 + 0.5 * dt * ka[0], x2 + 0.5 * dt * ka[1])
        kc = rhs(x1 + 0.5 * dt * kb[0], x2 + 0.5 * dt * kb[1])
        kd = rhs(x1 + dt * kc[0], x2 + dt * kc[1])
        n1 = x1 + (dt / 6.0) * (ka[0] + 2.0 * kb[0] + 2.0 * kc[0] + kd[0])
        n2 = x2 + (dt / 6.0) * (ka[1] + 2.0 * kb[1] + 2.0 * kc[1] + kd[1])
    except OverflowError:
        return math.inf, math.inf
    return n1, n2


def simulate_example(params, x1, x2, law="kl_sharp", formula="sontag", lambda_kind="logistic",
                     eta=0.5, c=1e5, dt=1e-3, steps=10000, stop_tol=1e-6, h_abort=1.0,
                     abort_on_violation=False):
    from .blend import BlendConfig

    law = _name(law, _SIM_LAWS, "law")
    cfg = BlendConfig(_name(formula, _FORMULAS, "formula"), _name(lambda_kind, _LAMBDAS, "lambda kind"), eta)
    control = _scalar_law(law, cfg, c)
    k1, k2, q, d1, d2 = (float(params[k]) for k in ("k1", "k2", "q", "d1", "d2"))
    x1, x2 = float(x1), float(x2)
    out = np.empty((steps + 1, 9))
    reason = 0
    aborted = False
    k = 0
    while True:
        lie = _example_lie(k1, k2, q, d1, d2, x1, x2)
        if lie is None:
            reason = 5
            break
        a0, b0, a1, b1, V, hx = lie
        u = control(a0, b0, a1, b1, x1 * x1 + x2 * x2)
        if math.isnan(u):
            reason = 4
            break
        compat = True
        if (b0 > 0.0 and b1 < 0.0) or (b0 < 0.0 and b1 > 0.0):
            compat = (-a1 / b1) < (-a0 / b0) if b0 > 0.0 else (-a0 / b0) < (-a1 / b1)
        out[k] = (k * dt, x1, x2, u, V, hx, 1.0 if compat else 0.0, a0 + b0 * u, a1 + b1 * u)
        if math.hypot(x1, x2) < stop_tol:
            reason = 1
            break
        if hx < -h_abort and not aborted:
            aborted = True
            if abort_on_violation:
                reason = 2
                break
        if k == steps:
            break
        n1, n2 = _example_step(x1, x2, u, dt)
        if not (math.isfinite(n1) and math.isfinite(n2)):
            reason = 3
            break
        x1, x2 = n1, n2
        k += 1
    m = k if reason >= 4 else k + 1
    return out[:m], _STOP[reason]

"""Complex error function and imaginary error function.

``cerf`` reduces its argument to the closed first quadrant with the symmetries
erf(-z) = -erf(z) and erf(conj z) = conj erf(z), then picks one of three
evaluations so that no branch suffers more than a few hundred ulps of
cancellation for |z| <= 8:

* Maclaurin series where the real part is small (|z| <= 8 and Re z <= 1.5, or
  |z| <= 2);
* the scaled series erf(z) = 2/sqrt(pi) e^{-z^2} sum (2z^2)^k z / (2k+1)!!
  near the real axis (Im z <= 1.5, Re z <= 6);
* the Laplace continued fraction for erfc everywhere else.

Results whose magnitude exceeds the float range saturate to the largest
finite double and are reported as inaccurate.
"""

import numpy as np

_TWO_OVER_SQRTPI = 2.0 / np.sqrt(np.pi)
_INV_SQRTPI = 1.0 / np.sqrt(np.pi)
_EPS = 2.0**-56
_MAXF = np.finfo(float).max
_LOG_MAXF = np.log(_MAXF)


def _maclaurin(w):
    w2 = w * w
    term = w.copy()
    total = w.copy()
    active = np.ones(w.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term = term * (-w2) / k
        contrib = term / (2 * k + 1)
        total = total + np.where(active, contrib, 0.0)
        active &= (np.abs(contrib) > _EPS * np.abs(total)) | (k < np.abs(w2))
        if k > 2000:
            break
    return _TWO_OVER_SQRTPI * total


def _scaled_series(w):
    w2 = w * w
    term = w.copy()
    total = w.copy()
    active = np.ones(w.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term = term * (2.0 * w2) / (2 * k + 1)
        total = total + np.where(active, term, 0.0)
        active &= (np.abs(term) > _EPS * np.abs(total)) | (k < 2 * np.abs(w2))
        if k > 2000:
            break
    return _TWO_OVER_SQRTPI * np.exp(-w2) * total


def _erfc_cf(w, max_iter=5000):
    """erfc by modified Lentz evaluation of the Laplace continued fraction."""
    tiny = 1e-300
    f = w.copy()
    f[f == 0] = tiny
    C = f.copy()
    D = np.zeros_like(w)
    active = np.ones(w.shape, dtype=bool)
    for n in range(1, max_iter + 1):
        a = 0.5 * n
        D = w + a * D
        D[D == 0] = tiny
        D = 1.0 / D
        C = w + a / C
        C[C == 0] = tiny
        delta = C * D
        f = np.where(active, f * delta, f)
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            break
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(-w * w) * _INV_SQRTPI / f


def cerf(z, full_output=False):
    """Error function of a complex argument.

    Relative accuracy is about 1e-13 for |z| <= 8 away from the complex zeros
    of erf. With ``full_output=True`` returns ``(value, accurate)`` where
    ``accurate`` is False wherever the result saturated.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)

    flip = z.real < 0
    w = np.where(flip, -z, z)
    conj = w.imag < 0
    w = np.where(conj, np.conj(w), w)
    x, y, r = w.real, w.imag, np.abs(w)

    in_a = (r <= 8.0) & ((x <= 1.5) | (r <= 2.0))
    in_b = ~in_a & (y <= 1.5) & (x <= 6.0)
    in_c = ~(in_a | in_b)

    out = np.empty_like(w)
    if in_a.any():
        out[in_a] = _maclaurin(w[in_a])
    if in_b.any():
        out[in_b] = _scaled_series(w[in_b])
    if in_c.any():
        wc = w[in_c]
        out[in_c] = 1.0 - _erfc_cf(wc)

    # |erf| ~ e^{y^2-x^2}; anything past the float range saturates
    overflow = (y * y - x * x > _LOG_MAXF - 2.0) | ~np.isfinite(out)
    if overflow.any():
        wo = w[overflow]
        # direction of the dominant term -e^{-w^2} / (w sqrt(pi))
        direction = -np.exp(-2j * wo.real * wo.imag) * np.conj(wo) / np.abs(wo)
        out[overflow] = _MAXF * direction
    accurate = ~overflow

    out = np.where(conj, np.conj(out), out)
    out = np.where(flip, -out, out)
    if scalar:
        out, accurate = complex(out[0]), bool(accurate[0])
    if full_output:
        return out, accurate
    return out


def erfi(z, full_output=False):
    """Imaginary error function erfi(z) = -i erf(iz)."""
    z = np.asarray(z, dtype=complex)
    val, ok = cerf(1j * z, full_output=True)
    val = -1j * np.asarray(val)
    if z.ndim == 0:
        val = complex(val)
    if full_output:
        return val, ok
    return val

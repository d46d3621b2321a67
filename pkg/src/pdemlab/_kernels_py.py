"""Pure-Python reference implementations of the hot loops.

These mirror ``_kernels.pyx`` line for line and are used whenever the
compiled extension is missing or ``PDEMLAB_KERNELS=python`` is set.
"""
import math

import numpy as np

# rescale threshold for the Hermite recurrence and the matching power of two
_HUGE = 1e280
_SHIFT = 930


def cn_propagate(diag, off, chi0, tau, nsteps, h):
    """Advance ``chi0`` by ``nsteps`` Crank-Nicolson steps.

    Solves ``(I + i tau H) chi_new = (I - i tau H) chi`` with ``H`` the real
    symmetric tridiagonal matrix given by ``diag`` and ``off``.  ``tau`` is
    ``dt / (2 hbar)``.  Returns the final state and the discrete norm
    ``h * sum |chi|^2`` recorded before the first and after every step.
    """
    d = [float(v) for v in diag]
    e = [float(v) for v in off]
    chi = [complex(v) for v in chi0]
    n = len(d)
    it = 1j * tau

    # Thomas factorisation of A = I + i tau H, done once
    cp = [0j] * n
    inv = [0j] * n
    den = 1.0 + it * d[0]
    inv[0] = 1.0 / den
    for i in range(n - 1):
        cp[i] = it * e[i] * inv[i]
        den = (1.0 + it * d[i + 1]) - it * e[i] * cp[i]
        inv[i + 1] = 1.0 / den

    norms = [h * sum(abs(v) ** 2 for v in chi)]
    rhs = [0j] * n
    for _ in range(nsteps):
        # rhs = (I - i tau H) chi
        if n == 1:
            rhs[0] = (1.0 - it * d[0]) * chi[0]
        else:
            rhs[0] = (1.0 - it * d[0]) * chi[0] - it * e[0] * chi[1]
            for i in range(1, n - 1):
                rhs[i] = (1.0 - it * d[i]) * chi[i] - it * (e[i - 1] * chi[i - 1] + e[i] * chi[i + 1])
            rhs[n - 1] = (1.0 - it * d[n - 1]) * chi[n - 1] - it * e[n - 2] * chi[n - 2]
        # forward sweep
        rhs[0] = rhs[0] * inv[0]
        for i in range(1, n):
            rhs[i] = (rhs[i] - it * e[i - 1] * rhs[i - 1]) * inv[i]
        # back substitution
        chi[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            chi[i] = rhs[i] - cp[i] * chi[i + 1]
        norms.append(h * sum(v.real * v.real + v.imag * v.imag for v in chi))
    return np.array(chi, dtype=complex), np.array(norms)


def hermite_scaled(n, x):
    """Physicists' Hermite polynomial as ``(mantissa, exponent)`` arrays.

    ``H_n(x) = mantissa * 2**exponent``; the upward recurrence is rescaled by
    ``2**-930`` whenever a value exceeds 1e280, so no intermediate overflows.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    mant = np.empty(xs.shape)
    expo = np.zeros(xs.shape, dtype=np.int64)
    for j, xv in enumerate(xs.flat):
        xv = float(xv)
        if n == 0:
            mant.flat[j] = 1.0
            continue
        h0, h1, e2 = 1.0, 2.0 * xv, 0
        for k in range(1, n):
            h2 = 2.0 * xv * h1 - 2.0 * k * h0
            if abs(h2) > _HUGE:
                h2 = math.ldexp(h2, -_SHIFT)
                h1 = math.ldexp(h1, -_SHIFT)
                e2 += _SHIFT
            h0, h1 = h1, h2
        mant.flat[j] = h1
        expo.flat[j] = e2
    return mant, expo


def kummer_terminating(n, b, x):
    """Terminating Kummer series M(-n, b, x) with Neumaier summation."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape)
    for j, xv in enumerate(xs.flat):
        xv = float(xv)
        term = 1.0
        s = 1.0
        comp = 0.0
        for k in range(n):
            term *= (k - n) / ((b + k) * (k + 1.0)) * xv
            t = s + term
            if abs(s) >= abs(term):
                comp += (s - t) + term
            else:
                comp += (term - t) + s
            s = t
        out.flat[j] = s + comp
    return out

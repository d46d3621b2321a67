# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Semantics match ``_kernels_py`` exactly."""
import numpy as np

from libc.math cimport fabs, ldexp

cdef double _HUGE = 1e280
cdef int _SHIFT = 930


def cn_propagate(diag, off, chi0, double tau, Py_ssize_t nsteps, double h):
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    out = np.array(chi0, dtype=np.complex128, copy=True)
    cdef double complex[::1] chi = out
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, step
    cdef double complex it = 1j * tau
    cdef double complex den
    cdef double acc
    cp_arr = np.zeros(n, dtype=np.complex128)
    inv_arr = np.zeros(n, dtype=np.complex128)
    rhs_arr = np.zeros(n, dtype=np.complex128)
    norms_arr = np.empty(nsteps + 1, dtype=np.float64)
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] inv = inv_arr
    cdef double complex[::1] rhs = rhs_arr
    cdef double[::1] norms = norms_arr

    den = 1.0 + it * d[0]
    inv[0] = 1.0 / den
    for i in range(n - 1):
        cp[i] = it * e[i] * inv[i]
        den = (1.0 + it * d[i + 1]) - it * e[i] * cp[i]
        inv[i + 1] = 1.0 / den

    acc = 0.0
    for i in range(n):
        acc += chi[i].real * chi[i].real + chi[i].imag * chi[i].imag
    norms[0] = h * acc

    for step in range(nsteps):
        if n == 1:
            rhs[0] = (1.0 - it * d[0]) * chi[0]
        else:
            rhs[0] = (1.0 - it * d[0]) * chi[0] - it * e[0] * chi[1]
            for i in range(1, n - 1):
                rhs[i] = (1.0 - it * d[i]) * chi[i] - it * (e[i - 1] * chi[i - 1] + e[i] * chi[i + 1])
            rhs[n - 1] = (1.0 - it * d[n - 1]) * chi[n - 1] - it * e[n - 2] * chi[n - 2]
        rhs[0] = rhs[0] * inv[0]
        for i in range(1, n):
            rhs[i] = (rhs[i] - it * e[i - 1] * rhs[i - 1]) * inv[i]
        chi[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            chi[i] = rhs[i] - cp[i] * chi[i + 1]
        acc = 0.0
        for i in range(n):
            acc += chi[i].real * chi[i].real + chi[i].imag * chi[i].imag
        norms[step + 1] = h * acc
    return out, norms_arr


def hermite_scaled(int n, x):
    xs_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel())
    shape = np.atleast_1d(np.asarray(x)).shape
    cdef double[::1] xs = xs_arr
    cdef Py_ssize_t m = xs.shape[0]
    mant_arr = np.empty(m, dtype=np.float64)
    expo_arr = np.zeros(m, dtype=np.int64)
    cdef double[::1] mant = mant_arr
    cdef long long[::1] expo = expo_arr
    cdef Py_ssize_t j
    cdef int k
    cdef double xv, h0, h1, h2
    cdef long long e2
    for j in range(m):
        xv = xs[j]
        if n == 0:
            mant[j] = 1.0
            continue
        h0 = 1.0
        h1 = 2.0 * xv
        e2 = 0
        for k in range(1, n):
            h2 = 2.0 * xv * h1 - 2.0 * k * h0
            if fabs(h2) > _HUGE:
                h2 = ldexp(h2, -_SHIFT)
                h1 = ldexp(h1, -_SHIFT)
                e2 += _SHIFT
            h0 = h1
            h1 = h2
        mant[j] = h1
        expo[j] = e2
    return mant_arr.reshape(shape), expo_arr.reshape(shape)


def kummer_terminating(int n, double b, x):
    xs_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel())
    shape = np.atleast_1d(np.asarray(x)).shape
    cdef double[::1] xs = xs_arr
    cdef Py_ssize_t m = xs.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j
    cdef int k
    cdef double xv, term, s, comp, t
    for j in range(m):
        xv = xs[j]
        term = 1.0
        s = 1.0
        comp = 0.0
        for k in range(n):
            term *= (k - n) / ((b + k) * (k + 1.0)) * xv
            t = s + term
            if fabs(s) >= fabs(term):
                comp += (s - t) + term
            else:
                comp += (term - t) + s
            s = t
        out[j] = s + comp
    return out_arr.reshape(shape)

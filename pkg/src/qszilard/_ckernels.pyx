# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the summation kernels in ``_pykernels``."""
from libc.math cimport exp, pow
from libc.stdlib cimport malloc, free


cdef inline double _gap(double scale, double alpha, long n) noexcept nogil:
    cdef double dn = <double>n
    if alpha == 2.0:
        return scale * ((dn - 1.0) * (dn + 1.0))
    return scale * (pow(dn, alpha) - 1.0)


def scaled_power_sums(double coef, double alpha, double beta, long n_terms, int n_powers, long first=1):
    cdef double *acc = <double *>malloc(2 * n_powers * sizeof(double))
    cdef double *comp
    cdef double scale = beta * coef
    cdef double x, xk, t, s
    cdef long n
    cdef int k
    if acc == NULL:
        raise MemoryError()
    comp = acc + n_powers
    for k in range(n_powers):
        acc[k] = 0.0
        comp[k] = 0.0
    with nogil:
        for n in range(first, n_terms + 1):
            x = exp(-_gap(scale, alpha, n))
            xk = x
            for k in range(n_powers):
                # Neumaier compensation
                s = acc[k]
                t = s + xk
                if s >= xk:
                    comp[k] += (s - t) + xk
                else:
                    comp[k] += (xk - t) + s
                acc[k] = t
                xk = xk * x
    out = [acc[k] + comp[k] for k in range(n_powers)]
    free(acc)
    return out


def scaled_complete_symmetric(double coef, double alpha, double beta, long n_terms, int n_particles):
    cdef double *h = <double *>malloc((n_particles + 1) * sizeof(double))
    cdef double scale = beta * coef
    cdef double x
    cdef long j
    cdef int n
    if h == NULL:
        raise MemoryError()
    h[0] = 1.0
    for n in range(1, n_particles + 1):
        h[n] = 0.0
    with nogil:
        for j in range(1, n_terms + 1):
            x = exp(-_gap(scale, alpha, j))
            for n in range(1, n_particles + 1):
                h[n] += x * h[n - 1]
    out = [h[n] for n in range(n_particles + 1)]
    free(h)
    return out


def scaled_elementary_symmetric(double coef, double alpha, double beta, long n_terms, int n_particles):
    cdef double *e = <double *>malloc(2 * (n_particles + 1) * sizeof(double))
    cdef double *pows
    cdef double scale = beta * coef
    cdef double ja
    cdef long j
    cdef int n, top
    if e == NULL:
        raise MemoryError()
    pows = e + n_particles + 1
    e[0] = 1.0
    for n in range(1, n_particles + 1):
        e[n] = 0.0
        pows[n] = pow(<double>n, alpha)
    with nogil:
        for j in range(1, n_terms + 1):
            ja = pow(<double>j, alpha)
            top = n_particles if j > n_particles else <int>j
            for n in range(top, 0, -1):
                e[n] += exp(-scale * (ja - pows[n])) * e[n - 1]
    out = [e[n] for n in range(n_particles + 1)]
    free(e)
    return out

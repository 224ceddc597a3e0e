"""Compiled bit-mask kernels for the two automaton gates.

Each kernel makes a single in-place pass over the flat amplitude vector and
touches every amplitude pair exactly once.
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
else:
    HAVE_NUMBA = True


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _parity(v):
        p = 0
        while v:
            v &= v - 1
            p ^= 1
        return p

    @njit(cache=True, nogil=True)
    def pauli_rotation(psi, flip, zmask, c, s, base):
        # psi <- cos(theta) psi + i sin(theta) base (-1)^{|i & zmask|} psi[i ^ flip]
        n = psi.shape[0]
        if flip == 0:
            for i in range(n):
                coef = base if _parity(i & zmask) == 0 else -base
                psi[i] *= c + s * coef
            return
        for i in range(n):
            j = i ^ flip
            if j < i:
                continue
            ci = base if _parity(i & zmask) == 0 else -base
            cj = base if _parity(j & zmask) == 0 else -base
            a = psi[i]
            b = psi[j]
            psi[i] = c * a + s * ci * b
            psi[j] = c * b + s * cj * a

    @njit(cache=True, nogil=True)
    def swap_rotation(psi, ma, mb, c, s):
        # rotate the |A=0,B=1>, |A=1,B=0> pair of every block
        n = psi.shape[0]
        both = ma | mb
        for i in range(n):
            if (i & both) == mb:
                j = i ^ both
                a = psi[i]
                b = psi[j]
                psi[i] = c * a + s * b
                psi[j] = c * b + s * a

    @njit(cache=True, nogil=True)
    def pauli_expectation(psi, flip, zmask, base):
        acc = 0.0 + 0.0j
        for i in range(psi.shape[0]):
            coef = base if _parity(i & zmask) == 0 else -base
            acc += np.conj(psi[i]) * coef * psi[i ^ flip]
        return acc

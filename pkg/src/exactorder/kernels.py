"""Hot loops of the sparse simulator.

Every kernel exists twice: a numba loop (``*_numba``) and a vectorized numpy
version (``*_numpy``). The public name is bound to one of them according to
``exactorder._jit.USE_NUMBA``; both stay importable so tests and the benchmark
can compare them.

Sparse vectors are given as a strictly increasing int64 index array plus a
complex128 amplitude array of the same length.
"""

import numpy as np

from ._jit import USE_NUMBA, njit


# -- inner product <a|b> over sorted sparse vectors ---------------------------

def _sparse_inner_py(ia, aa, ib, ab):
    # Neumaier-compensated: the sum runs over up to millions of terms
    i = 0
    j = 0
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    na = ia.shape[0]
    nb = ib.shape[0]
    while i < na and j < nb:
        if ia[i] == ib[j]:
            z = aa[i].conjugate() * ab[j]
            t = sr + z.real
            if abs(sr) >= abs(z.real):
                cr += (sr - t) + z.real
            else:
                cr += (z.real - t) + sr
            sr = t
            t = si + z.imag
            if abs(si) >= abs(z.imag):
                ci += (si - t) + z.imag
            else:
                ci += (z.imag - t) + si
            si = t
            i += 1
            j += 1
        elif ia[i] < ib[j]:
            i += 1
        else:
            j += 1
    return complex(sr + cr, si + ci)


sparse_inner_numba = njit(_sparse_inner_py)


def sparse_inner_numpy(ia, aa, ib, ab):
    _, pa, pb = np.intersect1d(ia, ib, assume_unique=True, return_indices=True)
    return complex(np.sum(aa[pa].conj() * ab[pb]))


# -- a + c*b over sorted sparse vectors ---------------------------------------

def _sparse_axpy_py(ia, aa, ib, ab, c):
    na = ia.shape[0]
    nb = ib.shape[0]
    out_i = np.empty(na + nb, dtype=np.int64)
    out_a = np.empty(na + nb, dtype=np.complex128)
    i = 0
    j = 0
    n = 0
    while i < na or j < nb:
        if j >= nb or (i < na and ia[i] < ib[j]):
            out_i[n] = ia[i]
            out_a[n] = aa[i]
            i += 1
        elif i >= na or ib[j] < ia[i]:
            out_i[n] = ib[j]
            out_a[n] = c * ab[j]
            j += 1
        else:
            out_i[n] = ia[i]
            out_a[n] = aa[i] + c * ab[j]
            i += 1
            j += 1
        n += 1
    return out_i[:n], out_a[:n]


sparse_axpy_numba = njit(_sparse_axpy_py)


def sparse_axpy_numpy(ia, aa, ib, ab, c):
    idx = np.union1d(ia, ib)
    amps = np.zeros(idx.shape[0], dtype=np.complex128)
    amps[np.searchsorted(idx, ia)] += aa
    amps[np.searchsorted(idx, ib)] += c * ab
    return idx, amps


# -- marking predicate of the order-finding sweep -----------------------------

def _chi_j_mask_py(k, b, d, m, j):
    n = k.shape[0]
    out = np.empty(n, dtype=np.bool_)
    bound = (1 << j) if j >= 0 else 0
    for t in range(n):
        rep = (d * k[t]) % m
        out[t] = 2 * rep >= m or (b[t] == 1 and rep > 0 and rep <= bound)
    return out


chi_j_mask_numba = njit(_chi_j_mask_py)


def chi_j_mask_numpy(k, b, d, m, j):
    rep = (d * k) % m
    bound = (1 << j) if j >= 0 else 0
    return (2 * rep >= m) | ((b == 1) & (rep > 0) & (rep <= bound))


# -- controlled multiplication on a residue register ---------------------------
# Register index i stores the residue (i + 1) mod n, so index 0 is the identity.

def _modmul_index_py(g_index, a, xpow, n):
    out = np.empty(g_index.shape[0], dtype=np.int64)
    for t in range(g_index.shape[0]):
        code = (g_index[t] + 1) % n
        code = (code * xpow[a[t]]) % n
        out[t] = (code - 1) % n
    return out


modmul_index_numba = njit(_modmul_index_py)


def modmul_index_numpy(g_index, a, xpow, n):
    code = (g_index + 1) % n
    code = (code * xpow[a]) % n
    return (code - 1) % n


# -- successive powers x^0 .. x^(count-1) mod n --------------------------------

def _power_table_py(x, n, count):
    out = np.empty(count, dtype=np.int64)
    acc = 1 % n
    for t in range(count):
        out[t] = acc
        acc = (acc * x) % n
    return out


power_table_numba = njit(_power_table_py)


def power_table_numpy(x, n, count):
    # binary exponentiation, vectorized over the exponent
    e = np.arange(count, dtype=np.int64)
    out = np.full(count, 1 % n, dtype=np.int64)
    base = np.int64(x % n)
    while e.any():
        odd = (e & 1).astype(bool)
        out[odd] = (out[odd] * base) % n
        base = (base * base) % n
        e >>= 1
    return out


# -- marginal weights of one register -------------------------------------------

def _marginal_py(values, amps, dim):
    out = np.zeros(dim, dtype=np.float64)
    for t in range(values.shape[0]):
        a = amps[t]
        out[values[t]] += a.real * a.real + a.imag * a.imag
    return out


marginal_numba = njit(_marginal_py)


def marginal_numpy(values, amps, dim):
    return np.bincount(values, weights=np.abs(amps) ** 2, minlength=dim)


# -- register digit extraction ---------------------------------------------------

def _register_digits_py(idx, stride, dim):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for t in range(idx.shape[0]):
        out[t] = (idx[t] // stride) % dim
    return out


register_digits_numba = njit(_register_digits_py)


def register_digits_numpy(idx, stride, dim):
    if stride == 1:
        return idx % dim
    return (idx // stride) % dim


# -- squared norm and pruning ----------------------------------------------------

def _sum_abs2_py(amps):
    s = 0.0
    c = 0.0
    for t in range(amps.shape[0]):
        a = amps[t]
        y = a.real * a.real + a.imag * a.imag - c
        u = s + y
        c = (u - s) - y
        s = u
    return s


sum_abs2_numba = njit(_sum_abs2_py)


def sum_abs2_numpy(amps):
    return float(np.sum(amps.real ** 2 + amps.imag ** 2))


def _keep_mask_py(amps, tol):
    tol2 = tol * tol
    out = np.empty(amps.shape[0], dtype=np.bool_)
    for t in range(amps.shape[0]):
        a = amps[t]
        w = a.real * a.real + a.imag * a.imag
        out[t] = w > tol2
    return out


keep_mask_numba = njit(_keep_mask_py)


def keep_mask_numpy(amps, tol):
    w = amps.real ** 2 + amps.imag ** 2
    return w > tol * tol


def _same_support(ia, ib):
    return ia is ib or (ia.shape == ib.shape and np.array_equal(ia, ib))


def _with_shared_fast_path(inner, axpy):
    def sparse_inner(ia, aa, ib, ab):
        if _same_support(ia, ib):
            return complex(np.sum(aa.conj() * ab))
        return complex(inner(ia, aa, ib, ab))

    def sparse_axpy(ia, aa, ib, ab, c):
        if _same_support(ia, ib):
            return ia, aa + c * ab
        return axpy(ia, aa, ib, ab, c)

    return sparse_inner, sparse_axpy


KERNELS = ("sparse_inner", "sparse_axpy", "chi_j_mask", "modmul_index",
           "power_table", "marginal", "register_digits", "sum_abs2", "keep_mask")

if USE_NUMBA:
    sparse_inner, sparse_axpy = _with_shared_fast_path(sparse_inner_numba, sparse_axpy_numba)
    chi_j_mask = chi_j_mask_numba
    modmul_index = modmul_index_numba
    power_table = power_table_numba
    marginal = marginal_numba
    register_digits = register_digits_numba
    sum_abs2 = sum_abs2_numba
    keep_mask = keep_mask_numba
else:
    sparse_inner, sparse_axpy = _with_shared_fast_path(sparse_inner_numpy, sparse_axpy_numpy)
    chi_j_mask = chi_j_mask_numpy
    modmul_index = modmul_index_numpy
    power_table = power_table_numpy
    marginal = marginal_numpy
    register_digits = register_digits_numpy
    sum_abs2 = sum_abs2_numpy
    keep_mask = keep_mask_numpy

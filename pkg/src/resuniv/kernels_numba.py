"""Numba-compiled kernels (hot inner loops of filter runs and grid sweeps).

Mirrors `kernels_numpy`; small dense shapes dominate here, so the explicit
loops fuse well under nopython compilation.  cache=True amortizes JIT cost
across processes.
"""

import numpy as np
from numba import njit

ACT_RELU = 0
ACT_LOGISTIC = 1


@njit(cache=True)
def _act_scalar(z, act_kind):
    if act_kind == ACT_RELU:
        return z if z > 0.0 else 0.0
    # logistic, branch keeps exp() off large positive arguments
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


@njit(cache=True)
def fnn_eval(a_flat, comp_ptr, B, C, d, e, act_kind, S_pts, U_pts):
    n = S_pts.shape[0]
    D = e.shape[0]
    E = U_pts.shape[1]
    H = a_flat.shape[0]
    out = np.empty((n, D))
    for i in range(n):
        for di in range(D):
            out[i, di] = e[di]
        for h in range(H):
            z = d[h]
            for k in range(D):
                z += B[h, k] * S_pts[i, k]
            for k in range(E):
                z += C[h, k] * U_pts[i, k]
            a = _act_scalar(z, act_kind)
            for di in range(D):
                if comp_ptr[di] <= h < comp_ptr[di + 1]:
                    out[i, di] += a_flat[h] * a
                    break
    return out


@njit(cache=True)
def fnn_filter(a_flat, comp_ptr, B, C, d, e, act_kind, U_seq, x0):
    nseq, T, E = U_seq.shape
    D = e.shape[0]
    H = a_flat.shape[0]
    X = np.empty((nseq, T, D))
    for i in range(nseq):
        x = x0.copy()
        for t in range(T):
            xn = e.copy()
            for h in range(H):
                z = d[h]
                for k in range(D):
                    z += B[h, k] * x[k]
                for k in range(E):
                    z += C[h, k] * U_seq[i, t, k]
                a = _act_scalar(z, act_kind)
                for di in range(D):
                    if comp_ptr[di] <= h < comp_ptr[di + 1]:
                        xn[di] += a_flat[h] * a
                        break
            x = xn
            for di in range(D):
                X[i, t, di] = x[di]
    return X


@njit(cache=True)
def fourier_eval(W, alpha, phi, comp_ptr, g0, Z_pts):
    n = Z_pts.shape[0]
    D = g0.shape[0]
    K = alpha.shape[0]
    Q = Z_pts.shape[1]
    out = np.empty((n, D))
    for i in range(n):
        for di in range(D):
            out[i, di] = g0[di]
        for k in range(K):
            ph = phi[k]
            for j in range(Q):
                ph += W[k, j] * Z_pts[i, j]
            c = np.cos(ph) - np.cos(phi[k])
            for di in range(D):
                if comp_ptr[di] <= k < comp_ptr[di + 1]:
                    out[i, di] += alpha[k] * c
                    break
    return out


@njit(cache=True)
def fourier_filter(W, alpha, phi, comp_ptr, g0, U_seq, x0):
    nseq, T, E = U_seq.shape
    D = g0.shape[0]
    K = alpha.shape[0]
    X = np.empty((nseq, T, D))
    for i in range(nseq):
        x = x0.copy()
        for t in range(T):
            xn = g0.copy()
            for k in range(K):
                ph = phi[k]
                for j in range(D):
                    ph += W[k, j] * x[j]
                for j in range(E):
                    ph += W[k, D + j] * U_seq[i, t, j]
                c = np.cos(ph) - np.cos(phi[k])
                for di in range(D):
                    if comp_ptr[di] <= k < comp_ptr[di + 1]:
                        xn[di] += alpha[k] * c
                        break
            x = xn
            for di in range(D):
                X[i, t, di] = x[di]
    return X

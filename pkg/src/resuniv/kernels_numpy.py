"""Pure-numpy reference kernels.

Same signatures as `kernels_numba`; selected via the RESUNIV_BACKEND env
flag (see `backend`).  All kernels take pre-stacked parameter arrays:
one-hidden-layer networks as (a_flat, comp_ptr, B, C, d, e) with the D
output components occupying contiguous hidden-node slices, Fourier
mixtures as (W, alpha, phi, comp_ptr, g0).
"""

import numpy as np

ACT_RELU = 0
ACT_LOGISTIC = 1


def _act(z, act_kind):
    if act_kind == ACT_RELU:
        return np.maximum(z, 0.0)
    if act_kind == ACT_LOGISTIC:
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    raise ValueError(f"unknown activation kind {act_kind}")


def fnn_eval(a_flat, comp_ptr, B, C, d, e, act_kind, S_pts, U_pts):
    """Evaluate a stacked vector FNN on a batch of (state, input) points."""
    h = _act(S_pts @ B.T + U_pts @ C.T + d, act_kind)
    n = S_pts.shape[0]
    D = e.shape[0]
    out = np.empty((n, D))
    for di in range(D):
        lo, hi = comp_ptr[di], comp_ptr[di + 1]
        out[:, di] = h[:, lo:hi] @ a_flat[lo:hi] + e[di]
    return out


def fnn_filter(a_flat, comp_ptr, B, C, d, e, act_kind, U_seq, x0):
    """Run the FNN state recursion over a batch of input sequences."""
    nseq, T, _ = U_seq.shape
    D = e.shape[0]
    X = np.empty((nseq, T, D))
    x = np.broadcast_to(x0, (nseq, D)).copy()
    for t in range(T):
        x = fnn_eval(a_flat, comp_ptr, B, C, d, e, act_kind, x, U_seq[:, t])
        X[:, t] = x
    return X


def fourier_eval(W, alpha, phi, comp_ptr, g0, Z_pts):
    """Evaluate a stacked Fourier-mixture map on product-domain points."""
    n = Z_pts.shape[0]
    D = g0.shape[0]
    out = np.empty((n, D))
    if alpha.shape[0] == 0:
        out[:] = g0
        return out
    c = np.cos(Z_pts @ W.T + phi) - np.cos(phi)
    for di in range(D):
        lo, hi = comp_ptr[di], comp_ptr[di + 1]
        out[:, di] = c[:, lo:hi] @ alpha[lo:hi] + g0[di]
    return out


def fourier_filter(W, alpha, phi, comp_ptr, g0, U_seq, x0):
    """Run the Fourier-mixture state recursion over a batch of input sequences."""
    nseq, T, _ = U_seq.shape
    D = g0.shape[0]
    X = np.empty((nseq, T, D))
    x = np.broadcast_to(x0, (nseq, D)).copy()
    for t in range(T):
        z = np.concatenate([x, U_seq[:, t]], axis=1)
        x = fourier_eval(W, alpha, phi, comp_ptr, g0, z)
        X[:, t] = x
    return X

"""Pure-numpy objective kernel, call-compatible with the compiled one.

Mirrors the extension's LAPACK sequence (zpotrf/zpocon/zpotrs on the
hermitian Gram matrices) so the two backends agree to rounding error.
"""

import numpy as np
from scipy.linalg import lapack


def _chol_gate(a: np.ndarray, cond_cap: float):
    """Cholesky-factor a hermitian Gram matrix and gate its 1-norm rcond.

    Returns (factor, bad) where bad is 1 for non-PD, 2 for past the cap.
    """
    anorm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    c, info = lapack.zpotrf(a, lower=1, clean=0, overwrite_a=0)
    if info != 0:
        return None, 1
    rcond, info = lapack.zpocon(c, anorm, uplo="L")
    if info != 0 or not np.isfinite(rcond) or rcond < 1.0 / cond_cap:
        return None, 2
    return c, 0


def eval_mask(h_u_full, h_d_full, g_full, h_si_full,
              ul, dl, ra, ta,
              p_u, p_d, sigma2_bs, sigma2_dl, cond_cap):
    """Spectral efficiency of one decoded selection.

    Index arrays pick the active uplink users (ul), downlink users (dl),
    receive antennas (ra) and transmit antennas (ta) out of the full
    matrices.  Returns (status, se); status 0 = ok, 1/2 = downlink Gram
    non-PD / past the condition cap, 3/4 = same for the uplink Gram.
    Cardinality feasibility is the caller's job.
    """
    n_u, n_d = len(ul), len(dl)
    se = 0.0

    w = None
    if n_d > 0:
        h_d = np.ascontiguousarray(h_d_full[np.ix_(dl, ta)])
        a = h_d @ h_d.conj().T
        c, bad = _chol_gate(a, cond_cap)
        if bad:
            return bad, 0.0
        # F_d^H = A^{-1} H_d, so W = Y^H/||Y||_F with Y the potrs solve
        y, info = lapack.zpotrs(c, np.asfortranarray(h_d), lower=1)
        if info != 0:
            return 1, 0.0
        fro = float(np.linalg.norm(y))
        w = y.conj().T / fro
        sig = np.abs(np.einsum("kj,jk->k", h_d, w)) ** 2
        if n_u > 0:
            g = g_full[np.ix_(dl, ul)]
            inter = p_u * np.sum(np.abs(g) ** 2, axis=1)
        else:
            inter = np.zeros(n_d)
        gamma_d = p_d * sig / (inter + sigma2_dl)
        se += float(np.sum(np.log2(1.0 + gamma_d)))

    if n_u > 0:
        h_u = np.ascontiguousarray(h_u_full[np.ix_(ra, ul)])
        b = h_u.conj().T @ h_u
        c, bad = _chol_gate(b, cond_cap)
        if bad:
            return bad + 2, 0.0
        p, info = lapack.zpotrs(c, np.asfortranarray(h_u.conj().T), lower=1)
        if info != 0:
            return 3, 0.0
        noise = sigma2_bs * np.sum(np.abs(p) ** 2, axis=1)
        if n_d > 0:
            through = p @ h_si_full[np.ix_(ra, ta)] @ w
            si = p_d * np.sum(np.abs(through) ** 2, axis=1)
        else:
            si = np.zeros(n_u)
        gamma_u = p_u / (si + noise)
        se += float(np.sum(np.log2(1.0 + gamma_u)))

    return 0, se

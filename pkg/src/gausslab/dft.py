"""Discrete Fourier transforms of arbitrary length.

Batch character sums need DFTs of length M = q^d - 1, which is never a
friendly FFT length.  The workhorse here is Bluestein's chirp decomposition
jk = (j^2 + k^2 - (j-k)^2)/2, which turns a length-M transform into one
linear convolution carried by power-of-two FFTs.  A direct O(M^2)
evaluation serves both as the small-M fast path and as an independent
cross-check oracle.

Sign convention: ``sign=+1`` uses the kernel exp(+2 pi i jk / M), matching
character evaluation chi_j(g^k); ``sign=-1`` is the classical forward FFT
kernel.  All paths are single-threaded and deterministic.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DIRECT_CUTOFF", "dft", "dft_direct", "bluestein_dft", "cyclic_convolve", "cyclic_convolve_direct"]

DIRECT_CUTOFF = 512


def dft(x: np.ndarray, sign: int = 1) -> np.ndarray:
    """DFT with kernel exp(sign * 2 pi i jk / M)."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] == 0:
        raise ValueError("input must be a nonempty 1-d array")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if x.shape[0] < DIRECT_CUTOFF:
        return dft_direct(x, sign)
    return bluestein_dft(x, sign)


def dft_direct(x: np.ndarray, sign: int = 1, block: int = 256) -> np.ndarray:
    """O(M^2) evaluation, blocked to bound memory; exponents reduced mod M."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    M = x.shape[0]
    out = np.empty(M, dtype=np.complex128)
    k = np.arange(M, dtype=np.int64)
    for j0 in range(0, M, block):
        jj = np.arange(j0, min(j0 + block, M), dtype=np.int64)
        phase = (jj[:, None] * k[None, :]) % M
        out[j0 : j0 + jj.shape[0]] = np.exp((sign * 2j * np.pi / M) * phase) @ x
    return out


def bluestein_dft(x: np.ndarray, sign: int = 1) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.complex128)
    M = x.shape[0]
    t = np.arange(M, dtype=np.int64)
    chirp = np.exp((sign * 1j * np.pi / M) * ((t * t) % (2 * M)))
    u = x * chirp
    N = 1 << (2 * M - 1).bit_length()
    v = np.zeros(N, dtype=np.complex128)
    v[:M] = chirp.conj()
    v[N - M + 1 :] = chirp[1:].conj()[::-1]
    w = np.fft.ifft(np.fft.fft(u, N) * np.fft.fft(v))
    return chirp * w[:M]


def cyclic_convolve(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cyclic convolution over Z/M via zero-padded power-of-two FFTs."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    M = u.shape[0]
    if v.shape[0] != M:
        raise ValueError("length mismatch")
    if M == 1:
        return u * v
    N = 1 << (2 * M - 1).bit_length()
    w = np.fft.ifft(np.fft.fft(u, N) * np.fft.fft(v, N))
    out = w[:M].copy()
    out[: M - 1] += w[M : 2 * M - 1]
    return out


def cyclic_convolve_direct(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """O(M^2) oracle for :func:`cyclic_convolve`."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    M = u.shape[0]
    idx = (np.arange(M)[:, None] - np.arange(M)[None, :]) % M
    return v[idx] @ u

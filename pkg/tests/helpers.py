"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library code paths they are used
to check: the polar oracle goes through scipy's SVD, the fidelity oracle
evaluates Kraus amplitudes on explicitly sampled states.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from aqec import QuantumChannel, CodeSpace, haar_unitary


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2.0


def random_psd(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return a @ a.conj().T


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    rho = random_psd(dim, dim, rng)
    return rho / np.trace(rho).real


def random_tp_channel(dim: int, n_kraus: int, rng: np.random.Generator) -> QuantumChannel:
    """Haar-random CPTP channel via a Stinespring isometry."""
    u = haar_unitary(dim * n_kraus, rng)
    v = u[:, :dim]
    return QuantumChannel([v[i * dim : (i + 1) * dim, :] for i in range(n_kraus)])


def random_unital_qubit_channel(rng: np.random.Generator, n_unitaries: int = 4) -> QuantumChannel:
    """Random mixture of unitaries: TP and unital by construction."""
    probs = rng.dirichlet(np.ones(n_unitaries))
    return QuantumChannel(
        [np.sqrt(probs[i]) * haar_unitary(2, rng) for i in range(n_unitaries)]
    )


def embed_qubit_channel(
    channel: QuantumChannel, code: CodeSpace
) -> QuantumChannel:
    """Lift a 2x2-Kraus channel to ambient dimension, acting inside the code."""
    w = code.basis
    return QuantumChannel([w @ k @ w.conj().T for k in channel.kraus])


def remix_kraus(channel: QuantumChannel, rng: np.random.Generator) -> QuantumChannel:
    """Equivalent channel with Kraus operators mixed by a Haar unitary."""
    n = channel.n_kraus
    u = haar_unitary(n, rng)
    stack = np.stack(channel.kraus)
    return QuantumChannel(list(np.einsum("ij,iab->jab", u, stack)))


def svd_polar_oracle(a: np.ndarray) -> np.ndarray:
    """Unitary polar factor computed via scipy's SVD, independent of the
    library's eigendecomposition route."""
    u, _, vh = scipy.linalg.svd(a)
    return u @ vh


def sqrtm_oracle(a: np.ndarray) -> np.ndarray:
    """PSD square root via scipy."""
    return np.asarray(scipy.linalg.sqrtm(a), dtype=complex)


def bloch_samples(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples on the unit 2-sphere."""
    u = rng.standard_normal((n, 3))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def bloch_to_coeffs(s: np.ndarray) -> np.ndarray:
    """Qubit amplitudes (a, b) for Bloch vectors, rows of s."""
    a = np.sqrt(np.clip((1 + s[:, 2]) / 2, 0, 1))
    denom = np.sqrt(np.maximum(1 - s[:, 2] ** 2, 1e-300))
    phase = (s[:, 0] + 1j * s[:, 1]) / denom
    b = np.sqrt(np.clip((1 - s[:, 2]) / 2, 0, 1)) * phase
    return np.stack([a, b], axis=1)


def f2_of_states(
    channel_kraus_code: np.ndarray, coeffs: np.ndarray
) -> np.ndarray:
    """Direct squared fidelity sum_k |<psi|K_k|psi>|^2 for batched states."""
    amps = np.einsum(
        "na,kab,nb->nk", coeffs.conj(), channel_kraus_code, coeffs, optimize=True
    )
    return np.sum(np.abs(amps) ** 2, axis=1).real


def sphere_oracle_min_f2(
    noise: QuantumChannel,
    recovery: QuantumChannel | None,
    code: CodeSpace,
    n: int,
    rng: np.random.Generator,
    refine_iters: int = 200,
) -> float:
    """Sampled + locally-refined minimum of F^2 over pure code states.

    Fully independent of the library's process-matrix and secular-equation
    machinery: states are sampled explicitly and F^2 evaluated from Kraus
    amplitudes; refinement is a local projected gradient descent coded here.
    """
    w = code.basis
    if recovery is None:
        ops = [w.conj().T @ k @ w for k in noise.kraus]
    else:
        ops = [
            (w.conj().T @ r) @ (k @ w)
            for r in recovery.kraus
            for k in noise.kraus
        ]
    ks = np.stack(ops)
    d = code.code_dim
    best = np.inf
    best_c = None
    remaining = n
    while remaining > 0:
        batch = min(remaining, 200_000)
        remaining -= batch
        if d == 2:
            cs = bloch_to_coeffs(bloch_samples(batch, rng))
        else:
            z = rng.standard_normal((batch, d)) + 1j * rng.standard_normal((batch, d))
            cs = z / np.linalg.norm(z, axis=1, keepdims=True)
        f2 = f2_of_states(ks, cs)
        idx = int(np.argmin(f2))
        if f2[idx] < best:
            best = float(f2[idx])
            best_c = cs[idx]
    # local refinement
    c = best_c
    f = best
    step = 0.1
    for _ in range(refine_iters):
        v = np.einsum("a,kab,b->k", c.conj(), ks, c)
        grad = (v.conj()[:, None] * (ks @ c)).sum(0)
        grad += (v[:, None] * np.einsum("kba,b->ka", ks.conj(), c)).sum(0)
        g = grad - c * np.vdot(c, grad)
        if np.linalg.norm(g) < 1e-14:
            break
        moved = False
        while step > 1e-17:
            t = c - step * g
            t /= np.linalg.norm(t)
            ft = float(f2_of_states(ks, t[None, :])[0])
            if ft < f - 1e-18:
                c, f = t, ft
                step *= 1.5
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return min(best, f)

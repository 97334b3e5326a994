"""Subspace codes and operator bases on them.

A code is a d-dimensional subspace of a D-dimensional Hilbert space,
stored as the D x d isometry whose columns are an orthonormal basis.
The projector is derived on demand.

JSON wire format::

    {"ambient_dim": D, "code_dim": d,
     "basis": [[[re, im], ...D entries...], ...d vectors...]}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import _matrix_to_pairs, _pairs_to_matrix
from .exceptions import DimensionMismatch, InvalidBloch, NotQubitCode

ORTHONORMALITY_TOL = 1e-12


class CodeSpace:
    """Orthonormal basis of a code subspace, columns of `basis`."""

    __slots__ = ("basis", "ambient_dim", "code_dim")

    def __init__(self, basis: np.ndarray):
        basis = np.array(basis, dtype=complex)
        if basis.ndim != 2:
            raise DimensionMismatch("basis must be a D x d matrix of column vectors")
        d_amb, d_code = basis.shape
        if d_code > d_amb or d_code < 1:
            raise DimensionMismatch(
                f"code dimension {d_code} invalid for ambient dimension {d_amb}"
            )
        gram = basis.conj().T @ basis
        dev = float(np.max(np.abs(gram - np.eye(d_code))))
        if dev > ORTHONORMALITY_TOL:
            raise DimensionMismatch(
                f"basis not orthonormal: max|<vi|vj> - delta_ij| = {dev:.3e}"
            )
        basis.flags.writeable = False
        self.basis = basis
        self.ambient_dim = d_amb
        self.code_dim = d_code

    @classmethod
    def from_vectors(cls, vectors) -> "CodeSpace":
        return cls(np.column_stack([np.asarray(v, dtype=complex) for v in vectors]))

    def projector(self) -> np.ndarray:
        """P = sum_k |v_k><v_k|, the rank-d projector onto the code."""
        return self.basis @ self.basis.conj().T

    def __repr__(self) -> str:
        return f"CodeSpace(ambient_dim={self.ambient_dim}, code_dim={self.code_dim})"


@dataclass(frozen=True)
class OperatorBasis:
    """Hermitian operator basis on a code: O_0 = identity-on-code, the rest
    traceless, normalized to tr(O_a O_b) = d * delta_ab."""

    elements: tuple
    code: CodeSpace


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R diagonal is rephased to be real positive, which makes the QR
    output exactly Haar distributed and deterministic for a given rng.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag))


def random_code(ambient_dim: int, code_dim: int, seed: int) -> CodeSpace:
    """Haar-random code: first code_dim columns of a Haar-random unitary.

    Deterministic for a given seed (PCG64 generator).
    """
    if code_dim > ambient_dim:
        raise DimensionMismatch(
            f"code dimension {code_dim} exceeds ambient dimension {ambient_dim}"
        )
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((ambient_dim, code_dim)) + 1j * rng.standard_normal(
        (ambient_dim, code_dim)
    )
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    q = q * (diag.conj() / np.abs(diag))
    return CodeSpace(q)


def _su_generators(d: int) -> list[np.ndarray]:
    """Traceless Hermitian generators on C^d, ordered symmetric pairs,
    then antisymmetric pairs, then diagonal, scaled to tr(O^2) = d."""
    gens: list[np.ndarray] = []
    scale = np.sqrt(d / 2.0)
    for j in range(d):
        for k in range(j + 1, d):
            g = np.zeros((d, d), dtype=complex)
            g[j, k] = g[k, j] = 1.0
            gens.append(scale * g)
    for j in range(d):
        for k in range(j + 1, d):
            g = np.zeros((d, d), dtype=complex)
            g[j, k] = -1j
            g[k, j] = 1j
            gens.append(scale * g)
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[:l, :l] = np.eye(l)
        g[l, l] = -l
        gens.append(scale * np.sqrt(2.0 / (l * (l + 1))) * g)
    return gens


def operator_basis(code: CodeSpace) -> OperatorBasis:
    """Hermitian basis {O_a} on the code, lifted to ambient dimension.

    For qubit codes this is exactly the code-space Pauli basis; for larger
    d the traceless part consists of scaled SU(d) generators.
    """
    w = code.basis
    d = code.code_dim
    elements = [code.projector()]
    for g in _su_generators(d):
        elements.append(w @ g @ w.conj().T)
    return OperatorBasis(tuple(elements), code)


def pauli_basis(code: CodeSpace) -> OperatorBasis:
    """Code-space Pauli basis {identity, sigma_x, sigma_y, sigma_z} built
    from the two basis vectors |v1>, |v2>:

        sigma_x = |v1><v2| + |v2><v1|
        sigma_y = -i(|v1><v2| - |v2><v1|)
        sigma_z = |v1><v1| - |v2><v2|
    """
    if code.code_dim != 2:
        raise NotQubitCode(f"code dimension is {code.code_dim}, need 2")
    return operator_basis(code)


def bloch_state(code: CodeSpace, s) -> np.ndarray:
    """Density matrix (P + s . sigma) / 2 for a Bloch vector s.

    Pure exactly when |s| = 1; s = 0 gives the maximally mixed code state.
    """
    if code.code_dim != 2:
        raise NotQubitCode(f"code dimension is {code.code_dim}, need 2")
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape != (3,):
        raise DimensionMismatch("Bloch vector must have three components")
    if np.linalg.norm(s) > 1 + 1e-12:
        raise InvalidBloch(f"|s| = {np.linalg.norm(s):.12f} exceeds 1")
    _, sx, sy, sz = pauli_basis(code).elements
    return (code.projector() + s[0] * sx + s[1] * sy + s[2] * sz) / 2.0


def bloch_to_state_vector(code: CodeSpace, s) -> np.ndarray:
    """Unit-norm ambient state vector for a Bloch vector with |s| = 1."""
    if code.code_dim != 2:
        raise NotQubitCode(f"code dimension is {code.code_dim}, need 2")
    s = np.asarray(s, dtype=float).reshape(3)
    v1 = code.basis[:, 0]
    v2 = code.basis[:, 1]
    if s[2] < -1 + 1e-14:
        return v2.copy()
    psi = (1.0 + s[2]) * v1 + (s[0] + 1j * s[1]) * v2
    return psi / np.linalg.norm(psi)


def code_to_json(code: CodeSpace) -> dict:
    return {
        "ambient_dim": code.ambient_dim,
        "code_dim": code.code_dim,
        "basis": [_matrix_to_pairs(code.basis[:, k]) for k in range(code.code_dim)],
    }


def code_from_json(data: dict) -> CodeSpace:
    try:
        d_amb = int(data["ambient_dim"])
        d_code = int(data["code_dim"])
        vecs = data["basis"]
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed code JSON: {exc}") from exc
    cols = [_pairs_to_matrix(v, d_amb, 1).reshape(-1) for v in vecs]
    if len(cols) != d_code:
        raise DimensionMismatch(
            f"code JSON declares code_dim {d_code} but has {len(cols)} basis vectors"
        )
    return CodeSpace.from_vectors(cols)

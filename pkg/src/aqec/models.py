"""Named channels and codes used by the experiments and the CLI.

Conventions: n-qubit states index bitstrings with the first qubit most
significant (|abcd> sits at index a*8 + b*4 + c*2 + d for four qubits);
tensor products of single-qubit operators follow the same order.
"""

from __future__ import annotations

import numpy as np

from .channels import QuantumChannel, complete_to_tp
from .codes import CodeSpace
from .conditions import build_r_perf, check_perfect_qec
from .exceptions import ParamOutOfRange
from .linalg import hermitian_eig

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(spec: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. 'XZZXI'."""
    op = np.array([[1.0]], dtype=complex)
    for ch in spec:
        op = np.kron(op, _PAULI[ch])
    return op


def basis_state(bits: str) -> np.ndarray:
    """Computational basis vector for a bitstring like '0011'."""
    n = len(bits)
    v = np.zeros(2**n, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def amplitude_damping(gamma: float) -> QuantumChannel:
    """Single-qubit energy relaxation with decay probability gamma:

        E0 = diag(1, sqrt(1 - gamma)),  E1 = sqrt(gamma) |0><1|.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParamOutOfRange(f"gamma = {gamma} outside [0, 1]")
    e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return QuantumChannel([e0, e1])


def qubit_space() -> CodeSpace:
    """The full single-qubit space as a trivial code (no encoding)."""
    return CodeSpace(np.eye(2, dtype=complex))


def bit_flip_code() -> CodeSpace:
    """Three-qubit repetition code span{|000>, |111>}."""
    return CodeSpace.from_vectors([basis_state("000"), basis_state("111")])


def bit_flip_channel(q: float) -> QuantumChannel:
    """Independent bit flips truncated to at most one flip (CP, sub-TP):

        {sqrt((1-q)^3) I, sqrt(q(1-q)^2) X_k for k = 1, 2, 3}.
    """
    if not 0.0 <= q <= 1.0:
        raise ParamOutOfRange(f"q = {q} outside [0, 1]")
    ops = [np.sqrt((1 - q) ** 3) * pauli_string("III")]
    for s in ("XII", "IXI", "IIX"):
        ops.append(np.sqrt(q * (1 - q) ** 2) * pauli_string(s))
    return QuantumChannel(ops)


def leung_code() -> CodeSpace:
    """Four-qubit code tailored to amplitude damping:

        |0_L> = (|0000> + |1111>) / sqrt(2)
        |1_L> = (|0011> + |1100>) / sqrt(2)
    """
    v0 = (basis_state("0000") + basis_state("1111")) / np.sqrt(2.0)
    v1 = (basis_state("0011") + basis_state("1100")) / np.sqrt(2.0)
    return CodeSpace.from_vectors([v0, v1])


def truncated_damping_channel(gamma: float, n: int) -> QuantumChannel:
    """n-qubit amplitude damping truncated to at most one damping event:
    the no-damping operator E0^(x n) plus the n single-damping terms.
    Trace decreasing for gamma > 0."""
    if not 0.0 <= gamma <= 1.0:
        raise ParamOutOfRange(f"gamma = {gamma} outside [0, 1]")
    ad = amplitude_damping(gamma)
    e0, e1 = ad.kraus
    ops = []
    for damp_at in range(-1, n):
        factors = [e1 if k == damp_at else e0 for k in range(n)]
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        ops.append(op)
    return QuantumChannel(ops)


_LEUNG_DAMPED_IMAGES = {
    1: ("0111", "0100"),
    2: ("1011", "1000"),
    3: ("1101", "0001"),
    4: ("1110", "0010"),
}


def leung_recovery(gamma: float) -> QuantumChannel:
    """Leading-order syndrome recovery for the four-qubit damping code.

    Syndrome measurement distinguishes the no-damping sector (the span of
    the four undamped codeword strings) from the four single-damping
    sectors.  A damping at qubit k is undone by the fixed isometry taking
    the damped codeword images back to the codewords; the no-damping
    outcome is left untouched, which ignores the residual (1 - gamma)
    distortion of the codewords.  The remaining (multi-damping) subspace
    is routed to |0_L><0_L| to make the map TP.

    The gamma argument is accepted for interface symmetry with the other
    recoveries; the map itself is gamma independent apart from validation.
    """
    if not 0.0 <= gamma < 1.0:
        raise ParamOutOfRange(f"gamma = {gamma} outside [0, 1)")
    code = leung_code()
    v0, v1 = code.basis[:, 0], code.basis[:, 1]
    sector = [basis_state(b) for b in ("0000", "1111", "0011", "1100")]
    ops = [sum(np.outer(v, v.conj()) for v in sector)]
    for d0, d1 in _LEUNG_DAMPED_IMAGES.values():
        ops.append(
            np.outer(v0, basis_state(d0).conj())
            + np.outer(v1, basis_state(d1).conj())
        )
    return complete_to_tp(QuantumChannel(ops), v0)


_FIVE_QUBIT_STABILIZERS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def five_qubit_code(gamma: float = 0.1) -> tuple[CodeSpace, QuantumChannel]:
    """Distance-3 five-qubit code and the channel it corrects exactly.

    The code is the +1 eigenspace of the cyclic stabilizers XZZXI, IXZZX,
    XIXZZ, ZXIXZ with logical states fixed by Z_L = ZZZZZ, X_L = XXXXX.
    The channel is the weight-at-most-1 part of the Pauli expansion of
    five-fold amplitude damping at the given gamma (see five_qubit_noise).
    """
    return five_qubit_code_only(), five_qubit_noise(gamma)


def five_qubit_code_only() -> CodeSpace:
    dim = 32
    proj = np.eye(dim, dtype=complex)
    for s in _FIVE_QUBIT_STABILIZERS:
        proj = proj @ (np.eye(dim) + pauli_string(s)) / 2.0
    v0 = proj @ basis_state("00000")
    v0 /= np.linalg.norm(v0)
    v1 = pauli_string("XXXXX") @ v0
    return CodeSpace.from_vectors([v0, v1])


def five_qubit_noise(gamma: float) -> QuantumChannel:
    """Single-qubit-error content of five-fold amplitude damping.

    Writing E0 = a I + b Z with a = (1 + sqrt(1-gamma))/2 and
    b = (1 - sqrt(1-gamma))/2, and E1 = sqrt(gamma) (X + iY)/2, the Kraus
    operators of the five-fold product are expanded in the Pauli basis and
    every term of weight 2 or more is dropped:

        K0 = a^5 I + a^4 b sum_k Z_k,
        K_k = a^4 sqrt(gamma) (X_k + i Y_k) / 2,  k = 1..5.

    Every operator lies in the span of weight <= 1 Paulis, so the code
    from five_qubit_code satisfies the perfect correction conditions for
    this CP (trace-decreasing) channel at every gamma.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParamOutOfRange(f"gamma = {gamma} outside [0, 1]")
    a = (1.0 + np.sqrt(1.0 - gamma)) / 2.0
    b = (1.0 - np.sqrt(1.0 - gamma)) / 2.0
    n = 5
    k0 = a**n * pauli_string("I" * n)
    for k in range(n):
        z = "".join("Z" if j == k else "I" for j in range(n))
        k0 = k0 + a ** (n - 1) * b * pauli_string(z)
    ops = [k0]
    for k in range(n):
        x = "".join("X" if j == k else "I" for j in range(n))
        y = "".join("Y" if j == k else "I" for j in range(n))
        ops.append(
            a ** (n - 1)
            * np.sqrt(gamma)
            * (pauli_string(x) + 1j * pauli_string(y))
            / 2.0
        )
    return QuantumChannel(ops)


def complete_to_mixed_code(
    e: QuantumChannel, code: CodeSpace, tol: float = 1e-8
) -> QuantumChannel:
    """Extend a trace-nonincreasing channel to TP by routing the missing
    weight to the maximally mixed code state (unbiased re-preparation)."""
    defect = np.eye(e.dims_in) - e.kraus_sum()
    vals, vecs = hermitian_eig(defect)
    d = code.code_dim
    ops = list(e.kraus)
    for lam, phi in zip(vals, vecs.T):
        if lam > tol:
            for k in range(d):
                ops.append(np.sqrt(lam / d) * np.outer(code.basis[:, k], phi.conj()))
    return QuantumChannel(ops)


def five_qubit_recovery(gamma: float) -> QuantumChannel:
    """TP-completed standard recovery for the five-qubit code against the
    single-error channel at this gamma.  Syndromes outside the corrected
    set (two or more damping events) are discarded and replaced by the
    maximally mixed code state."""
    code = five_qubit_code_only()
    noise = five_qubit_noise(gamma)
    cert = check_perfect_qec(noise, code)
    recovery = build_r_perf(cert, noise, code)
    return complete_to_mixed_code(recovery, code)


def example5_channel(
    d: int, p: float, ambient_dim: int | None = None
) -> tuple[QuantumChannel, CodeSpace]:
    """Near-identity channel with a weak leak of every code state to |0>:

        {sqrt(1-p) P, sqrt(p) |0><0|, ..., sqrt(p) |0><d-1|}

    on the code span{|0>, ..., |d-1>} inside a larger space, plus one
    Kraus operator I - P on the complement so the total map is TP.  The
    transpose-channel fidelity loss for this family has the closed form
    (d-1)p / (1 + (d-1)p), while doing nothing loses only p.
    """
    if d < 2:
        raise ParamOutOfRange(f"code dimension {d} must be at least 2")
    if not 0.0 <= p < 1.0:
        raise ParamOutOfRange(f"p = {p} outside [0, 1)")
    if ambient_dim is None:
        ambient_dim = d + 1
    if ambient_dim < d + 1:
        raise ParamOutOfRange(
            f"ambient dimension {ambient_dim} must be at least d + 1 = {d + 1}"
        )
    basis = np.eye(ambient_dim, dtype=complex)[:, :d]
    code = CodeSpace(basis)
    p_proj = code.projector()
    ops = [np.sqrt(1.0 - p) * p_proj]
    for k in range(d):
        op = np.zeros((ambient_dim, ambient_dim), dtype=complex)
        op[0, k] = np.sqrt(p)
        ops.append(op)
    ops.append(np.eye(ambient_dim) - p_proj)
    return QuantumChannel(ops), code


def example5_eta_formula(d: int, p: float) -> float:
    """Closed-form transpose-channel fidelity loss for example5_channel."""
    return (d - 1) * p / (1.0 + (d - 1) * p)


MODEL_REGISTRY = {
    "ad": "single-qubit amplitude damping channel (parameter gamma)",
    "leung41": "four-qubit amplitude-damping code [4,1]",
    "five513": "five-qubit distance-3 code [[5,1,3]] with its single-error channel",
    "example5": "identity-plus-leak channel family (parameters d, p)",
}

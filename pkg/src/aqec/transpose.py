"""Transpose-channel recovery map for a (channel, code) pair.

For a noise channel E ~ {E_i} and a code with projector P, the transpose
channel is the recovery map with Kraus operators

    R_i = P E_i^dag E(P)^(-1/2),

the inverse square root taken on the support of E(P).  It is trace
preserving on operators supported on supp E(P), outputs states on the
code, and does not depend on which Kraus representation of E was supplied.
Outside supp E(P) the Kraus operators act as zero; all fidelity
computations in this package feed the map code inputs only, for which the
noise output always lies inside that support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, _prune
from .codes import CodeSpace
from .exceptions import DimensionMismatch
from .linalg import RANK_TOL, inv_sqrt_on_support


def _check_dims(e: QuantumChannel, code: CodeSpace) -> None:
    if e.dims_in != e.dims_out or e.dims_in != code.ambient_dim:
        raise DimensionMismatch(
            f"channel acts on dim {e.dims_in}->{e.dims_out}, "
            f"code lives in dim {code.ambient_dim}"
        )


@dataclass(frozen=True)
class TransposeRecovery:
    """Recovery channel plus the projector onto its natural domain."""

    recovery: QuantumChannel
    support_projector: np.ndarray
    source_code: CodeSpace


def transpose_channel(
    e: QuantumChannel, code: CodeSpace, rank_tol: float = RANK_TOL
) -> TransposeRecovery:
    """Build the transpose-channel recovery for noise e on the given code.

    Kraus operators are exactly {P E_i^dag B} with B the on-support inverse
    square root of E(P).  Raises NotPSD (from the inverse square root) if
    E(P) is not positive semidefinite, i.e. e was not completely positive.
    """
    _check_dims(e, code)
    p = code.projector()
    b, support = inv_sqrt_on_support(e.apply(p), rank_tol)
    ops = [p @ k.conj().T @ b for k in e.kraus]
    return TransposeRecovery(QuantumChannel(_prune(ops)), support, code)


def recovered_channel(
    e: QuantumChannel, code: CodeSpace, rank_tol: float = RANK_TOL
) -> QuantumChannel:
    """Composition transpose-recovery after noise, restricted to the code.

    Kraus set {P E_i^dag E(P)^(-1/2) E_j P}.  The set is Hermitian-closed
    (the adjoint of the (i, j) element is the (j, i) element) and the map
    is unital on the code whenever e is trace preserving.
    """
    _check_dims(e, code)
    p = code.projector()
    b, _ = inv_sqrt_on_support(e.apply(p), rank_tol)
    left = [p @ k.conj().T @ b for k in e.kraus]
    right = [k @ p for k in e.kraus]
    ops = [li @ rj for li in left for rj in right]
    return QuantumChannel(_prune(ops))

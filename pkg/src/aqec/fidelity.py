"""Worst-case fidelity of a channel over the pure states of a code.

For a map Phi acting inside a d-dimensional code with Hermitian operator
basis {O_a}, the process matrix M_ab = tr(O_a Phi(O_b)) / d is real, and
the squared fidelity of a pure code state with coefficient vector s
(density matrix (1/d) sum_a s_a O_a, s_0 = 1) is

    F^2(psi, Phi) = (1/d) s^T M s = (1/d) s^T M_sym s.

For qubit codes the minimization over the Bloch sphere is solved exactly:
by the smallest eigenvalue of the symmetrized traceless block when the map
is trace preserving and unital, and by a Lagrange-multiplier secular
equation otherwise.  For d > 2 only a sampled estimate (an upper bound on
the true minimum) is provided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channels import QuantumChannel, compose
from .codes import CodeSpace, OperatorBasis, bloch_to_state_vector, operator_basis
from .exceptions import OutputLeavesCode, PreconditionViolated
from .linalg import max_abs

EXACT_UNITAL_QUBIT = "exact_unital_qubit"
LAGRANGE_QUBIT = "lagrange_qubit"
SAMPLED = "sampled"

FLAG_TOL = 1e-9
DEFAULT_SAMPLES = 100_000
REFINE_ITERS = 300


@dataclass(frozen=True)
class ProcessMatrix:
    """Real matrix representation of a code-preserving map."""

    m: np.ndarray
    basis: OperatorBasis
    code: CodeSpace
    is_tp: bool
    is_unital: bool


@dataclass(frozen=True)
class WorstCaseResult:
    """Worst-case squared fidelity over pure code states.

    For the exact qubit methods f2_min is a certified global minimum; for
    the sampled method it is the best value seen (an upper bound on the
    true minimum) and `samples`/`seed` record the search effort.
    """

    f2_min: float
    eta: float
    worst_state: np.ndarray
    bloch: np.ndarray | None
    method: str
    samples: int | None = None
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "f2_min": self.f2_min,
            "f_min": float(np.sqrt(max(self.f2_min, 0.0))),
            "eta": self.eta,
            "worst_state": [[float(z.real), float(z.imag)] for z in self.worst_state],
            "bloch": None if self.bloch is None else [float(x) for x in self.bloch],
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }


def _process_matrix_from_apply(
    apply_fn,
    code: CodeSpace,
    *,
    allow_leakage: bool = False,
    leak_tol: float = FLAG_TOL,
) -> ProcessMatrix:
    basis = operator_basis(code)
    d = code.code_dim
    p = code.projector()
    n = d * d
    m = np.zeros((n, n))
    for b_idx, o_b in enumerate(basis.elements):
        img = apply_fn(o_b)
        if not allow_leakage:
            leak = max_abs(img - p @ img @ p)
            if leak > leak_tol * max(1.0, max_abs(img)):
                raise OutputLeavesCode(
                    f"channel output leaks outside the code (max leak {leak:.3e})"
                )
        for a_idx, o_a in enumerate(basis.elements):
            val = np.trace(o_a @ img) / d
            m[a_idx, b_idx] = val.real
            if abs(val.imag) > 1e-8:
                raise PreconditionViolated(
                    f"process matrix entry has imaginary part {val.imag:.3e}; "
                    "map is not completely positive on Hermitian inputs"
                )
    e0 = np.zeros(n)
    e0[0] = 1.0
    is_tp = max_abs(m[0, :] - e0) <= FLAG_TOL
    is_unital = max_abs(m[:, 0] - e0) <= FLAG_TOL
    return ProcessMatrix(m, basis, code, is_tp, is_unital)


def process_matrix(
    phi: QuantumChannel,
    code: CodeSpace,
    *,
    allow_leakage: bool = False,
    leak_tol: float = FLAG_TOL,
) -> ProcessMatrix:
    """Process matrix M_ab = tr(O_a phi(O_b)) / d over the code basis.

    Raises OutputLeavesCode when phi's output leaves the code beyond
    tolerance (disable with allow_leakage when only fidelities are wanted,
    which never see the leaked part).
    """
    if phi.dims_in != code.ambient_dim or phi.dims_out != code.ambient_dim:
        raise PreconditionViolated(
            f"channel dims ({phi.dims_in}->{phi.dims_out}) do not match "
            f"ambient dimension {code.ambient_dim}"
        )
    return _process_matrix_from_apply(
        phi.apply, code, allow_leakage=allow_leakage, leak_tol=leak_tol
    )


def _min_quadratic_on_sphere(
    c0: float, b: np.ndarray, n_sym: np.ndarray
) -> tuple[float, np.ndarray]:
    """Global minimum of c0 + 2 b.s + s^T N s over real unit vectors s.

    Trust-region-style solver: stationary points satisfy (N - lam I) s = -b
    with lam at or below the smallest eigenvalue of N; the secular equation
    |s(lam)| = 1 is solved by bracketed root finding, with the degenerate
    branch (b orthogonal to the bottom eigenspace) handled explicitly.
    """
    n_sym = (n_sym + n_sym.T) / 2.0
    mu, q = np.linalg.eigh(n_sym)
    beta = q.T @ b
    scale = max(1.0, float(np.max(np.abs(mu))), float(np.linalg.norm(b)))

    def value(s: np.ndarray) -> float:
        return float(c0 + 2.0 * b @ s + s @ n_sym @ s)

    candidates: list[np.ndarray] = []
    bnorm = float(np.linalg.norm(b))
    if bnorm <= 1e-14 * scale:
        s = q[:, 0].copy()
        return value(s), s

    cluster = mu <= mu[0] + 1e-10 * scale
    beta_min_norm = float(np.linalg.norm(beta[cluster]))

    def phi(lam: float) -> float:
        return float(np.sum((beta / (mu - lam)) ** 2))

    def s_of(lam: float) -> np.ndarray:
        return -q @ (beta / (mu - lam))

    # Easy branch: secular root strictly below mu_min.
    if beta_min_norm > 1e-13 * scale:
        lo = mu[0] - bnorm - 1e-3 * scale
        delta = 0.5 * beta_min_norm
        hi = mu[0] - max(delta, 1e-14 * scale)
        if phi(hi) > 1.0:
            lam = brentq(lambda x: phi(x) - 1.0, lo, hi, xtol=1e-15 * scale)
            s = s_of(lam)
            s /= np.linalg.norm(s)
            candidates.append(s)
    # Degenerate branch: solve on the complement of the bottom eigenspace
    # and fill the remaining length along a bottom eigenvector.
    rest = ~cluster
    s_perp = np.zeros_like(b)
    if np.any(rest):
        s_perp = -q[:, rest] @ (beta[rest] / (mu[rest] - mu[0]))
    perp_norm = float(np.linalg.norm(s_perp))
    if perp_norm <= 1.0:
        tau = np.sqrt(max(0.0, 1.0 - perp_norm**2))
        candidates.append(s_perp + tau * q[:, np.argmax(cluster)])
    else:
        # Root exists below mu_min even though b is (nearly) orthogonal to
        # the bottom eigenspace; bracket using the complement terms only.
        lo = mu[0] - bnorm - 1e-3 * scale
        hi = mu[0] - 1e-14 * scale

        def phi_rest(lam: float) -> float:
            return float(np.sum((beta[rest] / (mu[rest] - lam)) ** 2))

        lam = brentq(lambda x: phi_rest(x) - 1.0, lo, hi, xtol=1e-15 * scale)
        s = -q[:, rest] @ (beta[rest] / (mu[rest] - lam))
        s /= np.linalg.norm(s)
        candidates.append(s)

    vals = [value(s) for s in candidates]
    best = int(np.argmin(vals))
    return vals[best], candidates[best]


def worst_fidelity_unital_qubit(m: ProcessMatrix) -> WorstCaseResult:
    """Exact worst-case fidelity for a TP, unital qubit map.

    With T the 3x3 traceless block and N_sym its symmetrization, the
    minimum squared fidelity is (1 + t_min)/2 where t_min is the smallest
    eigenvalue of N_sym, attained at the matching unit Bloch vector.
    """
    if m.code.code_dim != 2:
        raise PreconditionViolated("unital-qubit solver requires a qubit code")
    if not (m.is_tp and m.is_unital):
        raise PreconditionViolated(
            "unital-qubit solver requires trace-preserving and unital flags"
        )
    n_sym = (m.m[1:, 1:] + m.m[1:, 1:].T) / 2.0
    vals, vecs = np.linalg.eigh(n_sym)
    t_min = float(vals[0])
    s = vecs[:, 0]
    f2 = (1.0 + t_min) / 2.0
    psi = bloch_to_state_vector(m.code, s)
    return WorstCaseResult(
        f2_min=f2,
        eta=(1.0 - t_min) / 2.0,
        worst_state=psi,
        bloch=s.copy(),
        method=EXACT_UNITAL_QUBIT,
    )


def _lagrange_qubit_core(m: ProcessMatrix) -> WorstCaseResult:
    m_sym = (m.m + m.m.T) / 2.0
    c0 = float(m_sym[0, 0])
    b = m_sym[1:, 0].copy()
    n_sym = m_sym[1:, 1:]
    q_min, s = _min_quadratic_on_sphere(c0, b, n_sym)
    f2 = q_min / 2.0
    psi = bloch_to_state_vector(m.code, s)
    return WorstCaseResult(
        f2_min=f2,
        eta=1.0 - f2,
        worst_state=psi,
        bloch=s.copy(),
        method=LAGRANGE_QUBIT,
    )


def worst_fidelity_qubit_lagrange(m: ProcessMatrix) -> WorstCaseResult:
    """Exact worst-case fidelity for a TP qubit map, unitality not assumed.

    Minimizes s^T M_sym s over s = (1, bloch) with |bloch| = 1 via the
    secular equation; certified global minimum.
    """
    if m.code.code_dim != 2:
        raise PreconditionViolated("Lagrange solver requires a qubit code")
    if not m.is_tp:
        raise PreconditionViolated("Lagrange solver requires the TP flag")
    return _lagrange_qubit_core(m)


def _haar_code_coeffs(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _sphere_quartic_min(
    a_ops: np.ndarray,
    h: np.ndarray | None,
    c0: np.ndarray,
    iters: int = REFINE_ITERS,
) -> tuple[float, np.ndarray]:
    """Projected gradient descent for f(c) = sum_k |c^dag A_k c|^2 + c^dag H c
    over unit vectors c, started at c0.  Step size adapts by halving."""
    d = a_ops.shape[1]
    h_mat = np.zeros((d, d), dtype=complex) if h is None else h

    def f_grad(c):
        ac = a_ops @ c
        amps = c.conj() @ ac.T
        hc = h_mat @ c
        f = float(np.sum(np.abs(amps) ** 2) + (c.conj() @ hc).real)
        adc = np.einsum("kji,j->ki", a_ops.conj(), c)
        grad = (amps.conj()[:, None] * ac).sum(0) + (amps[:, None] * adc).sum(0) + hc
        return f, grad

    c = c0 / np.linalg.norm(c0)
    f, grad = f_grad(c)
    step = 0.5
    for _ in range(iters):
        g = grad - c * (np.vdot(c, grad))
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-13 * max(1.0, abs(f)):
            break
        improved = False
        while step > 1e-18:
            trial = c - step * g
            trial /= np.linalg.norm(trial)
            f_trial, grad_trial = f_grad(trial)
            if f_trial < f - 1e-18:
                c, f, grad = trial, f_trial, grad_trial
                step *= 1.5
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return f, c


def worst_fidelity_sampled(
    phi: QuantumChannel,
    code: CodeSpace,
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    refine_iters: int = REFINE_ITERS,
) -> WorstCaseResult:
    """Sampled worst-case fidelity: minimum of F^2 over n Haar-random pure
    code states, then local refinement from the best sample.

    The returned value is an upper bound on the true minimum; deterministic
    for a given seed.
    """
    if n < 1:
        raise PreconditionViolated("need at least one sample")
    w = code.basis
    k_code = np.stack([w.conj().T @ k @ w for k in phi.kraus])
    rng = np.random.default_rng(seed)
    best_f2 = np.inf
    best_c = None
    chunk = 65536
    remaining = n
    while remaining > 0:
        batch = min(chunk, remaining)
        remaining -= batch
        cs = _haar_code_coeffs(code.code_dim, batch, rng)
        amps = np.einsum("na,kab,nb->nk", cs.conj(), k_code, cs, optimize=True)
        f2 = np.sum(np.abs(amps) ** 2, axis=1).real
        idx = int(np.argmin(f2))
        if f2[idx] < best_f2:
            best_f2 = float(f2[idx])
            best_c = cs[idx]
    f2_ref, c_ref = _sphere_quartic_min(k_code, None, best_c, iters=refine_iters)
    if f2_ref <= best_f2:
        best_f2, best_c = f2_ref, c_ref
    psi = w @ best_c
    return WorstCaseResult(
        f2_min=best_f2,
        eta=1.0 - best_f2,
        worst_state=psi,
        bloch=None,
        method=SAMPLED,
        samples=n,
        seed=seed,
    )


def worst_case_fidelity(
    noise: QuantumChannel,
    recovery: QuantumChannel | None,
    code: CodeSpace,
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> WorstCaseResult:
    """Worst-case fidelity of recovery-after-noise over pure code states.

    recovery = None means no recovery (identity map).  Qubit codes are
    solved exactly; larger codes fall back to the sampled estimator.
    """
    if recovery is None:
        phi_apply = noise.apply
        phi_channel = noise
    else:
        phi_apply = lambda rho: recovery.apply(noise.apply(rho))  # noqa: E731
        phi_channel = None
    if code.code_dim == 2:
        m = _process_matrix_from_apply(phi_apply, code, allow_leakage=True)
        if m.is_tp and m.is_unital:
            return worst_fidelity_unital_qubit(m)
        return _lagrange_qubit_core(m)
    if phi_channel is None:
        phi_channel = compose(recovery, noise)
    return worst_fidelity_sampled(phi_channel, code, samples, seed)

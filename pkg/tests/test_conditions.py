import numpy as np
import pytest

from aqec import (
    QuantumChannel,
    alternate_condition_residual,
    amplitude_damping,
    aqec_diagnostics,
    build_r_perf,
    channels_equal,
    check_perfect_qec,
    identity_channel,
    near_optimality_bound_check,
    near_optimality_factor,
    psd_sqrt,
    random_code,
    tensor_power,
    transpose_channel,
)
from aqec.conditions import Verdict, _deviation_operators
from aqec.exceptions import CertificateInvalid, NotTP
from aqec.models import (
    bit_flip_channel,
    bit_flip_code,
    example5_channel,
    example5_eta_formula,
    leung_code,
    truncated_damping_channel,
)

from helpers import random_tp_channel
from properties import (
    check_condition_equivalence,
    check_delta_sum_bounds_eta,
    check_eta_dual_route,
    check_verdict_soundness,
)


def test_bitflip_certificate_diagonal_alpha():
    code = bit_flip_code()
    e = bit_flip_channel(0.1)
    cert = check_perfect_qec(e, code)
    assert cert.satisfied and cert.residual < 1e-12
    off = cert.alpha - np.diag(np.diagonal(cert.alpha))
    assert np.max(np.abs(off)) < 1e-12
    # trace of alpha equals the restricted trace factor
    a = (1 - 0.1) ** 2 * (1 + 2 * 0.1)
    assert abs(np.trace(cert.alpha).real - a) < 1e-12


def test_identity_channel_certificate():
    code = random_code(4, 2, 5)
    cert = check_perfect_qec(identity_channel(4), code)
    assert cert.satisfied
    assert np.allclose(cert.alpha, [[1.0]])


def test_full_damping_fails_on_leung():
    # weight-two cross terms break proportionality at first order in gamma
    code = leung_code()
    e = tensor_power(amplitude_damping(0.1), 4)
    cert = check_perfect_qec(e, code)
    assert not cert.satisfied
    assert cert.residual > 1e-3


def test_truncated_damping_residual_scales_quadratically():
    code = leung_code()
    gammas = np.array([0.02, 0.05, 0.1])
    res = [
        check_perfect_qec(truncated_damping_channel(g, 4), code).residual
        for g in gammas
    ]
    slope = np.polyfit(np.log(gammas), np.log(res), 1)[0]
    assert 1.7 < slope < 2.3


def test_build_r_perf_identity_channel():
    code = random_code(4, 2, 8)
    cert = check_perfect_qec(identity_channel(4), code)
    r = build_r_perf(cert, identity_channel(4), code)
    assert np.max(np.abs(r.kraus[0] - code.projector())) < 1e-10


def test_build_r_perf_recovers_code_states():
    code = bit_flip_code()
    e = bit_flip_channel(0.15)
    cert = check_perfect_qec(e, code)
    r = build_r_perf(cert, e, code)
    rng = np.random.default_rng(2)
    total = float(np.sum(cert.diag_values))
    for _ in range(5):
        c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        c /= np.linalg.norm(c)
        psi = code.basis @ c
        rho = np.outer(psi, psi.conj())
        out = r.apply(e.apply(rho))
        assert np.max(np.abs(out - total * rho)) < 1e-9


def test_build_r_perf_equals_transpose_channel():
    code = bit_flip_code()
    e = bit_flip_channel(0.1)
    cert = check_perfect_qec(e, code)
    assert channels_equal(
        build_r_perf(cert, e, code), transpose_channel(e, code).recovery, 1e-10
    )


def test_build_r_perf_rejects_bad_certificate():
    code = leung_code()
    e = tensor_power(amplitude_damping(0.1), 4)
    cert = check_perfect_qec(e, code)
    with pytest.raises(CertificateInvalid):
        build_r_perf(cert, e, code)


def test_aqec_diagnostics_perfect_pair():
    code = bit_flip_code()
    e = bit_flip_channel(0.1)
    diag = aqec_diagnostics(e, code, epsilon=0.0)
    assert np.max(np.abs(diag.deltas)) < 1e-10
    assert diag.eta < 1e-10
    assert diag.verdict is Verdict.CORRECTABLE
    assert diag.restricted_factor < 1.0  # truncated channel is sub-TP


def test_aqec_diagnostics_traceless_and_reconstruction():
    rng = np.random.default_rng(3)
    e = random_tp_channel(5, 3, rng)
    code = random_code(5, 2, 31)
    diag = aqec_diagnostics(e, code, epsilon=0.1)
    p = code.projector()
    w = code.basis
    b, _ = __import__("aqec").linalg.inv_sqrt_on_support(e.apply(p))
    for i in range(e.n_kraus):
        for j in range(e.n_kraus):
            delta = diag.deltas[i, j]
            assert abs(np.trace(delta)) < 1e-10
            k_op = p @ e.kraus[i].conj().T @ b @ e.kraus[j] @ p
            recon = diag.beta[i, j] * p + delta
            assert np.max(np.abs(recon - k_op)) < 1e-10


def test_aqec_diagnostics_example5_sampled():
    e, code = example5_channel(3, 0.05)
    diag = aqec_diagnostics(e, code, epsilon=0.01, eta_samples=50_000, seed=1)
    assert diag.eta_method == "sampled"
    assert abs(diag.eta - example5_eta_formula(3, 0.05)) < 1e-4
    assert abs(abs(diag.worst_state[0]) - 1.0) < 1e-4


def test_aqec_diagnostics_rejects_non_tp():
    # a channel that is neither TP nor proportionally TP on the code
    k = np.diag([1.0, 0.5, 0.2, 0.1]).astype(complex)
    e = QuantumChannel([k])
    code = random_code(4, 2, 2)
    with pytest.raises(NotTP):
        aqec_diagnostics(e, code, epsilon=0.1)


def test_alternate_residual_iff_perfect():
    code = bit_flip_code()
    e = bit_flip_channel(0.1)
    assert alternate_condition_residual(e, code) < 1e-12
    # beta equals the principal square root of alpha in the same gauge
    cert = check_perfect_qec(e, code)
    beta, _ = _deviation_operators(e, code, 1e-10)
    assert np.max(np.abs(beta - psd_sqrt(cert.alpha))) < 1e-9
    # diagonal gauge entries are sqrt(d_kk)
    assert np.allclose(
        np.sort(np.diagonal(beta)).real, np.sqrt(np.sort(cert.diag_values))
    )


def test_alternate_residual_identity_channel():
    code = random_code(3, 2, 4)
    e = identity_channel(3)
    assert alternate_condition_residual(e, code) < 1e-12
    beta, _ = _deviation_operators(e, code, 1e-10)
    assert np.allclose(beta, [[1.0]])


def test_alternate_residual_positive_for_leung_full_channel():
    code = leung_code()
    e = tensor_power(amplitude_damping(0.1), 4)
    r = alternate_condition_residual(e, code)
    assert r > 1e-4


def test_near_optimality_factor_values():
    assert near_optimality_factor(0.0, 2) == 3.0
    assert near_optimality_factor(0.0, 5) == 6.0


def test_near_optimality_perfect_pair_saturates():
    code = bit_flip_code()
    probs = [0.7, 0.1, 0.1, 0.1]
    from aqec.models import pauli_string

    ops = [np.sqrt(probs[0]) * pauli_string("III")]
    for pr, s in zip(probs[1:], ("XII", "IXI", "IIX")):
        ops.append(np.sqrt(pr) * pauli_string(s))
    e = QuantumChannel(ops)
    report = near_optimality_bound_check(
        e, code, [transpose_channel(e, code).recovery]
    )
    assert report.eta_p < 1e-9
    assert report.eta_hat < 1e-9
    assert report.bound_satisfied
    assert report.f_zero == 3.0


def test_near_optimality_example5_identity_candidate():
    e, code = example5_channel(3, 0.1)
    report = near_optimality_bound_check(e, code, [None], samples=50_000, seed=9)
    assert abs(report.candidate_etas[0] - 0.1) < 1e-3
    assert abs(report.eta_p - 1.0 / 6.0) < 1e-3
    # identity beats the transpose recovery here, yet the bound holds
    assert report.eta_hat < report.eta_p
    assert report.bound_satisfied
    ratio = report.eta_p / report.candidate_etas[0]
    assert abs(ratio - (3 - 1) / (1 + (3 - 1) * 0.1)) < 5e-2


def test_verdict_thresholds_example5():
    e, code = example5_channel(3, 0.1)
    eta = example5_eta_formula(3, 0.1)
    diag_hi = aqec_diagnostics(e, code, epsilon=10 * eta, eta_samples=20_000)
    assert diag_hi.verdict is Verdict.CORRECTABLE
    eps_lo = eta / 10.0
    assert eps_lo * near_optimality_factor(eps_lo, 3) < eta
    diag_lo = aqec_diagnostics(e, code, epsilon=eps_lo, eta_samples=20_000)
    assert diag_lo.verdict is Verdict.NOT_CORRECTABLE
    # a level inside the gap stays undecided
    eps_mid = eta / 1.5
    assert eps_mid < eta < eps_mid * near_optimality_factor(eps_mid, 3)
    diag_mid = aqec_diagnostics(e, code, epsilon=eps_mid, eta_samples=20_000)
    assert diag_mid.verdict is Verdict.INDETERMINATE


def test_diagnostics_json_fields():
    e, code = example5_channel(3, 0.05)
    diag = aqec_diagnostics(e, code, epsilon=0.2, eta_samples=10_000)
    data = diag.to_json_dict()
    assert set(data) == {
        "beta",
        "eta",
        "eta_method",
        "samples",
        "delta_sum_norm",
        "verdict",
        "epsilon",
        "f_epsilon_d",
    }
    assert data["eta_method"] == "sampled"
    assert data["samples"] == 10_000


def test_property_condition_equivalence():
    check_condition_equivalence(501, cases=15)


def test_property_eta_dual_route():
    check_eta_dual_route(502, cases=15)


def test_property_delta_sum_bound():
    check_delta_sum_bounds_eta(503, cases=30)


def test_property_verdict_soundness():
    check_verdict_soundness(504, cases=10)

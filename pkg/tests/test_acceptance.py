"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Criteria and tolerances are pinned here; nothing is deferred to
later calibration.
"""

import math
import time

import numpy as np

from colorz.colex import (
    derived_quantities,
    generate_hexagonal,
    generate_square_octagon,
    incidence_matrix,
)
from colorz.estimator import (
    compare_methods,
    estimate_expectation,
    plan_samples,
)
from colorz.gf2 import MembershipSolver, is_self_orthogonal, rank
from colorz.ising import (
    IsingModel,
    build_A,
    exact_expectation_codeword_sum,
    exact_overlap,
    gamma,
    local_phases,
    log_Z_spin_enumeration,
    log_Z_via_expectation,
)
from colorz.qsim import (
    emulate_quantum_protocol,
    parity_expectation,
    rotated_model_state,
)
from colorz.stabilizer import apply_clifford_all, css_tableau, sample_basis_batch

from conftest import make_prism, random_model_params

LN2 = math.log(2.0)

H_GATE = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
P_GATE = np.diag([1.0, 1.0j])
Z_GATE = np.diag([1.0, -1.0])


def report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def oracle_lattices():
    """Oracle-checkable pool: hexagonal tori plus genus-0 prisms, F <= 22.

    No valid 4-8 torus has F <= 22 (the octagon sublattice needs even
    periods >= 4, so the smallest is 4x4 with F = 32); prisms supply the
    small-F size ladder instead.
    """
    lattices = [
        ("hex3x3", generate_hexagonal(3, 3)),
        ("hex3x6", generate_hexagonal(3, 6)),
        ("hex6x3", generate_hexagonal(6, 3)),
    ]
    for k in (4, 6, 8, 10, 12, 14, 16, 18, 20):
        lattices.append((f"prism{k}", make_prism(k)))
    return lattices


def criterion1_cases():
    cases = []
    seed = 0
    for name, colex in oracle_lattices():
        for _ in range(2):
            beta, couplings = random_model_params(colex, 5000 + seed)
            cases.append((name, IsingModel(colex, beta, couplings)))
            seed += 1
    return cases


def test_criterion_1_cross_oracle_identity():
    cases = criterion1_cases()
    assert len(cases) >= 20
    worst = 0.0
    t0 = time.perf_counter()
    for name, model in cases:
        z_spin = log_Z_spin_enumeration(model)
        z_expec = log_Z_via_expectation(model)
        z_overlap = gamma(model).log + math.log(exact_overlap(model))
        gap = max(abs(z_spin - z_expec), abs(z_spin - z_overlap)) / max(abs(z_spin), 1.0)
        worst = max(worst, gap)
    elapsed = time.perf_counter() - t0
    report(
        "1 cross-oracle identity",
        worst <= 1e-10,
        f"{len(cases)} cases, worst relative gap {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_self_orthogonality_and_counting():
    generated = [
        generate_hexagonal(3, 3),
        generate_hexagonal(3, 6),
        generate_hexagonal(6, 3),
        generate_hexagonal(6, 6),
        generate_square_octagon(4, 4),
        generate_square_octagon(4, 6),
    ]
    ok = True
    for colex in generated:
        d = derived_quantities(colex)
        B = incidence_matrix(colex)
        ok &= is_self_orthogonal(B)
        ok &= rank(B) == d.faces - 2
        ok &= d.faces == (d.vertices - 4 * d.genus) // 2 + 2
        ok &= d.encoded_qubits == 4 * d.genus
    report("2 self-orthogonality and counting", ok, f"{len(generated)} generated lattices")


def test_criterion_3_high_low_temperature():
    worst_e0 = worst_z0 = 0.0
    min_ferro = 1.0
    for name, colex in oracle_lattices():
        g = derived_quantities(colex).genus
        F = colex.face_count
        e0 = exact_expectation_codeword_sum(IsingModel.uniform(colex, 0.0))
        worst_e0 = max(worst_e0, abs(e0 - 4.0 ** (-g)))
        z0 = log_Z_spin_enumeration(IsingModel.uniform(colex, 0.0))
        worst_z0 = max(worst_z0, abs(z0 - F * LN2) / (F * LN2))
        min_ferro = min(min_ferro, exact_expectation_codeword_sum(IsingModel.uniform(colex, 6.0)))
    ok = worst_e0 <= 1e-12 and worst_z0 <= 1e-10 and min_ferro >= 0.999
    report(
        "3 high/low temperature closed forms",
        ok,
        f"|E0 - 4^-g| <= {worst_e0:.2e}, Z0 rel gap <= {worst_z0:.2e}, min E(betaJ=6) = {min_ferro:.6f}",
    )


def test_criterion_4_partition_bound():
    worst_margin = -math.inf
    for name, model in criterion1_cases():
        F = model.colex.face_count
        log_bound = gamma(model).log - (F - 2) / 2 * LN2
        margin = log_Z_spin_enumeration(model) - log_bound  # must be <= 0
        worst_margin = max(worst_margin, margin)
    report(
        "4 partition-function bound",
        worst_margin <= 1e-12,
        f"max log(Z/bound) = {worst_margin:.3e}",
    )


def test_criterion_5_estimator_guarantee():
    colex = generate_hexagonal(3, 3)
    beta, couplings = random_model_params(colex, 1001)
    model = IsingModel(colex, beta, couplings)
    plan = plan_samples(0.1, 0.9)
    z_exact = math.exp(log_Z_spin_enumeration(model))
    bound = math.exp(gamma(model).log - (colex.face_count - 2) / 2 * LN2 + math.log(0.1))
    runs = 100
    hits = sum(
        abs(estimate_expectation(model, plan, seed=s).z_estimate - z_exact) <= bound
        for s in range(runs)
    )
    needed = 0.9 - 3 * math.sqrt(0.9 * 0.1 / runs)
    report(
        "5 estimator guarantee coverage",
        hits / runs >= needed,
        f"{hits}/{runs} within bound (need >= {needed:.4f})",
    )


def test_criterion_6_sampler_correctness():
    # TV against the dense distribution on an 8-prism (V = 16; its support
    # has 2^8 atoms, so the empirical-TV floor at 1e5 samples is ~0.023;
    # the only generated V <= 20 torus, hex 3x3, has a 2^11-atom support
    # whose floor ~0.057 already exceeds the gate)
    from colorz.qsim import apply_one_qubit, build_omega_dense, dense_distribution

    colex = make_prism(8)
    B = incidence_matrix(colex)
    tableau = apply_clifford_all(css_tableau(B), "HP")
    state = build_omega_dense(B)
    hp = H_GATE @ P_GATE
    for a in range(colex.vertex_count):
        state = apply_one_qubit(state, a, hp)
    probs = dense_distribution(state)
    n = 100_000
    draws = sample_basis_batch(tableau, np.random.default_rng(606), n)[:, 0].astype(np.int64)
    counts = np.bincount(draws, minlength=probs.shape[0]) / n
    tv = 0.5 * float(np.abs(counts - probs).sum())

    hex33 = generate_hexagonal(3, 3)
    B33 = incidence_matrix(hex33)
    omega_tableau = css_tableau(B33)
    solver = MembershipSolver(B33)
    words = sample_basis_batch(omega_tableau, np.random.default_rng(607), n)
    members = int(solver.contains_batch(words).sum())

    ok = tv < 0.05 and members == n
    report(
        "6 sampler correctness",
        ok,
        f"TV = {tv:.4f} at 1e5 samples (V=16); codeword membership {members}/{n} (V=18)",
    )


def test_criterion_7_accuracy_separation():
    colex = generate_hexagonal(3, 3)
    model = IsingModel.uniform(colex, 0.35, 1.0)
    F = colex.face_count
    seeds = range(12)
    reports = [compare_methods(model, 0.1, 0.9, seed=s) for s in seeds]
    ratio_exact = all(r.bound_ratio == 2.0 ** (-(F - 2) / 2) for r in reports)
    norm_main = float(np.mean([r.normalized_error_main for r in reports]))
    norm_base = float(np.mean([r.normalized_error_baseline for r in reports]))
    abs_main = float(np.mean([r.abs_error_main for r in reports]))
    abs_base = float(np.mean([r.abs_error_baseline for r in reports]))
    comparable = norm_main <= 0.1 and norm_base <= 0.1 and 0.2 <= norm_base / norm_main <= 5.0
    separated = abs_base / abs_main >= 3.0
    report(
        "7 accuracy separation",
        ratio_exact and comparable and separated,
        f"bound ratio 2^-(F-2)/2 exact; normalized errors {norm_main:.4f} vs {norm_base:.4f}; "
        f"absolute separation x{abs_base / abs_main:.1f}",
    )


def test_criterion_8_runtime_scaling():
    sizes = [(3, 6), (6, 6), (6, 12), (12, 12), (12, 18)]
    vs, times = [], []
    n = 30
    for dims in sizes:
        colex = generate_hexagonal(*dims)
        tableau = apply_clifford_all(css_tableau(incidence_matrix(colex)), "HP")
        rng = np.random.default_rng(17)
        sample_basis_batch(tableau, rng, 3)  # warm up
        t0 = time.perf_counter()
        sample_basis_batch(tableau, rng, n)
        per_sample = (time.perf_counter() - t0) / n
        vs.append(colex.vertex_count)
        times.append(per_sample)
    exponent = float(np.polyfit(np.log(vs), np.log(times), 1)[0])
    detail = ", ".join(f"V={v}: {t * 1e3:.2f}ms" for v, t in zip(vs, times))
    report("8 runtime scaling", exponent <= 3.5, f"fit exponent {exponent:.2f}; {detail}")


def test_criterion_9_quantum_protocol_emulation():
    colex = make_prism(8)
    beta, couplings = random_model_params(colex, 2002)
    model = IsingModel(colex, beta, couplings)
    exact = exact_expectation_codeword_sum(model)

    dense = parity_expectation(rotated_model_state(model))
    dense_ok = abs(dense - exact) <= 1e-9 * abs(exact)

    epsilon, p = 0.1, 0.9
    plan = plan_samples(epsilon, p)
    runs = 50
    hits = sum(
        abs(emulate_quantum_protocol(model, plan, seed=s).expectation_estimate.real - exact)
        <= epsilon
        for s in range(runs)
    )
    needed = runs * p - 3 * math.sqrt(runs * p * (1 - p))
    report(
        "9 quantum-protocol emulation",
        dense_ok and hits >= needed,
        f"dense rel gap {abs(dense - exact) / abs(exact):.2e}; {hits}/{runs} runs within eps "
        f"(need >= {needed:.1f})",
    )


def test_criterion_10_decomposition_lemmas():
    rng = np.random.default_rng(31337)
    colex = make_prism(4)
    worst_clifford = worst_orth = 0.0
    for _ in range(1000):
        beta = float(rng.uniform(0, 3))
        coupling = float(rng.uniform(-3, 3))
        model = IsingModel.uniform(colex, beta, coupling)
        p = local_phases(model)[0]
        A = build_A(p)
        D = np.diag([np.exp(-1j * p.theta), np.exp(1j * p.theta)])
        recon = Z_GATE @ P_GATE.conj().T @ H_GATE @ D @ H_GATE @ P_GATE
        worst_clifford = max(worst_clifford, float(np.abs(recon - A).max()))
        from colorz.qsim import diagonalize_A

        O = diagonalize_A(p)
        worst_orth = max(worst_orth, float(np.abs(O.T @ Z_GATE @ O - A).max()))
    ok = worst_clifford <= 1e-12 and worst_orth <= 1e-12
    report(
        "10 decomposition lemmas",
        ok,
        f"1000 draws; Clifford route max gap {worst_clifford:.2e}, "
        f"orthogonal route max gap {worst_orth:.2e}",
    )

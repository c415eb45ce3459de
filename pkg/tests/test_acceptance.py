"""Acceptance gate.

Each test records one PASS/FAIL line (shown in the terminal summary) and
then asserts at the stated tolerance.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from conftest import dense_circulant_loops, random_sequence
from pilotcs.channel import SparseChannel, add_awgn, generate_sparse_channel
from pilotcs.correlation import correlation_profile, correlation_profile_naive, sarwate_lhs, welch_bound
from pilotcs.harness import ExperimentConfig, compute_metrics, run_experiment
from pilotcs.measurement import MeasurementOperator, fold_to_circular, linear_convolve
from pilotcs.pilot import assign_pilots
from pilotcs.recovery import SolverConfig, lasso, noisy_lambda
from pilotcs.seqgen import FamilyKind, SequenceFamily, fzc_family, fzc_sequence, gold_family, kasami_family

REF = dict(M=255, L=51, t=10)


def ref_plan():
    return assign_pilots(fzc_family(255), **REF)


def fold_matrix(pilot, L):
    """M x L matrix built column by column: impulse response placed at offset c, then folded."""
    p = np.asarray(pilot.values)
    M = p.size
    out = np.empty((M, L), dtype=np.complex128)
    for c in range(L):
        lin = np.zeros(M + L - 1, dtype=np.complex128)
        lin[c:c + M] = p
        for j in range(L - 1):
            lin[M + j] += lin[j]
        out[:, c] = lin[L - 1:]
    return out


@pytest.mark.parametrize("M", [15, 255])
def test_ac01_fzc_family_law(M, acceptance):
    start = time.perf_counter()
    prof = correlation_profile_naive(fzc_family(M))
    elapsed = time.perf_counter() - start
    ok = prof.theta_a < 1e-12 and abs(prof.theta_c - 1 / math.sqrt(M)) < 1e-10 and elapsed < 5
    acceptance(f"AC1 FZC law M={M}", ok,
               f"theta_a={prof.theta_a:.2e} |theta_c-1/sqrt(M)|={abs(prof.theta_c - 1 / math.sqrt(M)):.2e} "
               f"t={elapsed:.2f}s")
    assert ok


@pytest.mark.parametrize("M", [15, 255])
def test_ac02_sarwate_equality(M, acceptance):
    lhs = sarwate_lhs(correlation_profile(fzc_family(M)))
    rel = abs(lhs - 1 / M ** 2) / (1 / M ** 2)
    ok = rel <= 1e-14
    acceptance(f"AC2 Sarwate equality M={M}", ok, f"rel_err={rel:.2e}")
    assert ok


def test_ac03_ref_operator(acceptance):
    start = time.perf_counter()
    op = MeasurementOperator.from_plan(ref_plan())
    mu, norm_sq = op.coherence(), op.spectral_norm_sq()
    elapsed = time.perf_counter() - start
    ok = (op.N == 510 and abs(mu - 1 / math.sqrt(255)) <= 1e-10
          and abs(norm_sq - 2.0) <= 1e-10 and elapsed < 5)
    acceptance("AC3 reference operator", ok, f"mu={mu:.12f} norm_sq={norm_sq:.12f} t={elapsed:.2f}s")
    assert ok


@pytest.mark.parametrize("name, family, L", [
    ("FZC M=255", lambda: fzc_family(255), 51),
    ("Gold s=5", lambda: gold_family(5), 31),
    ("Kasami s=4", lambda: kasami_family(4), 15),
])
def test_ac04_sandwiches(name, family, L, acceptance):
    fam = family()
    M = fam.period
    t = 2 * M // L
    plan = assign_pilots(fam, t, M, L)
    op = MeasurementOperator.from_plan(plan)
    prof = correlation_profile(plan.base_family)
    N, mu, norm_sq = op.N, op.coherence(), op.spectral_norm_sq()
    slack = 1e-9
    checks = [
        welch_bound(M, N) <= mu + slack,
        mu <= max(prof.theta_a, prof.theta_c) + slack,
        N / M <= norm_sq + slack,
        norm_sq <= (N / M) * (1 + prof.theta_a * (M - 1)) + slack,
    ]
    ok = all(checks)
    acceptance(f"AC4 sandwiches {name}", ok,
               f"welch={welch_bound(M, N):.4f} mu={mu:.4f} theta_max={max(prof.theta_a, prof.theta_c):.4f} "
               f"norm_sq={norm_sq:.4f} upper={(N / M) * (1 + prof.theta_a * (M - 1)):.4f}")
    assert ok


@pytest.mark.parametrize("M, L, t", [(255, 51, 10), (16, 4, 8)])
def test_ac05_structural_identity(M, L, t, acceptance):
    if M == 255:
        fam = fzc_family(255)
    else:
        fam = SequenceFamily.build([fzc_sequence(1, 16), fzc_sequence(3, 16)], FamilyKind.CUSTOM)
    plan = assign_pilots(fam, t, M, L)
    dense = np.hstack([fold_matrix(p, L) for p in plan.pilots])
    op = MeasurementOperator.from_plan(plan)
    ok = dense.shape == (M, t * L) and np.array_equal(dense, op.materialize())
    acceptance(f"AC5 structural identity {(M, L, t)}", ok, "exact element-wise")
    assert ok


def test_ac06_model_chain(acceptance):
    plan = ref_plan()
    op = MeasurementOperator.from_plan(plan)
    rng = np.random.default_rng(6)
    worst = 0.0
    for trial in range(100):
        K = int(rng.integers(1, 200))
        h = generate_sparse_channel(op.N, K, "rayleigh", rng_seed=rng).dense()
        blocks = h.reshape(plan.t, plan.L)
        y = sum(fold_to_circular(linear_convolve(p, hi), plan.M, plan.L)
                for p, hi in zip(plan.pilots, blocks))
        worst = max(worst, np.max(np.abs(y - op.forward(h))))
    ok = worst <= 1e-10
    acceptance("AC6 model chain", ok, f"max_abs_err={worst:.2e} over 100 channels")
    assert ok


def test_ac07_fast_vs_dense(rng, acceptance):
    cases = [[random_sequence(M, rng) for _ in range(q)] for M, q in [(7, 1), (16, 3), (31, 2), (64, 2)]]
    cases.append(list(gold_family(5).subset([0, 1, 2])))
    cases.append(list(fzc_family(63)))
    worst = 0.0
    for bases in cases:
        op = MeasurementOperator(bases)
        A = np.hstack([dense_circulant_loops(b) for b in bases])
        for _ in range(5):
            h = rng.standard_normal(op.N) + 1j * rng.standard_normal(op.N)
            y = rng.standard_normal(op.M) + 1j * rng.standard_normal(op.M)
            worst = max(worst, np.max(np.abs(op.forward(h) - A @ h)),
                        np.max(np.abs(op.adjoint(y) - A.conj().T @ y)))
        G = A.conj().T @ A
        np.fill_diagonal(G, 0)
        worst = max(worst, abs(op.coherence() - np.max(np.abs(G))))
    ok = worst <= 1e-10
    acceptance("AC7 fast vs dense (M<=64)", ok, f"max_abs_err={worst:.2e}")
    assert ok


@pytest.mark.slow
def test_ac08_noiseless_recovery(acceptance):
    cfg = ExperimentConfig(K_list=(60,), snr_db_list=(math.inf,), trials=50, base_seed=2024).validate()
    start = time.perf_counter()
    cell = run_experiment(cfg).cell(60, math.inf)
    elapsed = time.perf_counter() - start
    ok = cell.trials == 50 and cell.exact_rate >= 0.9 and elapsed < 300
    acceptance("AC8 noiseless K=60", ok, f"exact_rate={cell.exact_rate:.2f} t={elapsed:.1f}s")
    assert ok


@pytest.mark.slow
def test_ac09_noisy_trends(acceptance):
    Ks, snrs = (60, 100, 140), (10.0, 20.0, 30.0)
    cfg = ExperimentConfig(K_list=Ks, snr_db_list=snrs, trials=50, base_seed=2024).validate()
    start = time.perf_counter()
    agg = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    mse = {(K, s): agg.cell(K, s).mean_mse for K in Ks for s in snrs}
    margin = 0.05
    failures = []
    for K in Ks:
        for lo, hi in zip(snrs, snrs[1:]):
            if not mse[K, hi] <= (1 - margin) * mse[K, lo]:
                failures.append(f"K={K} snr {lo}->{hi}")
    for s in snrs:
        for a, b in zip(Ks, Ks[1:]):
            if not mse[b, s] >= (1 + margin) * mse[a, s]:
                failures.append(f"snr={s} K {a}->{b}")
    ok = not failures and elapsed < 900
    table = " ".join(f"{K}/{s:g}:{mse[K, s]:.3g}" for K in Ks for s in snrs)
    acceptance("AC9 noisy trends", ok, f"t={elapsed:.1f}s {table} {'; '.join(failures)}")
    assert ok


def test_ac10_single_channel_taps(acceptance):
    plan = ref_plan()
    op = MeasurementOperator.from_plan(plan)
    L, N = plan.L, op.N
    good = 0
    worst = (1.0, 1.0)
    for trial in range(20):
        ss = np.random.SeedSequence([10, trial])
        s1, s2, s3 = ss.spawn(3)
        own = generate_sparse_channel(N, 15, rng_seed=s1, candidates=np.arange(L))
        rest = generate_sparse_channel(N, 45, rng_seed=s2, candidates=np.arange(L, N))
        ch = SparseChannel(N, np.concatenate([own.support, rest.support]),
                           np.concatenate([own.coefficients, rest.coefficients]))
        y, noise = add_awgn(op.forward(ch.dense()), 30.0, rng_seed=s3)
        res = lasso(op, y, dataclasses.replace(
            SolverConfig(), lam=noisy_lambda(noise.realized_sigma_sq, N)))
        m = compute_metrics(ch, res.estimate, N, res.support_estimate)
        p, r = m["support_precision"], m["support_recall"]
        worst = (min(worst[0], p), min(worst[1], r))
        good += p >= 0.9 and r >= 0.9
    ok = good >= 18
    acceptance("AC10 15-tap channel at 30 dB", ok,
               f"{good}/20 trials with precision,recall>=0.9 (min precision {worst[0]:.3f}, "
               f"min recall {worst[1]:.3f})")
    assert ok


def test_ac11_determinism(tmp_path, acceptance):
    cfg = ExperimentConfig(K_list=(20, 60), snr_db_list=(20.0, math.inf), trials=4, base_seed=7)
    outputs = []
    for i, workers in enumerate((1, 1, 2, 2)):
        path = tmp_path / f"run{i}.csv"
        run_experiment(dataclasses.replace(cfg, output_path=str(path)).validate(), workers=workers)
        outputs.append(path.read_bytes())
    ok = len(set(outputs)) == 1
    acceptance("AC11 determinism", ok, "byte-identical across repeats and workers {1, 2}")
    assert ok

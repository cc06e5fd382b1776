"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""

import numpy as np
import pytest

from acceptance_log import record
from oracles import haar_unitaries
from pqcfourier import (
    PauliString,
    design_value,
    evaluate_on_grid,
    expressibility2,
    fit_decay_base,
    gradient_variance,
    haar_second_moment,
    hea,
    hee,
    model_spectrum,
    parameter_shift_grad,
    parseval_sum,
    qnn,
    sum_sq_statistics,
    zero_state,
)
from pqcfourier.circuits import Model, expectation_model
from pqcfourier.diagnostics import swap_operator, trace_norm
from pqcfourier.fourier import grid_points
from pqcfourier.harness import ExperimentConfig, run_expressibility, run_fig3, run_fig4, run_gradvar

SEED = 42
SAMPLES = 300


def check(cid, ok, detail):
    record(cid, bool(ok), detail)
    assert ok, detail


def within(value, target, rel=0.10):
    return abs(value - target) <= rel * target


def test_c1_parseval_sum_matches_design_value():
    parts, ok = [], True
    for n in (2, 4, 6):
        stats = sum_sq_statistics(qnn(n, 20, "Y", "chain"), SAMPLES, SEED)
        theory = design_value(n)
        good = within(stats.mean, theory) and stats.variance < 5e-3
        ok &= good
        parts.append(f"n={n} mean={stats.mean:.6f} (theory {theory:.6f}) var={stats.variance:.2e}")
    check("1", ok, "; ".join(parts))


def test_c2_convergence_in_depth():
    layers = list(range(5, 51, 5))
    means = {L: sum_sq_statistics(qnn(2, L), SAMPLES, SEED).mean for L in layers}
    dev = {L: abs(m - 0.2) for L, m in means.items()}
    shallow = min(dev[5], dev[10])
    deep = max(dev[L] for L in layers if L >= 15)
    ok = shallow > deep and all(within(means[L], 0.2) for L in layers if L >= 15)
    detail = ", ".join(f"L={L}:{means[L]:.4f}" for L in layers)
    check("2", ok, f"n=2 means {detail}")


def test_c3_coefficient_attenuation():
    rec = run_fig4(ExperimentConfig(experiment="fig4", qubits=[2, 4, 6], layers=[15],
                                    samples=SAMPLES, seed=SEED))
    peak = {n: max(r["median_abs"] for r in rec.rows if r["n"] == n) for n in (2, 4, 6)}
    ok = peak[2] > peak[4] > peak[6]
    check("3", ok, "max_k median|c_k| " + ", ".join(f"n={n}:{v:.4f}" for n, v in peak.items()))


def test_c4_probability_type_equality():
    parts, ok = [], True
    for n in (2, 4):
        stats = sum_sq_statistics(qnn(n, 20, output_type="probability"), SAMPLES, SEED)
        theory = design_value(n, "probability")
        ok &= within(stats.mean, theory)
        parts.append(f"n={n} mean={stats.mean:.6f} (theory {theory:.6f})")
    check("4", ok, "; ".join(parts))


def test_c5_parameter_shift_against_finite_difference():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        n, L = int(rng.integers(2, 5)), int(rng.integers(1, 6))
        t = hea(n, L, str(rng.choice(["X", "Y", "Z"])), str(rng.choice(["chain", "ring"])))
        obs = PauliString("".join(rng.choice(list("XYZ"), size=n)))
        m = expectation_model(t, obs)
        theta = rng.uniform(0, 2 * np.pi, t.n_params)
        i = int(rng.integers(t.n_params))
        up, down = theta.copy(), theta.copy()
        up[i] += 1e-5
        down[i] -= 1e-5
        fd = (m.with_params(up).evaluate() - m.with_params(down).evaluate()) / 2e-5
        worst = max(worst, abs(parameter_shift_grad(m, theta, i) - fd))
    check("5", worst < 1e-6, f"max |shift - central difference| = {worst:.2e} over 200 triples")


def test_c6_spectral_exactness():
    rng = np.random.default_rng(SEED)
    err = dict(two_grid=0.0, parseval=0.0, hermitian=0.0, reconstruct=0.0, period=0.0)
    for _ in range(30):
        n, L = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        axis = str(rng.choice(["X", "Y", "Z", "XY"]))
        template = hee(n, L, axis, "chain").then(hea(n, 1, "Y", "chain"))
        obs = PauliString("".join(rng.choice(list("IXYZ"), size=n)))
        m = Model(template, obs, "x").with_params(rng.uniform(0, 2 * np.pi, template.n_params))
        R = m.R
        small, large = model_spectrum(m), model_spectrum(m, 4 * R + 1)
        samples = evaluate_on_grid(m)
        xs = rng.uniform(-10, 10, 20)
        err["two_grid"] = max(err["two_grid"], np.abs(small.coeffs - large.coeffs).max())
        err["parseval"] = max(err["parseval"], abs(parseval_sum(small) - np.mean(samples**2)))
        err["hermitian"] = max(err["hermitian"], np.abs(small.coeffs[::-1] - small.coeffs.conj()).max())
        err["reconstruct"] = max(err["reconstruct"], np.abs(small(xs) - m.evaluate_batch(xs)).max())
        grid = grid_points(2 * R + 1)
        err["period"] = max(err["period"], np.abs(m.evaluate_batch(grid + 2 * np.pi) - samples).max())
    tol = dict(two_grid=1e-10, parseval=1e-10, hermitian=1e-10, reconstruct=1e-8, period=1e-10)
    ok = all(err[k] < tol[k] for k in tol)
    check("6", ok, ", ".join(f"{k}={err[k]:.1e}<{tol[k]:.0e}" for k in tol))


def test_c7_twirl_oracle():
    rng = np.random.default_rng(SEED)
    parts, ok = [], True
    for n in (1, 2):
        d = 2**n
        h = haar_second_moment(zero_state(n)).matrix
        psi = haar_unitaries(d, 10000, rng)[:, :, 0]
        pairs = (psi[:, :, None] * psi[:, None, :]).reshape(-1, d * d)
        mc = pairs.T @ pairs.conj() / psi.shape[0]
        mc_err = np.abs(h - mc).max()
        S = swap_operator(d)
        exact = max(
            np.abs(h - h.conj().T).max(),
            max(0.0, -np.linalg.eigvalsh(h).min()),
            abs(np.trace(h) - 1),
            np.abs(h @ S - S @ h).max(),
        )
        ok &= mc_err < 2e-2 and exact < 1e-10
        parts.append(f"n={n} MC err={mc_err:.3f} invariants={exact:.1e}")
    self_eps = trace_norm(h - h)
    ok &= self_eps == 0.0
    check("7", ok, "; ".join(parts) + f"; eps(Haar, Haar)={self_eps}")


def test_c8_expressibility_trend_and_bound():
    seeds = range(5)
    e1 = [expressibility2(hea(2, 1), zero_state(2), 5000, s) for s in seeds]
    e20 = [expressibility2(hea(2, 20), zero_state(2), 5000, s) for s in seeds]
    trend = all(b < a for a, b in zip(e1, e20))
    stats = sum_sq_statistics(qnn(2, 20), SAMPLES, SEED)
    gap = abs(stats.mean - 0.2)
    slack = 3 * stats.stderr
    bound_hea = gap <= np.mean(e20) + slack
    # the Fourier block itself: the embedding ensemble over x
    e_embed = expressibility2(hee(2, 20), zero_state(2), 5000, SEED)
    bound_embed = gap <= e_embed + slack
    check("8", trend and bound_hea and bound_embed,
          f"eps(L=1)={np.mean(e1):.4f} eps(L=20)={np.mean(e20):.4f} ({sum(b < a for a, b in zip(e1, e20))}/5 seeds); "
          f"|mean-0.2|={gap:.4f} <= eps_hea+3se={np.mean(e20) + slack:.4f}, eps_hee+3se={e_embed + slack:.4f}")


def test_c9_gradient_variance_decay():
    entries = [gradient_variance(expectation_model(hea(n, 20)), 0, 500, SEED, L=20) for n in (2, 4, 6)]
    v = [e.variance for e in entries]
    report = fit_decay_base(entries)
    ok = v[0] > v[1] > v[2] and report.b > 1
    check("9", ok, f"variances {', '.join(f'{x:.4e}' for x in v)}; b={report.b:.3f} (R^2={report.r2:.4f})")


def test_c10_determinism():
    configs = [
        ExperimentConfig(experiment="fig3", qubits=[2], layers=[20], samples=SAMPLES, seed=SEED),
        ExperimentConfig(experiment="fig4", qubits=[2, 4], layers=[5], samples=50, seed=SEED),
        ExperimentConfig(experiment="gradvar", qubits=[2, 4], layers=[5], samples=60, seed=SEED),
        ExperimentConfig(experiment="expressibility", qubits=[2], layers=[1, 3], draws=300,
                         repeats=2, seed=SEED),
    ]
    runners = {"fig3": run_fig3, "fig4": run_fig4, "gradvar": run_gradvar,
               "expressibility": run_expressibility}
    ok = True
    for cfg in configs:
        outputs = set()
        for workers in (1, 1, 8):
            cfg.workers = workers
            outputs.add(runners[cfg.experiment](cfg).to_csv())
        ok &= len(outputs) == 1
    check("10", ok, "fig3/fig4/gradvar/expressibility CSV identical across reruns and 1 vs 8 workers")

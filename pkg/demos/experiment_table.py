#!/usr/bin/env python3
"""Reproducing the estimate-versus-injected-magnitude experiment.

For each grid cell we generate an instance, inject a Gaussian
perturbation of magnitude eps, solve the perturbed problem, and compare
the injected magnitude mu_1 against the linearized backward-error
estimate rho(xi1) of the perturbed solution, along with the relative
residuals of both augmented solves. The estimate should track eps; the
injected magnitude is an upper bound on the true backward error, usually
a couple of orders larger.

The full-size grid lives behind the CLI (`ilse experiment`); this demo
runs a compact version so it finishes in a few seconds.
"""

from ilse.harness import ExperimentConfig, run_experiment

config = ExperimentConfig(
    m=60, n=30, s=12, p=36, q=24,
    kappa_a_list=(1e2, 1e4),
    kappa_b_list=(1e2, 1e4),
    eps_list=(1e-6, 1e-10),
    trials_per_cell=3,
    base_seed=20240901,
    output_format="markdown",
)

rows, table = run_experiment(config)
print(table)

in_band = [r for r in rows if not r.failed and 1.0 <= r.rho_xi1 / r.eps <= 1e3]
print(f"{len(in_band)} of {len(rows)} trials have rho(xi1)/eps inside [1, 1e3].")
print("Estimates degrade at conditioning extremes (kappa ~ 1e8), where the")
print("closed-form multiplier stops being a good surrogate for the optimal one;")
print("the condition_flag column marks rows where the certified upper bound holds.")

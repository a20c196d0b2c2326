#!/usr/bin/env python3
"""Walkthrough: the dense-to-sparse L1 path with cross-validated selection.

Plants three informative features among twenty, walks lambda geometrically
from lambda_max/10 with warm starts until the model is empty, and lets
5-fold cross-validated concordance pick the penalty.
"""

import numpy as np

import coxkit as ck
from coxkit import PathOptions

ds = ck.synth(500, 20, n_informative=3, censor_rate=0.3, seed=9)
train, test = ck.stratified_split(ds, 0.8, seed=9)
print(f"train: {train.n} samples ({train.n_events} events); "
      f"test: {test.n} samples ({test.n_events} events)")
print("planted coefficients:", ck.data.planted_coefficients(20, 3)[:5], "...")

lam_max = ck.lambda_max(train.features, train.durations, train.events)
print(f"\nlambda_max = {lam_max:.3f}; the path starts at lambda_max/10 "
      f"and multiplies by 1.02 per step")

result = ck.lasso_path(train.features, train.durations, train.events,
                       PathOptions(cv_folds=5, seed=9))

print(f"\n{len(result.steps)} steps; every tenth one:")
print(f"{'lambda':>10}  {'selected':>8}  {'cv C-index':>10}")
for step in result.steps[::10] + [result.steps[-1]]:
    print(f"{step.lambda_:10.3f}  {step.n_selected:8d}  {step.cv_cindex:10.4f}")

best = result.best_lambda
support = np.flatnonzero(result.best_beta)
print(f"\nbest lambda by CV: {best:.3f}")
print(f"selected features: {support.tolist()} "
      f"(planted support is [0, 1, 2])")
print("coefficients there:", np.round(result.best_beta[support], 4))

test_scores = test.features @ result.best_beta
print("held-out C-index:",
      round(ck.c_index_fast(test.durations, test.events, test_scores), 4))

# Every accepted fit on the path carries a first-order certificate.
worst = max(
    ck.kkt_violation(train.features, train.durations, train.events,
                     s.beta, s.lambda_)
    for s in result.steps[:: len(result.steps) // 8]
)
print(f"max KKT violation over sampled steps: {worst:.2e} (tolerance 1e-4)")

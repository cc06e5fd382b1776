"""
Gradient variance in deep hardware-efficient circuits
=====================================================

The parameter-shift rule gives exact gradients. Over uniform parameter draws
their variance falls off exponentially in the qubit count; a straight-line
fit of ``log Var`` against ``n log 2`` gives the decay base ``b``.
"""

from pqcfourier import fit_decay_base, gradient_variance, hea
from pqcfourier.circuits import expectation_model

entries = []
for n in (2, 4, 6):
    model = expectation_model(hea(n, 20))  # observable Z^n
    entry = gradient_variance(model, 0, 500, seed=1, L=20)
    entries.append(entry)
    print(f"n={n}  Var[d f / d theta_0] = {entry.variance:.4e}")

report = fit_decay_base(entries)
print(f"fitted b = {report.b:.3f}  (R^2 = {report.r2:.4f})")

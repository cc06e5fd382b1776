"""
Parseval sums against the 2-design value
========================================

If the embedding block were a unitary 2-design, the sum of squared Fourier
coefficients would equal ``1/(2^n + 1)`` for a Pauli observable. Here we
sample the trainable layer 300 times and compare the mean sum with that
value for two layer layouts.

With only RY rotations and CNOTs every state stays real, and the sum settles
well above ``1/(2^n + 1)``. Alternating RX and RY rotations gets much closer
for larger ``n``.
"""

from pqcfourier import design_value, qnn, sum_sq_statistics

SAMPLES, SEED = 300, 42

for axis in ("Y", "XY"):
    print(f"\naxis={axis}")
    print(f"{'n':>3} {'L':>4} {'mean':>10} {'variance':>10} {'1/(2^n+1)':>10}")
    for n in (2, 4, 6):
        for L in (5, 20):
            stats = sum_sq_statistics(qnn(n, L, axis), SAMPLES, SEED)
            print(f"{n:>3} {L:>4} {stats.mean:>10.5f} {stats.variance:>10.2e} {design_value(n):>10.5f}")

# probability-type output: |0..0><0..0| instead of Z^n
print("\nprobability type, axis=XY, L=20")
for n in (2, 4):
    stats = sum_sq_statistics(qnn(n, 20, "XY", output_type="probability"), SAMPLES, SEED)
    print(f"  n={n} mean={stats.mean:.5f} theory={design_value(n, 'probability'):.5f}")

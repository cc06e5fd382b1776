"""
Fourier spectrum of a data re-uploading model
=============================================

A QNN embeds one scalar ``x`` through ``L`` hardware-efficient layers and then
applies one trainable layer. Every rotation carrying ``x`` adds one integer
frequency, so the output is a trigonometric polynomial of degree ``R = n L``
and ``2R + 1`` samples pin down every coefficient.
"""

import numpy as np

from pqcfourier import evaluate_on_grid, model_spectrum, parseval_sum, qnn

# a 2-qubit model with 3 embedding layers and random trainable angles
rng = np.random.default_rng(0)
model = qnn(2, 3).with_params(rng.uniform(0, 2 * np.pi, 2))
print(f"data gates R = {model.R}")

spectrum = model_spectrum(model)
for k, c in zip(spectrum.frequencies, spectrum.coeffs):
    print(f"  k={k:+d}  c_k={c.real:+.5f}{c.imag:+.5f}j")

# coefficients are Hermitian because the output is real
print("Hermitian:", np.allclose(spectrum.coeffs[::-1], spectrum.coeffs.conj()))

# Parseval: sum |c_k|^2 equals the mean of f^2 over one period
samples = evaluate_on_grid(model)
print(f"sum |c_k|^2 = {parseval_sum(spectrum):.12f}")
print(f"mean f^2    = {np.mean(samples ** 2):.12f}")

# the series reproduces the circuit anywhere, not just on the grid
xs = rng.uniform(-5, 5, 5)
print("max reconstruction error:", np.abs(spectrum(xs) - model.evaluate_batch(xs)).max())

"""
How far apart are the classical and compounded ratios?
======================================================

For small daily returns the compounded Sharpe ratio is roughly the classical
one divided by ``1 + (n - 1) mu``, which is close to one plus the yearly
return. This script tabulates the three ratios along a grid of daily means.
"""

import numpy as np

from risk_metrics import MomentSummary, classical_sharpe, compounded_sharpe, compounded_sharpe_approx

n = 252
sigma = 0.01
print(f"{'mu':>8} {'S_a':>8} {'I_a':>8} {'approx':>8} {'S_a/I_a':>8} {'factor':>8}")
for mu in np.linspace(-0.001, 0.003, 9):
    mu = float(mu)
    s_a = classical_sharpe(MomentSummary(mu, sigma, 0, "population"), n)
    i_a = compounded_sharpe(mu, sigma, n).value
    approx, factor = compounded_sharpe_approx(mu, sigma, n)
    ratio = s_a / i_a if i_a else float("nan")
    print(f"{mu:8.4f} {s_a:8.4f} {i_a:8.4f} {approx:8.4f} {ratio:8.4f} {factor:8.4f}")

# Shrinking mu and sigma together, the approximation converges on the exact value.
for t in (1.0, 0.1, 0.01):
    mu, sigma = t * 1e-3, t * 1e-2
    exact = compounded_sharpe(mu, sigma, n).value
    approx, _ = compounded_sharpe_approx(mu, sigma, n)
    print(f"t={t:<5} approx/exact - 1 = {approx / exact - 1:+.5f}")

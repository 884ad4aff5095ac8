"""
An investment that multiplies by 8 or halves
============================================

Each period the account either grows eightfold or halves, with equal odds.
The classical and log Sharpe ratios both rate this highly; the Sharpe ratio
of the compounded yearly return is astronomically small, because the yearly
variance is dominated by a vanishingly unlikely run of wins.
"""

from risk_metrics import ReturnSeries, annual_moments, full_report, prices_to_returns

# net returns +700% and -50%, read off a price path
series = prices_to_returns([100, 800, 400])
print(series.returns)

# treat the two outcomes as the whole distribution: population moments
report = full_report(series, rf=0.0, estimator="population", n=252)
print(f"mean {report.moments.mean}, std {report.moments.std_dev}")
print(f"classical S_a       {report.classical:.4f}")
print(f"log Sharpe L_a      {report.log_sharpe:.4f}")
print(f"compounded I_a      {report.compounded:.4e}  (log10 {report.compounded_log10:.4f})")

# The yearly moments themselves do not fit in a double.
am = annual_moments(3.25, 3.75, 252)
print(f"log10 E(X_n)   = {am.expected_gross.log10_magnitude:.3f}")
print(f"log10 Var(X_n) = {am.variance.log10_magnitude:.3f}")

# With the sample (n - 1) estimator the log Sharpe drops by sqrt(2).
print(f"sample-estimator L_a {full_report(ReturnSeries((7.0, -0.5)), estimator='sample').log_sharpe:.4f}")

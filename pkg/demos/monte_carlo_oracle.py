"""
Checking the yearly moments by simulation
=========================================

The closed-form mean and variance of the compounded return are checked
against a seeded simulation. Output does not depend on ``workers``.
"""

import math

from risk_metrics import DistributionSpec, oracle_check

cases = [
    (DistributionSpec.normal(0.001, 0.01), 252),
    (DistributionSpec.lognormal_matched(0.001, 0.01), 252),
    (DistributionSpec.two_point(7.0, -0.5, 0.5), 5),
]
for spec, n in cases:
    check = oracle_check(spec, n, trials=200_000, seed=1, workers=4)
    print(spec.kind, spec.params, f"n={n}")
    print(f"  E(X_n) analytic {check.analytic_mean_Xn.to_float():.6g}  empirical {check.simulation.empirical_mean_Xn.to_float():.6g}  z={check.mean_z:+.2f}")
    print(f"  Var    analytic {check.analytic_var_Xn.to_float():.6g}  empirical {check.simulation.empirical_var_Xn.to_float():.6g}  rel={check.var_rel_dev:+.4f}")

# Over a full year the two-point law still compounds without overflow; its
# mean is driven by unseen tail paths, but the log-mean is well estimated.
check = oracle_check(DistributionSpec.two_point(7.0, -0.5, 0.5), 252, trials=200_000, seed=1)
sim = check.simulation
print(f"log E(X_n) analytic {check.analytic_mean_Xn.log_magnitude:.2f}, empirical {sim.empirical_mean_Xn.log_magnitude:.2f}")
print(f"E log X_n  analytic {252 * math.log(2):.4f}, empirical {sim.log_mean:.4f} (z={check.log_mean_z:+.2f})")

"""Seeded Monte Carlo estimates of the compounded-return moments.

Each trial draws ``n`` i.i.d. per-period returns and compounds them in log
space (``S = sum(log1p(r_i))``, ``X_n = exp(S)``). Moments of ``X_n`` are
accumulated relative to a per-chunk shift so ``exp(S)`` is never formed for
the raw value, which keeps ``n = 252`` runs on wild laws finite.

Reproducibility
---------------
Trials are split into fixed chunks of :data:`CHUNK_TRIALS`. Chunk ``k`` draws
from ``np.random.Generator(PCG64(SeedSequence(seed, spawn_key=(k,))))``, so
the stream of every chunk depends only on the master seed and ``k``. Chunk
statistics are merged with the pairwise (Chan et al.) update in a fixed
balanced tree over chunk indices. The number of worker threads therefore only
changes who computes a chunk, never the result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, InsufficientDataError, ParseError
from .logspace import ZERO, LogValue
from .returns import MomentSummary
from .sharpe import BINOMIAL_MAX_N, annual_moments, annual_variance_binomial

CHUNK_TRIALS = 16384
REJECTION_WARN_FRACTION = 0.01

Kind = Literal["normal", "lognormal", "two_point"]


@dataclass(frozen=True)
class DistributionSpec:
    """Law of one period's net return.

    ``params`` by kind:

    * ``normal``: ``(mean, std)`` of the net return.
    * ``lognormal``: ``(log_mean, log_std)`` of the gross return ``1 + r``.
    * ``two_point``: ``(up_net, down_net, p_up)``.
    """

    kind: Kind
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        params = tuple(float(x) for x in self.params)
        object.__setattr__(self, "params", params)
        expected = {"normal": 2, "lognormal": 2, "two_point": 3}
        if self.kind not in expected:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if len(params) != expected[self.kind]:
            raise DomainError(f"{self.kind} takes {expected[self.kind]} parameters, got {len(params)}")
        if not all(math.isfinite(x) for x in params):
            raise DomainError(f"non-finite parameter in {params}")
        if self.kind == "normal" and params[1] < 0:
            raise DomainError("normal std must be >= 0")
        if self.kind == "lognormal" and params[1] < 0:
            raise DomainError("lognormal log_std must be >= 0")
        if self.kind == "two_point":
            up, down, p = params
            if up <= -1 or down <= -1:
                raise DomainError("two_point outcomes must exceed -1")
            if not 0.0 <= p <= 1.0:
                raise DomainError("two_point p_up must lie in [0, 1]")

    @classmethod
    def normal(cls, mean: float, std: float) -> DistributionSpec:
        return cls("normal", (mean, std))

    @classmethod
    def lognormal(cls, log_mean: float, log_std: float) -> DistributionSpec:
        return cls("lognormal", (log_mean, log_std))

    @classmethod
    def lognormal_matched(cls, mean: float, log_std: float) -> DistributionSpec:
        """Lognormal gross return whose net mean equals ``mean``."""
        return cls("lognormal", (math.log1p(mean) - 0.5 * log_std**2, log_std))

    @classmethod
    def two_point(cls, up_net: float, down_net: float, p_up: float = 0.5) -> DistributionSpec:
        return cls("two_point", (up_net, down_net, p_up))

    @classmethod
    def parse(cls, text: str) -> DistributionSpec:
        """Parse ``normal:mu,sigma``, ``twopoint:u,d,p`` or ``lognormal:m,s``."""
        name, sep, rest = text.partition(":")
        kinds = {"normal": "normal", "lognormal": "lognormal", "twopoint": "two_point", "two_point": "two_point"}
        if not sep or name.strip().lower() not in kinds:
            raise ParseError(f"bad distribution spec {text!r}; expected normal:mu,sigma | twopoint:u,d,p | lognormal:m,s")
        try:
            params = tuple(float(x) for x in rest.split(","))
        except ValueError:
            raise ParseError(f"bad numbers in distribution spec {text!r}") from None
        try:
            return cls(kinds[name.strip().lower()], params)
        except DomainError as exc:
            raise ParseError(f"invalid distribution spec {text!r}: {exc}") from None

    def deterministic_value(self) -> float | None:
        """The single net return if the law is a point mass, else ``None``."""
        if self.kind == "normal" and self.params[1] == 0.0:
            return self.params[0]
        if self.kind == "lognormal" and self.params[1] == 0.0:
            return math.expm1(self.params[0])
        if self.kind == "two_point":
            up, down, p = self.params
            if p == 1.0 or up == down:
                return up
            if p == 0.0:
                return down
        return None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


def analytic_moments(spec: DistributionSpec) -> MomentSummary:
    """Exact per-period mean and standard deviation of ``spec``.

    The summary is marked ``estimator="population"`` with ``count=0`` since
    it describes the law itself, not a sample.
    """
    if spec.kind == "normal":
        mu, sigma = spec.params
    elif spec.kind == "lognormal":
        m, s = spec.params
        mu = math.expm1(m + 0.5 * s * s)
        sigma = math.sqrt(math.expm1(s * s)) * math.exp(m + 0.5 * s * s)
    else:
        up, down, p = spec.params
        mu = p * up + (1.0 - p) * down
        sigma = math.sqrt(p * (1.0 - p)) * abs(up - down)
    return MomentSummary(mean=mu, std_dev=sigma, count=0, estimator="population")


def analytic_log_mean(spec: DistributionSpec) -> float | None:
    """``E[log(1 + r)]`` when it has a closed form (not for ``normal``)."""
    if spec.kind == "lognormal":
        return spec.params[0]
    if spec.kind == "two_point":
        up, down, p = spec.params
        return p * math.log1p(up) + (1.0 - p) * math.log1p(down)
    value = spec.deterministic_value()
    return None if value is None else math.log1p(value)


def _draw_log_gross(spec: DistributionSpec, rng: np.random.Generator, size: int, n: int) -> tuple[np.ndarray, int]:
    """Per-trial ``sum(log1p(r_i))`` for ``size`` trials; returns (sums, rejected)."""
    point = spec.deterministic_value()
    if point is not None:
        return np.full(size, n * math.log1p(point)), 0
    if spec.kind == "normal":
        r = rng.normal(spec.params[0], spec.params[1], size=(size, n))
        ok = np.all(r > -1.0, axis=1)
        rejected = size - int(np.count_nonzero(ok))
        r = r[ok] if rejected else r
        return np.log1p(r).sum(axis=1), rejected
    if spec.kind == "lognormal":
        z = rng.normal(spec.params[0], spec.params[1], size=(size, n))
        return z.sum(axis=1), 0
    up, down, p = spec.params
    ups = np.count_nonzero(rng.random((size, n)) < p, axis=1)
    return ups * math.log1p(up) + (n - ups) * math.log1p(down), 0


@dataclass(frozen=True)
class _Accumulator:
    """Moments of ``exp(S)`` stored as ``exp(shift) * (mean, m2)``, plus moments of S."""

    count: int
    shift: float
    mean: float
    m2: float
    log_mean: float
    log_m2: float
    attempted: int
    rejected: int

    @classmethod
    def from_sums(cls, s: np.ndarray, attempted: int, rejected: int) -> _Accumulator:
        if s.size == 0:
            return cls(0, -math.inf, 0.0, 0.0, 0.0, 0.0, attempted, rejected)
        shift = float(s.max())
        if shift == float(s.min()):
            return cls(int(s.size), shift, 1.0, 0.0, shift, 0.0, attempted, rejected)
        y = np.exp(s - shift)
        mean = float(y.mean())
        lm = float(s.mean())
        return cls(
            count=int(s.size),
            shift=shift,
            mean=mean,
            m2=float(np.sum((y - mean) ** 2)),
            log_mean=lm,
            log_m2=float(np.sum((s - lm) ** 2)),
            attempted=attempted,
            rejected=rejected,
        )

    def merge(self, other: _Accumulator) -> _Accumulator:
        attempted = self.attempted + other.attempted
        rejected = self.rejected + other.rejected
        if other.count == 0 or self.count == 0:
            base = self if other.count == 0 else other
            return _Accumulator(base.count, base.shift, base.mean, base.m2, base.log_mean, base.log_m2, attempted, rejected)
        na, nb = self.count, other.count
        total = na + nb
        shift = max(self.shift, other.shift)
        sa, sb = math.exp(self.shift - shift), math.exp(other.shift - shift)
        mean_a, mean_b = self.mean * sa, other.mean * sb
        delta = mean_b - mean_a
        mean = mean_a + delta * nb / total
        m2 = self.m2 * sa * sa + other.m2 * sb * sb + delta * delta * na * nb / total
        ldelta = other.log_mean - self.log_mean
        log_mean = self.log_mean + ldelta * nb / total
        log_m2 = self.log_m2 + other.log_m2 + ldelta * ldelta * na * nb / total
        return _Accumulator(total, shift, mean, m2, log_mean, log_m2, attempted, rejected)


def _tree_merge(parts: list[_Accumulator]) -> _Accumulator:
    while len(parts) > 1:
        merged = [parts[i].merge(parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Generator for chunk ``chunk_index`` of a run with master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk_index,))))


def _run_chunk(spec: DistributionSpec, n: int, seed: int, index: int, size: int) -> _Accumulator:
    sums, rejected = _draw_log_gross(spec, chunk_rng(seed, index), size, n)
    return _Accumulator.from_sums(sums, size, rejected)


@dataclass(frozen=True)
class SimulationResult:
    """Empirical moments of ``X_n`` over accepted trials.

    ``empirical_var_Xn`` uses the ``n - 1`` (over trials) estimator.
    ``log_mean``/``log_mean_se`` describe ``log X_n`` directly.
    """

    spec: DistributionSpec
    n: int
    seed: int
    trials: int
    attempted: int
    rejected: int
    empirical_mean_Xn: LogValue
    empirical_var_Xn: LogValue
    standard_error_mean: LogValue
    log_mean: float
    log_mean_se: float

    @property
    def rejection_fraction(self) -> float:
        return self.rejected / self.attempted

    @property
    def rejection_warning(self) -> bool:
        return self.rejection_fraction > REJECTION_WARN_FRACTION


def simulate_annual(
    spec: DistributionSpec,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimulationResult:
    """Simulate ``trials`` compounded ``n``-period gross returns.

    Normal draws may produce a return ``<= -1``; such trials are dropped and
    counted in ``rejected`` rather than truncated.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if trials < 2:
        raise InsufficientDataError(f"need at least 2 trials, got {trials}")
    seed = int(seed)
    sizes = [min(CHUNK_TRIALS, trials - start) for start in range(0, trials, CHUNK_TRIALS)]
    jobs = [(spec, n, seed, i, size) for i, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_chunk(*job), jobs))
    else:
        parts = [_run_chunk(*job) for job in jobs]
    acc = _tree_merge(parts)
    if acc.count < 2:
        raise InsufficientDataError(f"only {acc.count} of {acc.attempted} trials accepted")
    mean = LogValue(1, acc.shift + math.log(acc.mean))
    if acc.m2 > 0.0:
        var = LogValue(1, 2.0 * acc.shift + math.log(acc.m2 / (acc.count - 1)))
        se = LogValue(1, 0.5 * (var.log_magnitude - math.log(acc.count)))
    else:
        var = se = ZERO
    return SimulationResult(
        spec=spec,
        n=n,
        seed=seed,
        trials=acc.count,
        attempted=acc.attempted,
        rejected=acc.rejected,
        empirical_mean_Xn=mean,
        empirical_var_Xn=var,
        standard_error_mean=se,
        log_mean=acc.log_mean,
        log_mean_se=math.sqrt(acc.log_m2 / (acc.count - 1) / acc.count),
    )


def _z_score(empirical: LogValue, analytic: LogValue, se: LogValue) -> float:
    diff = empirical - analytic
    if se.is_zero():
        return 0.0 if diff.is_zero() else math.copysign(math.inf, diff.sign)
    return (diff / se).to_float()


def _relative(empirical: LogValue, analytic: LogValue) -> float:
    diff = empirical - analytic
    if analytic.is_zero():
        return 0.0 if diff.is_zero() else math.inf
    return (diff / analytic).to_float()


@dataclass(frozen=True)
class OracleCheck:
    """Analytic moments of ``X_n`` next to their Monte Carlo estimates.

    ``mean_z`` is ``(empirical - analytic) / SE``; ``var_rel_dev`` is the
    relative error of the empirical variance against the closed form and
    ``var_rel_dev_binomial`` against the binomial sum (``None`` for n > 30).
    """

    simulation: SimulationResult
    per_period: MomentSummary
    analytic_mean_Xn: LogValue
    analytic_var_Xn: LogValue
    binomial_var_Xn: float | None
    mean_z: float
    var_rel_dev: float
    var_rel_dev_binomial: float | None
    log_mean_z: float | None

    def within(self, mean_se: float = 4.0, var_rel: float = 0.05) -> bool:
        ok = abs(self.mean_z) <= mean_se and abs(self.var_rel_dev) <= var_rel
        if self.var_rel_dev_binomial is not None:
            ok = ok and abs(self.var_rel_dev_binomial) <= var_rel
        return ok


def oracle_check(
    spec: DistributionSpec,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> OracleCheck:
    """Compare :func:`simulate_annual` against the analytic moments of ``X_n``."""
    per_period = analytic_moments(spec)
    am = annual_moments(per_period.mean, per_period.std_dev, n)
    sim = simulate_annual(spec, n, trials, seed, workers=workers)
    binom = None
    binom_dev = None
    if n <= BINOMIAL_MAX_N:
        binom = annual_variance_binomial(per_period.mean, per_period.std_dev, n)
        binom_dev = _relative(sim.empirical_var_Xn, LogValue.from_float(binom))
    log_mean_z = None
    exact_log_mean = analytic_log_mean(spec)
    if exact_log_mean is not None:
        target = n * exact_log_mean
        if sim.log_mean_se == 0.0:
            log_mean_z = 0.0 if math.isclose(sim.log_mean, target, rel_tol=1e-12, abs_tol=1e-12) else math.inf
        else:
            log_mean_z = (sim.log_mean - target) / sim.log_mean_se
    return OracleCheck(
        simulation=sim,
        per_period=per_period,
        analytic_mean_Xn=am.expected_gross,
        analytic_var_Xn=am.variance,
        binomial_var_Xn=binom,
        mean_z=_z_score(sim.empirical_mean_Xn, am.expected_gross, sim.standard_error_mean),
        var_rel_dev=_relative(sim.empirical_var_Xn, am.variance),
        var_rel_dev_binomial=binom_dev,
        log_mean_z=log_mean_z,
    )

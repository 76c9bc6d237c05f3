"""Constants for one construction run and their derivation from (epsilon, n)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Sequence

from .errors import SetupInfeasibleError, UsageError
from .kernelcore import to_fraction

MODES = ("practical", "strict")
RECIPES = ("calibrated", "literal")


@dataclass(frozen=True)
class PipelineParams:
    """beta, lam, delta, alpha are exact rationals; gamma=None means pick it from the profile."""

    mode: str
    epsilon: Fraction
    beta: Fraction
    lam: Fraction
    delta: Fraction
    alpha: Fraction
    m: int
    n: int
    gamma: int | None = None
    even_diagonal: bool = False
    recipe: str = "calibrated"
    violations: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("epsilon", "beta", "lam", "delta", "alpha"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}")
        if self.gamma is not None and (self.gamma < 2 or self.gamma % 2):
            raise UsageError("gamma must be an even integer >= 2")
        if not (2 <= self.m <= self.n):
            raise UsageError("need 2 <= m <= n")

    def with_gamma(self, gamma: int) -> "PipelineParams":
        return replace(self, gamma=int(gamma))

    def to_dict(self) -> dict:
        out = asdict(self)
        for k in ("epsilon", "beta", "lam", "delta", "alpha"):
            out[k] = float(out[k])
        out["violations"] = list(self.violations)
        return out


def _log2(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def setup_violations(beta, lam, delta, alpha, M: int, m: int) -> list[str]:
    """Setup inequalities that fail; the m bound is compared in log2 space."""
    beta, lam, delta, alpha = map(to_fraction, (beta, lam, delta, alpha))
    out = []
    if min(beta, lam, delta, alpha) <= 0:
        out.append("beta, lambda, delta, alpha must all be positive")
    if beta > Fraction(1, 1000):
        out.append(f"beta <= 1/1000 fails (beta={float(beta):.4g})")
    if lam > beta**3 / 1000:
        out.append(f"lambda <= beta^3/1000 fails (lambda={float(lam):.4g})")
    if delta > beta**2 * lam**2:
        out.append(f"delta <= beta^2 lambda^2 fails (delta={float(delta):.4g})")
    if not (20 * lam <= beta - alpha <= beta**3 / 5):
        out.append(f"beta - alpha in [20 lambda, beta^3/5] fails (beta-alpha={float(beta - alpha):.4g})")
    if beta > 0 and lam > 0 and delta > 0:
        need = (
            math.log2(10**4 * M * M)
            + 1000 / float(beta) ** 2
            - 2 * _log2(beta)
            - 3 * _log2(lam)
            - 4 * _log2(delta)
        )
        if math.log2(m) < need:
            out.append(f"m >= 10^4 M^2 2^(1000/beta^2) / (beta^2 lambda^3 delta^4) fails: log2 m = {math.log2(m):.1f} < {need:.1f}")
    return out


def sample_size(n: int, beta: Fraction) -> int:
    m = math.floor(n / (1 + beta))
    while (1 + beta) * m > n:
        m -= 1
    return m


def derive_params(
    epsilon,
    n: int,
    mode: str = "practical",
    num_parts: int = 1,
    strict: bool = False,
    recipe: str = "calibrated",
    even_diagonal: bool = False,
) -> PipelineParams:
    """Constants for a run at accuracy ``epsilon`` on ``n`` vertices.

    ``mode="strict"`` uses the proof's constants (beta = eps/10, lam = beta^4,
    delta = beta^10, alpha = beta - 20 lam) and checks the Setup; if it fails
    the run falls back to practical mode with the violations recorded, unless
    ``strict=True`` in which case SetupInfeasibleError is raised.

    Practical mode with ``recipe="calibrated"`` uses beta = eps/2,
    lam = beta/8, alpha = beta - beta^3 / (2 (1 - beta)^2) and
    delta = min(beta^2 lam^2, beta lam / 10); ``recipe="literal"`` keeps
    beta = eps/10, lam = eps/100, alpha = beta - 20 lam, which makes alpha
    negative.  Gamma is left to :func:`choose_gamma`.
    """
    eps = to_fraction(epsilon)
    if not (0 < eps < 1):
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 10:
        raise UsageError("n must be at least 10")
    if mode not in MODES:
        raise UsageError(f"mode must be one of {MODES}")
    if recipe not in RECIPES:
        raise UsageError(f"recipe must be one of {RECIPES}")
    violations: tuple[str, ...] = ()
    if mode == "strict":
        beta = eps / 10
        lam = beta**4
        delta = beta**10
        alpha = beta - 20 * lam
        m = sample_size(n, beta)
        found = setup_violations(beta, lam, delta, alpha, num_parts, m)
        if not found:
            return PipelineParams("strict", eps, beta, lam, delta, alpha, m, n, even_diagonal=even_diagonal)
        if strict:
            raise SetupInfeasibleError("strict Setup is infeasible: " + "; ".join(found), found)
        violations = tuple(found)
    if recipe == "literal":
        beta = eps / 10
        lam = eps / 100
        alpha = beta - 20 * lam
    else:
        beta = eps / 2
        lam = beta / 8
        alpha = beta - beta**3 / (2 * (1 - beta) ** 2)
    delta = min(beta**2 * lam**2, beta * lam / 10)
    m = sample_size(n, beta)
    if not (0 < alpha < beta):
        violations += (f"0 < alpha < beta fails (alpha={float(alpha):.4g}, beta={float(beta):.4g})",)
    return PipelineParams(
        "practical", eps, beta, lam, delta, alpha, m, n,
        even_diagonal=even_diagonal, recipe=recipe, violations=violations,
    )


def choose_gamma(footprint: Sequence, params: PipelineParams, on: Sequence[bool] | None = None) -> int:
    """Largest even Gamma whose flooring costs each class at most a quarter of its buffer.

    Part sizes are (1+beta) m v_i floored to a multiple of Gamma, and the
    targets D_ij move in steps of |Z_j| / Gamma, so a large Gamma gives fine
    targets while the flooring loss (< Gamma) eats into the buffer.
    """
    v = [to_fraction(x) for x in footprint]
    on = [True] * len(v) if on is None else list(on)
    sizes = [(1 + params.beta) * params.m * x for i, x in enumerate(v) if on[i]]
    if not sizes:
        return 2
    top = int(min(sizes))
    top -= top % 2
    for g in range(top, 1, -2):
        if all(s - g * math.floor(s / g) <= params.beta * s / (4 * (1 + params.beta)) for s in sizes):
            return g
    return 2

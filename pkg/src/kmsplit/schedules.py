"""Closed-form parameter sequences and analytic validators for the iteration
hypotheses.

Sequence descriptors are closed forms, so the asymptotic conditions
(divergence of sum(1 - beta_n), summability of successive differences,
liminf bounds) are decided analytically per descriptor kind, never inferred
from finite prefixes.  Custom tables are only checkable on their prefix and
yield ``undetermined`` verdicts for any condition that depends on the tail.
"""

import math
from dataclasses import dataclass, field

__all__ = [
    "SequenceDescriptor",
    "constant",
    "harmonic_approach",
    "oscillating",
    "table",
    "tikhonov_beta",
    "alpha_from_gamma",
    "alpha_schedule_from_gamma",
    "ScheduleSet",
    "ConditionCheck",
    "ValidationReport",
    "validate_km",
    "validate_km_averaged",
    "validate_fb",
]

_KINDS = ("constant", "harmonic-approach", "oscillating", "table", "alpha-from-gamma")

# Conditions with a pointwise component are checked exactly on this prefix;
# the tail is certified from the descriptor's analytic range.
_PREFIX = 512


@dataclass(frozen=True)
class SequenceDescriptor:
    """A closed-form real sequence defined for all n >= 0.

    Kinds
    -----
    constant            n -> value
    harmonic-approach   n -> limit - coeff / (offset + n)
    oscillating         n -> center - amplitude * (-1)**n
    table               explicit values, tail holds the last entry
    alpha-from-gamma    n -> 2*beta_coc / (4*beta_coc - gamma(n))

    ``first`` overrides the value at n = 0 only.
    """

    kind: str
    value: float = math.nan
    limit: float = math.nan
    coeff: float = math.nan
    offset: float = 1.0
    center: float = math.nan
    amplitude: float = math.nan
    values: tuple = ()
    tail: str = "hold"
    first: float | None = None
    gamma: "SequenceDescriptor | None" = None
    beta_coc: float = math.nan

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "harmonic-approach" and not self.offset > 0:
            raise ValueError("harmonic-approach offset must be positive")
        if self.kind == "table" and not self.values:
            raise ValueError("table descriptor needs at least one value")
        if self.kind == "table" and self.tail != "hold":
            raise ValueError(f"unknown table tail rule {self.tail!r}")

    def __call__(self, n):
        if n < 0:
            raise ValueError("sequence index must be nonnegative")
        if n == 0 and self.first is not None:
            return float(self.first)
        if self.kind == "constant":
            return self.value
        if self.kind == "harmonic-approach":
            return self.limit - self.coeff / (self.offset + n)
        if self.kind == "oscillating":
            return self.center - self.amplitude * (1.0 if n % 2 == 0 else -1.0)
        if self.kind == "table":
            return self.values[min(n, len(self.values) - 1)]
        # alpha-from-gamma
        return alpha_from_gamma(self.gamma(n), self.beta_coc)

    def describe(self):
        """Inline key-value form, the same grammar the CLI configs use."""
        if self.kind == "constant":
            body = f"value={self.value:g}"
        elif self.kind == "harmonic-approach":
            body = f"limit={self.limit:g} coeff={self.coeff:g}"
            if self.offset != 1.0:
                body += f" offset={self.offset:g}"
        elif self.kind == "oscillating":
            body = f"center={self.center:g} amplitude={self.amplitude:g}"
        elif self.kind == "table":
            body = "values=" + ",".join(f"{v:g}" for v in self.values)
        else:
            body = f"beta-coc={self.beta_coc:g} of [{self.gamma.describe()}]"
        out = f"kind={self.kind} {body}"
        if self.first is not None:
            out += f" first={self.first:g}"
        return out


def constant(value, first=None):
    return SequenceDescriptor("constant", value=float(value), first=first)


def harmonic_approach(limit, coeff, offset=1.0, first=None):
    """n -> limit - coeff/(offset + n); coeff > 0 approaches the limit from below."""
    return SequenceDescriptor("harmonic-approach", limit=float(limit),
                              coeff=float(coeff), offset=float(offset), first=first)


def oscillating(center, amplitude, first=None):
    """n -> center - amplitude*(-1)**n, a 2-periodic sequence."""
    return SequenceDescriptor("oscillating", center=float(center),
                              amplitude=float(amplitude), first=first)


def table(values, first=None):
    """Explicit finite table; indices past the end hold the last value."""
    return SequenceDescriptor("table", values=tuple(float(v) for v in values),
                              first=first)


def tikhonov_beta(first=0.25):
    """The reference Tikhonov regularization sequence 1 - 1/(1+n) with an
    overridden start value in (0, 1/2)."""
    return harmonic_approach(1.0, 1.0, first=first)


def alpha_from_gamma(gamma_value, beta_coc):
    """Averagedness constant 2*beta/(4*beta - gamma) of a forward-backward map.

    Defined for 0 < gamma < 2*beta; ranges over (1/2, 1) and is increasing
    in gamma.
    """
    if not beta_coc > 0.0:
        raise ValueError("cocoercivity modulus must be positive")
    if not 0.0 < gamma_value < 2.0 * beta_coc:
        raise ValueError(
            f"step {gamma_value} outside (0, {2.0 * beta_coc}) for beta={beta_coc}")
    return 2.0 * beta_coc / (4.0 * beta_coc - gamma_value)


def alpha_schedule_from_gamma(gamma, beta_coc):
    """The derived alpha_n sequence of a variable-step forward-backward run."""
    if not beta_coc > 0.0:
        raise ValueError("cocoercivity modulus must be positive")
    return SequenceDescriptor("alpha-from-gamma", gamma=gamma, beta_coc=float(beta_coc))


@dataclass(frozen=True)
class ScheduleSet:
    """The parameter tuple of a run: beta (Tikhonov), lam (relaxation),
    gamma (step sizes, optional for pure fixed-point runs)."""

    beta: SequenceDescriptor
    lam: SequenceDescriptor
    gamma: SequenceDescriptor | None = None
    beta_coc: float | None = None


# --- analytic structure of the catalog kinds ---------------------------------

@dataclass(frozen=True)
class _Range:
    """Conservative enclosure of a sequence tail, with attainment flags."""
    lo: float
    hi: float
    lo_attained: bool
    hi_attained: bool


def _tail_range(seq, start):
    """Exact range of {seq(m) : m >= start} or None when unknown (tables).

    ``start`` must be >= 1 so the n=0 override never enters the tail.
    """
    if seq.kind == "constant":
        return _Range(seq.value, seq.value, True, True)
    if seq.kind == "harmonic-approach":
        v0 = seq(start)
        if seq.coeff > 0:   # increasing toward the limit
            return _Range(v0, seq.limit, True, False)
        if seq.coeff < 0:   # decreasing toward the limit
            return _Range(seq.limit, v0, False, True)
        return _Range(seq.limit, seq.limit, True, True)
    if seq.kind == "oscillating":
        a = abs(seq.amplitude)
        return _Range(seq.center - a, seq.center + a, True, True)
    if seq.kind == "alpha-from-gamma":
        r = _tail_range(seq.gamma, start)
        if r is None:
            return None
        # alpha is increasing in gamma
        lo = alpha_from_gamma(r.lo, seq.beta_coc) if r.lo_attained else \
            2.0 * seq.beta_coc / (4.0 * seq.beta_coc - r.lo)
        hi = alpha_from_gamma(r.hi, seq.beta_coc) if r.hi_attained else \
            2.0 * seq.beta_coc / (4.0 * seq.beta_coc - r.hi)
        return _Range(lo, hi, r.lo_attained, r.hi_attained)
    return None  # table


def _limit(seq):
    """The limit as n -> infinity, or None when it does not exist / is unknown."""
    if seq.kind == "constant":
        return seq.value
    if seq.kind == "harmonic-approach":
        return seq.limit
    if seq.kind == "oscillating":
        return seq.center if seq.amplitude == 0.0 else None
    if seq.kind == "alpha-from-gamma":
        g = _limit(seq.gamma)
        return None if g is None else 2.0 * seq.beta_coc / (4.0 * seq.beta_coc - g)
    return None


def _liminf(seq):
    if seq.kind == "oscillating":
        return seq.center - abs(seq.amplitude)
    return _limit(seq)


def _delta_sum_finite(seq):
    """Whether sum_{n>=1} |seq(n) - seq(n-1)| converges; None when unknown.

    A single overridden start value only adds one finite term, so ``first``
    never changes the answer.  Monotone convergent tails telescope.
    """
    if seq.kind in ("constant", "harmonic-approach"):
        return True
    if seq.kind == "oscillating":
        return seq.amplitude == 0.0
    if seq.kind == "alpha-from-gamma":
        # 1/alpha_n is affine in gamma_n, and alpha ranges in (1/2, 1), so
        # delta-summability transfers both ways.
        return _delta_sum_finite(seq.gamma)
    return None


def _inv_delta_sum_finite(seq):
    """Whether sum |1/seq(n) - 1/seq(n-1)| converges, for positive sequences."""
    lim = _liminf(seq)
    fin = _delta_sum_finite(seq)
    if fin is None or lim is None:
        return None
    # on [liminf > 0, sup] the reciprocal is bi-Lipschitz
    return bool(fin) if lim > 0.0 else None


def _one_minus_sum_diverges(seq):
    """Whether sum (1 - seq(n)) diverges to +infinity; None when unknown."""
    if seq.kind == "constant":
        return seq.value < 1.0
    if seq.kind == "harmonic-approach":
        if seq.limit < 1.0:
            return True
        if seq.limit == 1.0:
            return seq.coeff > 0.0
        return False
    if seq.kind == "oscillating":
        return seq.center < 1.0
    if seq.kind == "alpha-from-gamma":
        lim = _limit(seq)
        return None if lim is None else lim < 1.0
    return None


def _eventually_periodic(seq):
    # a first-index override is covered by the prefix scan
    return seq.kind in ("constant", "oscillating")


# --- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionCheck:
    group: str      # hypothesis group: "i" (beta), "ii" (lambda), "iii" (gamma), "alpha"
    label: str
    verdict: str    # "proved" | "violated" | "undetermined"
    witness: str = ""

    def format(self):
        line = f"condition ({self.group}) {self.label}: {self.verdict}"
        if self.witness:
            line += f" [{self.witness}]"
        return line


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(c.verdict == "proved" for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.verdict == "violated"]

    def undetermined(self):
        return [c for c in self.checks if c.verdict == "undetermined"]

    def summary(self):
        if self.passed:
            return "all conditions proved"
        bad = self.failures() or self.undetermined()
        return "; ".join(c.format() for c in bad)

    def format(self):
        return "\n".join(c.format() for c in self.checks)


def _check(group, label, verdict, witness=""):
    return ConditionCheck(group, label, verdict, witness)


def _pointwise(group, label, seq, ok, tail_ok):
    """Prefix scan for n <= _PREFIX plus analytic tail certificate."""
    for n in range(_PREFIX + 1):
        try:
            v = seq(n)
        except ValueError as exc:  # derived sequences reject bad inputs
            return _check(group, label, "violated", f"n={n}: {exc}")
        if not math.isfinite(v):
            return _check(group, label, "violated", f"non-finite value at n={n}")
        if not ok(v):
            return _check(group, label, "violated", f"n={n}, value={v:g}")
    try:
        r = _tail_range(seq, _PREFIX + 1)
    except ValueError:
        r = None
    if r is None:
        return _check(group, label, "undetermined", "finite prefix only")
    if tail_ok(r):
        return _check(group, label, "proved")
    return _check(group, label, "violated",
                  f"tail range [{r.lo:g}, {r.hi:g}]")


def _tail_below(r, bound, strict):
    """Whether the whole enclosure lies below ``bound`` ((non-)strictly)."""
    if strict:
        return r.hi < bound or (r.hi == bound and not r.hi_attained)
    return r.hi <= bound


def _tail_above(r, bound, strict):
    if strict:
        return r.lo > bound or (r.lo == bound and not r.lo_attained)
    return r.lo >= bound


def _bounds_check(group, label, seq, lower, upper, upper_strict):
    return _pointwise(
        group, label, seq,
        ok=lambda v: (v > lower) and (v < upper if upper_strict else v <= upper),
        tail_ok=lambda r: _tail_above(r, lower, True) and _tail_below(r, upper, upper_strict),
    )


def _limit_check(group, label, seq, target):
    lim = _limit(seq)
    if lim is None:
        if seq.kind == "oscillating":  # 2-periodic, provably no limit
            return _check(group, label, "violated",
                          f"oscillates between {seq.center - seq.amplitude:g} "
                          f"and {seq.center + seq.amplitude:g}")
        return _check(group, label, "undetermined", "finite prefix only")
    if lim == target:
        return _check(group, label, "proved")
    return _check(group, label, "violated", f"limit is {lim:g}")


def _tri_check(group, label, answer, why_unknown="finite prefix only", witness=""):
    if answer is None:
        return _check(group, label, "undetermined", why_unknown)
    return _check(group, label, "proved" if answer else "violated",
                  "" if answer else witness)


def _liminf_positive(group, label, seq):
    lim = _liminf(seq)
    if lim is None:
        return _check(group, label, "undetermined", "finite prefix only")
    if lim > 0.0:
        return _check(group, label, "proved")
    return _check(group, label, "violated", f"liminf is {lim:g}")


def _beta_group(beta):
    return [
        _bounds_check("i", "0 < beta_n <= 1", beta, 0.0, 1.0, upper_strict=False),
        _limit_check("i", "beta_n -> 1", beta, 1.0),
        _tri_check("i", "sum(1 - beta_n) = +inf", _one_minus_sum_diverges(beta),
                   witness="series does not diverge to +inf"),
        _tri_check("i", "sum|beta_n - beta_{n-1}| < inf", _delta_sum_finite(beta),
                   witness="differences are not summable"),
    ]


def _lam_tail_group(lam, group="ii"):
    return [
        _liminf_positive(group, "liminf lambda_n > 0", lam),
        _tri_check(group, "sum|lambda_n - lambda_{n-1}| < inf", _delta_sum_finite(lam),
                   witness="differences are not summable"),
    ]


def validate_km(beta, lam):
    """Hypotheses of the regularized fixed-point scheme for nonexpansive
    families: conditions (i) on beta and (ii) on lambda."""
    checks = _beta_group(beta)
    checks.append(_bounds_check("ii", "0 < lambda_n <= 1", lam, 0.0, 1.0,
                                upper_strict=False))
    checks.extend(_lam_tail_group(lam))
    return ValidationReport(tuple(checks))


def _coupled_upper(group, label, lam, bound_of, bound_seqs, periodic_ok):
    """Pointwise lambda_n <= bound_of(n) with an analytic tail certificate.

    ``bound_seqs`` are the descriptors the bound depends on; ``periodic_ok``
    computes a conclusion when every involved descriptor is eventually
    periodic (then the prefix scan covers all index residues).
    """
    for n in range(_PREFIX + 1):
        try:
            v, b = lam(n), bound_of(n)
        except ValueError as exc:
            return _check(group, label, "violated", f"n={n}: {exc}")
        if v > b:
            return _check(group, label, "violated",
                          f"n={n}, lambda={v:g} > bound={b:g}")
    seqs = [lam, *bound_seqs]
    if all(_eventually_periodic(s) for s in seqs):
        return _check(group, label, "proved")
    try:
        ranges = [_tail_range(s, _PREFIX + 1) for s in seqs]
    except ValueError:
        ranges = [None]
    if any(r is None for r in ranges):
        return _check(group, label, "undetermined", "finite prefix only")
    verdict, witness = periodic_ok(ranges[0], ranges[1:])
    return _check(group, label, verdict, witness)


def validate_fb(schedules, beta_coc=None):
    """Hypotheses of the variable-step forward-backward scheme: (i) on beta,
    (ii) on lambda with the coupled upper bound (4b - gamma_n)/(2b), and
    (iii) on gamma."""
    if beta_coc is None:
        beta_coc = schedules.beta_coc
    if beta_coc is None or not beta_coc > 0.0:
        raise ValueError("validate_fb needs a positive cocoercivity modulus")
    gamma = schedules.gamma
    if gamma is None:
        raise ValueError("validate_fb needs a gamma schedule")
    lam = schedules.lam
    two_b = 2.0 * beta_coc

    def bound_of(n):
        return (4.0 * beta_coc - gamma(n)) / two_b

    def tail_ok(lam_r, others):
        (gamma_r,) = others
        worst = (4.0 * beta_coc - gamma_r.hi) / two_b
        if lam_r.hi <= worst:
            return "proved", ""
        lam_lim, gamma_lim = _limit(lam), _limit(gamma)
        if lam_lim is not None and gamma_lim is not None:
            if lam_lim > (4.0 * beta_coc - gamma_lim) / two_b:
                return "violated", f"in the limit lambda={lam_lim:g}"
        return "undetermined", "tail enclosure is inconclusive"

    checks = _beta_group(schedules.beta)
    checks.append(_coupled_upper(
        "ii", "0 < lambda_n <= (4 beta - gamma_n)/(2 beta)", lam, bound_of,
        [gamma], tail_ok))
    # positivity of lambda is part of (ii)
    checks.append(_bounds_check("ii", "lambda_n > 0", lam, 0.0, math.inf,
                                upper_strict=True))
    checks.extend(_lam_tail_group(lam))
    checks.append(_bounds_check("iii", f"0 < gamma_n < 2 beta = {two_b:g}",
                                gamma, 0.0, two_b, upper_strict=True))
    checks.append(_liminf_positive("iii", "liminf gamma_n > 0", gamma))
    checks.append(_tri_check("iii", "sum|gamma_n - gamma_{n-1}| < inf",
                             _delta_sum_finite(gamma),
                             witness="differences are not summable"))
    return ValidationReport(tuple(checks))


def validate_km_averaged(beta, lam, alpha):
    """Hypotheses of the regularized scheme for averaged families: (i) on
    beta, (ii) with the bound lambda_n <= 1/alpha_n, and the alpha-sequence
    conditions (positive liminf, summable reciprocal differences)."""
    def bound_of(n):
        return 1.0 / alpha(n)

    def tail_ok(lam_r, others):
        (alpha_r,) = others
        if lam_r.hi <= 1.0 / alpha_r.hi:
            return "proved", ""
        lam_lim, alpha_lim = _limit(lam), _limit(alpha)
        if lam_lim is not None and alpha_lim is not None and lam_lim > 1.0 / alpha_lim:
            return "violated", f"in the limit lambda={lam_lim:g}"
        return "undetermined", "tail enclosure is inconclusive"

    checks = _beta_group(beta)
    checks.append(_coupled_upper("ii", "0 < lambda_n <= 1/alpha_n", lam,
                                 bound_of, [alpha], tail_ok))
    checks.append(_bounds_check("ii", "lambda_n > 0", lam, 0.0, math.inf,
                                upper_strict=True))
    checks.extend(_lam_tail_group(lam))
    checks.append(_bounds_check("alpha", "0 < alpha_n < 1", alpha, 0.0, 1.0,
                                upper_strict=True))
    checks.append(_liminf_positive("alpha", "liminf alpha_n > 0", alpha))
    checks.append(_tri_check("alpha", "sum|1/alpha_n - 1/alpha_{n-1}| < inf",
                             _inv_delta_sum_finite(alpha),
                             witness="reciprocal differences are not summable"))
    return ValidationReport(tuple(checks))

"""MacKinnon response-surface constants for the constant-only ADF test.

P-values follow MacKinnon (1994): the t-ratio is mapped through a low-order
polynomial to a normal quantile, with separate fits for the small-p and
large-p regions split at TAU_STAR. Critical values follow MacKinnon (2010),
a surface in 1/nobs whose leading terms are the asymptotic values.

Only the no-trend single-series case is carried; that is the only
regression this package runs.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

# Region bounds for the p-value fit: below TAU_MIN the p-value is
# indistinguishable from 0, above TAU_MAX from 1.
TAU_STAR = -1.61
TAU_MIN = -18.83
TAU_MAX = 2.74

# quantile = c0 + c1*stat + c2*stat^2 (+ c3*stat^3)
SMALL_P = (2.1659, 1.4412, 0.038269)
LARGE_P = (1.7339, 0.93202, -0.12745, -0.010368)

# cv = b0 + b1/n + b2/n^2 + b3/n^3; rows are the 1%, 5%, 10% levels.
CRIT_SURFACE = {
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.04),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}


def adf_pvalue(stat: float) -> float:
    """P-value for a constant-only ADF t-statistic."""
    if stat <= TAU_MIN:
        return 0.0
    if stat >= TAU_MAX:
        return 1.0
    coeffs = SMALL_P if stat <= TAU_STAR else LARGE_P
    quantile = sum(c * stat ** k for k, c in enumerate(coeffs))
    return float(norm.cdf(quantile))


def adf_critical_values(nobs: int | float = np.inf) -> dict[str, float]:
    """Finite-sample critical values at the 1%, 5%, and 10% levels."""
    out = {}
    for level, (b0, b1, b2, b3) in CRIT_SURFACE.items():
        out[level] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return out

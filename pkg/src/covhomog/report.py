"""Number formatting shared by the text reports."""

import math


def fmt_number(x):
    """Human-readable number: two decimals for moderate magnitudes >= 1,
    otherwise four significant digits."""
    x = float(x)
    if math.isnan(x):
        return "NA"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if 1.0 <= abs(x) < 1e6:
        return f"{x:.2f}"
    if x == 0.0:
        return "0"
    return f"{x:.4g}"


def json_number(x):
    """Float for JSON output; NaN and infinities become ``None``."""
    x = float(x)
    return x if math.isfinite(x) else None

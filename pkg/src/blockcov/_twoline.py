"""Two-segment least-squares line fits shared by the elbow-style selectors."""

import numpy as np


def segment_rss(x, y):
    """Residual sum of squares of the least-squares line through (x, y).

    Segments with fewer than two points are fit exactly (zero residual).
    """
    if x.size < 2:
        return 0.0
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0:
        return syy
    return max(syy - float(xc @ yc) ** 2 / sxx, 0.0)


def two_segment_scan(y, breaks):
    """Total RSS of a two-line fit of ``y`` against its indices, per breakpoint.

    Breakpoint ``b`` fits one line to points 0..b and another to points
    b..end: the segments share the point at ``b``, so an elbow located
    exactly at a sample belongs to both lines and neither side gains from
    excluding it. Returns an array aligned with ``breaks``.
    """
    y = np.asarray(y, dtype=float)
    x = np.arange(y.size, dtype=float)
    out = np.empty(len(breaks))
    for k, b in enumerate(breaks):
        out[k] = segment_rss(x[:b + 1], y[:b + 1]) + segment_rss(x[b:], y[b:])
    return out

"""Pure numpy implementation of the ANOVA sums-of-squares kernels.

Used when the compiled ``_ckernels`` extension is unavailable. Both
backends expose the same two functions and return columns in the order
``(ss_a, ss_b, ss_ab, ss_error, ss_total)``.
"""

import numpy as np

BACKEND = "python"


def anova_ss_batch(values):
    """Balanced two-way decomposition for a stack of datasets.

    ``values`` has shape ``(r, a, b, n)``; the result has shape ``(r, 5)``.
    Means are taken first and squared deviations summed second.
    """
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 4:
        raise ValueError(f"expected a 4-d array, got shape {y.shape}")
    _, a, b, n = y.shape
    cell = y.mean(axis=3)
    grand = cell.mean(axis=(1, 2))
    row = cell.mean(axis=2)
    col = cell.mean(axis=1)

    g = grand[:, None]
    ss_a = b * n * ((row - g) ** 2).sum(axis=1)
    ss_b = a * n * ((col - g) ** 2).sum(axis=1)
    inter = cell - row[:, :, None] - col[:, None, :] + grand[:, None, None]
    ss_ab = n * (inter**2).sum(axis=(1, 2))
    ss_err = ((y - cell[..., None]) ** 2).sum(axis=(1, 2, 3))
    ss_tot = ((y - grand[:, None, None, None]) ** 2).sum(axis=(1, 2, 3))
    return np.stack([ss_a, ss_b, ss_ab, ss_err, ss_tot], axis=1)


def anova_ss(values):
    """Single-dataset form of :func:`anova_ss_batch`; ``values`` is ``(a, b, n)``."""
    y = np.asarray(values, dtype=np.float64)
    return anova_ss_batch(y[None])[0]

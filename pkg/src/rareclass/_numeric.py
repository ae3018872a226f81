import numpy as np


def expit(s):
    """Vectorised logistic function using the sign-split stable form."""
    s = np.asarray(s, dtype=np.float64)
    out = np.empty_like(s)
    neg = s < 0
    e = np.exp(s[neg])
    out[neg] = e / (1.0 + e)
    out[~neg] = 1.0 / (1.0 + np.exp(-s[~neg]))
    return out


def round_half_up(x):
    return int(np.floor(x + 0.5))

"""Deterministic per-trial seed derivation.

One master seed fans out to per-trial seeds through a splitmix64 step,
so trial i is reproducible in isolation and streams do not overlap for
any practical trial count.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z):
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def trial_seed(master_seed, index):
    """64-bit seed for trial `index` under `master_seed`."""
    if index < 0:
        raise ValueError("trial index must be nonnegative")
    return _mix((int(master_seed) + (index + 1) * _GOLDEN) & _MASK)

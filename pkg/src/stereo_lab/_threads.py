import os

ENV_VAR = "STEREO_LAB_THREADS"


def max_workers(default=None):
    """Worker cap from ``STEREO_LAB_THREADS``; falls back to the CPU count."""
    raw = os.environ.get(ENV_VAR)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return default or os.cpu_count() or 1

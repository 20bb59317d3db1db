"""Process-wide knobs read from the environment."""

import os


def max_threads() -> int:
    """Worker cap from ``DISPERSIONLAB_THREADS`` (default 1, never below 1)."""
    try:
        return max(1, int(os.environ.get("DISPERSIONLAB_THREADS", "1")))
    except ValueError:
        return 1

import os


def max_workers() -> int:
    """Thread cap for grid evaluation; ``CAVITYLINE_THREADS`` overrides the CPU count."""
    raw = os.environ.get("CAVITYLINE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"CAVITYLINE_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1

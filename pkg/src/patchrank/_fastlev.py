"""Numba-accelerated Levenshtein core over ASCII byte strings.

Import lazily: pulling in numba costs about a second, so callers only pay
when they first compare strings. If numba is missing the attribute is None
and the pure-Python path takes over.
"""

try:
    import numpy as np
    from numba import njit
except ImportError:  # pragma: no cover - exercised only on minimal installs
    lev_ascii = None
else:

    @njit(cache=True)
    def lev_ascii(a, b):  # pragma: no cover - jitted, covered via levenshtein()
        m = len(a)
        n = len(b)
        if n == 0:
            return m
        if m == 0:
            return n
        prev = np.empty(n + 1, dtype=np.int64)
        cur = np.empty(n + 1, dtype=np.int64)
        for j in range(n + 1):
            prev[j] = j
        for i in range(1, m + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, n + 1):
                best = prev[j - 1] + (1 if ai != b[j - 1] else 0)
                dele = prev[j] + 1
                if dele < best:
                    best = dele
                ins = cur[j - 1] + 1
                if ins < best:
                    best = ins
                cur[j] = best
            prev, cur = cur, prev
        return prev[n]

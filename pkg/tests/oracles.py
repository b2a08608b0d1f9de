"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the library's own code paths: the partition count
below enumerates decompositions directly over sorted root lists, and the
q-binomial oracle expands the defining product/quotient formula through the
generic fraction field with no caching.
"""

from fractions import Fraction


def kostant_count(positive_roots, nu):
    """Number of multisets of positive roots summing to nu (brute force)."""
    roots = sorted(positive_roots, reverse=True)
    n = len(nu)

    def walk(idx, remaining):
        if all(c == 0 for c in remaining):
            return 1
        if idx >= len(roots):
            return 0
        beta = roots[idx]
        best = min((r // b for r, b in zip(remaining, beta) if b), default=0)
        total = 0
        for k in range(best + 1):
            nxt = tuple(r - k * b for r, b in zip(remaining, beta))
            if all(c >= 0 for c in nxt):
                total += walk(idx + 1, nxt)
        return total

    return walk(0, tuple(nu))


def qbinom_product_formula(field, a, r, length="short"):
    """[a; r] expanded literally as [a][a-1]...[a-r+1] / ([r][r-1]...[1])."""
    num = field.one
    den = field.one
    for t in range(r):
        num = num * field.qint(a - t, length)
        den = den * field.qint(r - t, length)
    return num / den


def weyl_orbit_action(datum, word, mu):
    """Iterated simple reflections, coded directly from the Cartan matrix."""
    mu = list(mu)
    for i in reversed(word):
        pairing = 0
        for j, c in enumerate(mu):
            pairing += c * datum.cartan[i][j]
        mu[i] -= pairing
    return tuple(mu)

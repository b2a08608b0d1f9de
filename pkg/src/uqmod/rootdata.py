"""Finite root-system combinatorics for types A, B, C, D.

Conventions used throughout the workbench: the invariant form is normalized
so (alpha|alpha) = 2 for short roots and 4 for long roots; in type C the
first simple root is the long one and in type B the first simple root is the
short one (the distinguished node sits at the alpha_1 end of the diagram).
G2 is rejected.  Roots are coordinate tuples over the simple basis.
"""

from fractions import Fraction
import itertools


class RootDatum:
    """Cartan data, positive roots, and a fixed reduced word for w0."""

    def __init__(self, kind, rank):
        if kind == "G":
            raise ValueError("type G2 is not supported")
        if kind not in ("A", "B", "C", "D"):
            raise ValueError("unsupported Cartan type %r" % (kind,))
        if rank < 1 or (kind == "B" and rank < 2) or (kind == "C" and rank < 2) \
                or (kind == "D" and rank < 3):
            raise ValueError("invalid rank %d for type %s" % (rank, kind))
        self.kind = kind
        self.rank = rank
        self.bilinear = _bilinear_matrix(kind, rank)
        n = rank
        self.cartan = tuple(
            tuple(2 * self.bilinear[j][i] // self.bilinear[i][i] for j in range(n))
            for i in range(n)
        )  # cartan[i][j] = <alpha_j, alpha_i^vee>
        self.positive_roots = self._generate_positive_roots()
        self._posset = set(self.positive_roots)
        self.w0_word = self._default_w0_word()
        pr = prefix_roots(self, self.w0_word)
        if sorted(pr) != sorted(self.positive_roots):
            raise AssertionError("default w0 word does not enumerate Phi+")
        self.w0_prefix_roots = pr
        self._root_position = {beta: j for j, beta in enumerate(pr)}
        self.rho = tuple(
            Fraction(sum(b[i] for b in self.positive_roots), 2) for i in range(n)
        )

    def __repr__(self):
        return "RootDatum(%s%d)" % (self.kind, self.rank)

    def simple_root(self, i):
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def pairing(self, mu, nu):
        """(mu|nu) for lattice vectors; exact (Fraction when inputs are)."""
        total = 0
        for i, a in enumerate(mu):
            if not a:
                continue
            row = self.bilinear[i]
            for j, b in enumerate(nu):
                if b:
                    total += a * row[j] * b
        return total

    def coroot_pairing(self, mu, beta):
        """<mu, beta^vee> = 2(mu|beta)/(beta|beta); integral for mu in Q."""
        num = 2 * self.pairing(mu, beta)
        den = self.pairing(beta, beta)
        val = Fraction(num, den)
        if val.denominator == 1:
            return int(val)
        return val

    def root_length(self, beta):
        norm = self.pairing(beta, beta)
        if norm == 2:
            return "short"
        if norm == 4:
            return "long"
        raise ValueError("%r is not a root" % (beta,))

    def is_positive_root(self, beta):
        return tuple(beta) in self._posset

    def root_position(self, beta):
        """Position of beta in the prefix enumeration of the default w0 word."""
        return self._root_position[tuple(beta)]

    def reflect(self, i, mu):
        """Simple reflection s_i acting on a lattice vector."""
        c = self.coroot_pairing(mu, self.simple_root(i))
        return tuple(mu[j] - (c if j == i else 0) for j in range(self.rank))

    def reflect_root(self, beta, mu):
        """Reflection in an arbitrary root beta."""
        c = self.coroot_pairing(mu, beta)
        return tuple(mu[j] - c * beta[j] for j in range(self.rank))

    def height(self, mu):
        return sum(mu)

    # -- construction helpers ------------------------------------------------

    def _generate_positive_roots(self):
        n = self.rank
        roots = {self.simple_root(i) for i in range(n)}
        frontier = set(roots)
        while frontier:
            new = set()
            for beta in frontier:
                for i in range(n):
                    img = self.reflect(i, beta)
                    if img not in roots:
                        new.add(img)
            roots |= new
            frontier = new
        pos = [r for r in roots if all(c >= 0 for c in r)]
        pos.sort(key=lambda r: (sum(r), r))
        return tuple(pos)

    def _default_w0_word(self):
        n = self.rank
        if self.kind == "A":
            word = []
            for k in range(n, 0, -1):
                word.extend(range(0, k))
            return tuple(word)
        if self.kind == "C":
            prefix = list(range(n)) + list(range(n - 1))
            return tuple(greedy_completion(self, prefix))
        return tuple(greedy_completion(self, []))


def _bilinear_matrix(kind, n):
    # start from the simply-laced chain, then stretch the long roots
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        b[i][i] = 2
    def connect(i, j, val=-1):
        b[i][j] = b[j][i] = val
    if kind in ("A", "B", "C"):
        for i in range(n - 1):
            connect(i, i + 1)
    else:  # D: chain on 0..n-2, fork n-1 attached to n-3
        for i in range(n - 2):
            connect(i, i + 1)
        connect(n - 3, n - 1)
    if kind == "B":
        # alpha_1 short, the others long
        for i in range(1, n):
            b[i][i] = 4
        for i in range(1, n - 1):
            b[i][i + 1] = b[i + 1][i] = -2
        b[0][1] = b[1][0] = -2
    if kind == "C":
        # alpha_1 long, the others short
        b[0][0] = 4
        b[0][1] = b[1][0] = -2
    return tuple(tuple(row) for row in b)


# -- Weyl words -------------------------------------------------------------

def weyl_act(datum, word, mu):
    """Apply the Weyl word s_{i_1}...s_{i_k} to mu (rightmost letter first)."""
    for i in reversed(word):
        mu = datum.reflect(i, mu)
    return tuple(mu)


def word_matrix(datum, word):
    """Images of the simple roots under the word, as row tuples."""
    return tuple(weyl_act(datum, word, datum.simple_root(i))
                 for i in range(datum.rank))


def word_length(datum, word):
    """Coxeter length, computed from the canonical reduced form."""
    return len(reduce_word(datum, word))


def reduce_word(datum, word):
    """Canonical (lexicographically least) reduced word of the same element."""
    mat = list(word_matrix(datum, word))

    def act(m, mu):
        out = [0] * datum.rank
        for i, c in enumerate(mu):
            if c:
                for j in range(datum.rank):
                    out[j] += c * m[i][j]
        return tuple(out)

    out = []
    while True:
        descent = None
        for i in range(datum.rank):
            # s_i is a left descent iff w^{-1}(alpha_i) < 0; test via columns
            img = _preimage_sign(datum, mat, i)
            if img < 0:
                descent = i
                break
        if descent is None:
            break
        out.append(descent)
        # replace w by s_descent * w: postcompose images with s_descent
        mat = [datum.reflect(descent, row) for row in mat]
    return tuple(out)


def _preimage_sign(datum, mat, i):
    """Sign of w^{-1}(alpha_i) where mat rows are w(alpha_j)."""
    # solve sum_j c_j * mat[j] = alpha_i over Q; roots have all coords of one sign
    n = datum.rank
    rows = [[Fraction(mat[j][k]) for k in range(n)] for j in range(n)]
    rhs = [Fraction(1) if k == i else Fraction(0) for k in range(n)]
    sol = _solve_unique(list(map(list, zip(*rows))), rhs)
    if all(c >= 0 for c in sol):
        return 1
    return -1


def _solve_unique(a, b):
    n = len(a)
    m = [row[:] + [b[k]] for k, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        d = m[col][col]
        m[col] = [x / d for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def is_reduced(datum, word):
    pref = prefix_roots(datum, word)
    return all(all(c >= 0 for c in beta) for beta in pref) \
        and len(set(pref)) == len(pref)


def prefix_roots(datum, word):
    """beta_j = s_{i_1}...s_{i_{j-1}}(alpha_{i_j}) for each position j."""
    out = []
    for j in range(len(word)):
        out.append(weyl_act(datum, word[:j], datum.simple_root(word[j])))
    return tuple(out)


def greedy_completion(datum, prefix, letters=None):
    """Extend a reduced prefix to the longest element, lexicographically least.

    With `letters` restricted to a subset of simple indices, completes to the
    longest element of the corresponding parabolic subgroup.
    """
    if letters is None:
        letters = range(datum.rank)
    word = list(prefix)
    if not is_reduced(datum, word):
        raise ValueError("prefix is not reduced")
    while True:
        for i in letters:
            cand = weyl_act(datum, word, datum.simple_root(i))
            if all(c >= 0 for c in cand):
                word.append(i)
                break
        else:
            return word


def longest_word_length(datum, letters):
    """Number of positive roots of the parabolic on the given letters."""
    sub = [beta for beta in datum.positive_roots
           if all(beta[i] == 0 or i in letters for i in range(datum.rank))]
    return len(sub)


# -- commuting sets of roots -------------------------------------------------

def commuting_set(datum, J=None, F=()):
    """A commuting set of roots that is a Z-basis of Q, avoiding Phi_F.

    Returns (Sigma, word): Sigma ordered by its prefix position in the
    returned reduced word for w0.  The inductive construction adds, at each
    stage, the image of a fresh simple root under the longest element of the
    parabolic built so far; the q-commutation of the attached root vectors is
    certified downstream by the algebra engine.  Reduced-word completions are
    fixed lexicographically least.
    """
    n = datum.rank
    F = frozenset(F)
    if len(F) >= n:
        raise ValueError("F must be a proper subset of the simple roots")
    if J is None:
        J = {min(i for i in range(n) if i not in F)}
    J = frozenset(J)
    order = _connected_order(datum, J, F)

    sigma = []
    word = []
    for s, i in enumerate(order):
        beta = weyl_act(datum, word, datum.simple_root(i))
        if any(c < 0 for c in beta):
            raise AssertionError("construction produced a negative root")
        sigma.append(beta)
        word = greedy_completion(datum, word + [i], letters=order[: s + 1])
        assert len(word) == longest_word_length(datum, order[: s + 1])

    for beta in sigma:
        support = {i for i in range(n) if beta[i]}
        if support <= F:
            raise AssertionError("commuting set hit the forbidden parabolic")
    _assert_unimodular(sigma)
    return tuple(sigma), tuple(word)


def _connected_order(datum, J, F):
    n = datum.rank
    adj = {i: [j for j in range(n) if j != i and datum.bilinear[i][j] != 0]
           for i in range(n)}
    start = sorted(J - F)
    if not start:
        start = [min(i for i in range(n) if i not in F)]
        J = J | set(start)
    order = list(start)
    placed = set(order)

    def extend_within(pool):
        while True:
            cands = [i for i in sorted(pool - placed)
                     if any(j in placed for j in adj[i])]
            if not cands:
                if pool - placed:
                    raise ValueError("subset is not connected to the seed")
                return
            order.append(cands[0])
            placed.add(cands[0])

    extend_within(set(J))
    extend_within(set(range(n)))
    return order


def _assert_unimodular(sigma):
    n = len(sigma)
    m = [[Fraction(sigma[i][j]) for j in range(n)] for i in range(n)]
    det = _det(m)
    if abs(det) != 1:
        raise AssertionError("commuting set is not a Z-basis of Q (det %s)" % det)


def _det(m):
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def gram_matrix(datum, sigma):
    return tuple(tuple(datum.pairing(b1, b2) for b2 in sigma) for b1 in sigma)


def dump(datum):
    """Structured text table of the datum, for golden-file tests."""
    lines = []
    lines.append("type\t%s%d" % (datum.kind, datum.rank))
    lines.append("w0\t" + " ".join("s%d" % (i + 1) for i in datum.w0_word))
    lines.append("bilinear\t" + "; ".join(
        " ".join(str(x) for x in row) for row in datum.bilinear))
    for j, beta in enumerate(datum.w0_prefix_roots):
        name = "+".join(
            ("%d*" % c if c > 1 else "") + "a%d" % (i + 1)
            for i, c in enumerate(beta) if c
        )
        lines.append("root\t%d\t%s\t%s" % (j + 1, name, datum.root_length(beta)))
    return "\n".join(lines) + "\n"


def build(kind, rank):
    return RootDatum(kind, rank)

"""Small-scale normal form for U_q in generator words.

Elements are stored as maps (F-word, K-point, E-word) -> scalar where the
words are sequences of simple-root indices, reduced per weight space against
the quotient of the free word space by the two-sided span of the quantum
Serre relators.  All reductions go through cached per-weight Gaussian
eliminations, so this engine is only meant for small heights (building braid
images, root vectors and straightening data); bulk arithmetic lives in the
PBW engine on top of it.
"""

from functools import lru_cache
from itertools import permutations

from .rootdata import weyl_act


class DepthCapExceeded(RuntimeError):
    pass


def _word_weight(datum, word):
    wt = [0] * datum.rank
    for i in word:
        wt[i] += 1
    return tuple(wt)


class WordAlgebra:
    def __init__(self, datum, field, height_cap=8):
        self.datum = datum
        self.field = field
        self.height_cap = height_cap
        self._basis_cache = {}
        self._cross_cache = {}
        self._qeps = {}  # i -> 1/(q_i - q_i^-1)

    def _inv_qdiff(self, i):
        if i not in self._qeps:
            fld = self.field
            length = self.datum.root_length(self.datum.simple_root(i))
            v = fld.q_power(1 if length == "short" else 2)
            self._qeps[i] = fld.one / (v - fld.one / v)
        return self._qeps[i]

    def zero(self):
        return WElement(self, {})

    def one(self):
        return WElement(self, {((), (0,) * self.datum.rank, ()): self.field.one})

    def K(self, mu, power=1):
        mu = tuple(power * c for c in mu)
        return WElement(self, {((), mu, ()): self.field.one})

    def F(self, i):
        return self._reduce_term((i,), (0,) * self.datum.rank, (), self.field.one)

    def E(self, i):
        return self._reduce_term((), (0,) * self.datum.rank, (i,), self.field.one)

    def from_terms(self, terms):
        out = self.zero()
        for (fw, kv, ew), c in terms:
            out = out + self._reduce_term(tuple(fw), tuple(kv), tuple(ew), c)
        return out

    # -- Serre-quotient bases ------------------------------------------------

    def serre_relators(self):
        """Word-form Serre relators for every ordered pair of simple roots."""
        datum, fld = self.datum, self.field
        rels = []
        for i in range(datum.rank):
            for j in range(datum.rank):
                if i == j:
                    continue
                m = 1 - datum.cartan[i][j]  # 1 - <alpha_j, alpha_i^vee>
                length = datum.root_length(datum.simple_root(i))
                terms = []
                for k in range(m + 1):
                    coeff = fld.qbinom(m, k, length)
                    if k % 2:
                        coeff = -coeff
                    word = (i,) * (m - k) + (j,) + (i,) * k
                    terms.append((word, coeff))
                rels.append(terms)
        return rels

    def serre_basis(self, nu):
        """Ordered basis words of weight nu plus the full reduction table.

        Returns (basis, table): `basis` lists the deglex-first independent
        words, `table` maps every word of weight nu to its coordinates as a
        list of (basis word, scalar).  Basis size equals the Kostant
        partition number of nu.
        """
        nu = tuple(nu)
        if nu in self._basis_cache:
            return self._basis_cache[nu]
        if sum(nu) > self.height_cap:
            raise DepthCapExceeded(
                "weight height %d exceeds word-engine cap %d"
                % (sum(nu), self.height_cap))
        words = _words_of_weight(nu)
        index = {w: k for k, w in enumerate(words)}
        rows = []
        for rel in self.serre_relators():
            rel_wt = _word_weight(self.datum, rel[0][0])
            if any(a > b for a, b in zip(rel_wt, nu)):
                continue
            rest = tuple(a - b for a, b in zip(nu, rel_wt))
            for wl in _sub_weights(rest):
                wr = tuple(a - b for a, b in zip(rest, wl))
                for left in _words_of_weight(wl):
                    for right in _words_of_weight(wr):
                        vec = {}
                        for word, coeff in rel:
                            key = left + word + right
                            vec[key] = vec.get(key, self.field.zero) + coeff
                        rows.append({k: v for k, v in vec.items() if v})
        # echelonize with pivots at the deglex-largest word of each row
        pivots = {}
        for row in rows:
            row = dict(row)
            while row:
                lead = max(row, key=lambda w: index[w])
                if lead in pivots:
                    factor = row[lead]
                    for w, c in pivots[lead].items():
                        row[w] = row.get(w, self.field.zero) - factor * c
                    row = {w: c for w, c in row.items() if c and w != lead}
                else:
                    inv = self.field.one / row[lead]
                    pivots[lead] = {w: c * inv for w, c in row.items()}
                    break
        # back-substitute so every pivot row mentions only basis words
        basis = [w for w in words if w not in pivots]
        table = {w: [(w, self.field.one)] for w in basis}
        for w in sorted(pivots, key=lambda w: index[w]):
            expansion = {}
            for u, c in pivots[w].items():
                if u == w:
                    continue
                for bw, bc in table[u]:
                    expansion[bw] = expansion.get(bw, self.field.zero) - c * bc
            table[w] = [(bw, c) for bw, c in expansion.items() if c]
        self._basis_cache[nu] = (tuple(basis), table)
        return self._basis_cache[nu]

    def _reduce_word(self, word, sign):
        """Coordinates of an F-word (sign=-1) or E-word (+1) in its basis."""
        nu = _word_weight(self.datum, word)
        basis, table = self.serre_basis(nu)
        return table[word]

    def _reduce_term(self, fw, kv, ew, coeff):
        out = {}
        for bf, cf in self._reduce_word(fw, -1):
            for be, ce in self._reduce_word(ew, +1):
                key = (bf, kv, be)
                val = out.get(key, self.field.zero) + coeff * cf * ce
                out[key] = val
        return WElement(self, {k: v for k, v in out.items() if v})

    # -- products ------------------------------------------------------------

    def _cross(self, ew, fw):
        """Normal-order E_{ew} * F_{fw}; terms are (fword, kvec, eword, scalar)."""
        key = (ew, fw)
        if key in self._cross_cache:
            return self._cross_cache[key]
        zero_k = (0,) * self.datum.rank
        if not ew or not fw:
            out = [(fw, zero_k, ew, self.field.one)]
        else:
            i = ew[-1]
            head = ew[:-1]
            out = []
            for f1, k1, etail, c1 in self._cross_one(i, fw):
                for f2, k2, e2, c2 in self._cross(head, f1):
                    # move K_{k1} left past the E-letters of e2
                    shift = self.field.q_power(-self.datum.pairing(k1, _word_weight(self.datum, e2)))
                    kv = tuple(a + b for a, b in zip(k1, k2))
                    out.append((f2, kv, e2 + etail, c1 * c2 * shift))
        self._cross_cache[key] = out
        return out

    def _cross_one(self, i, fw):
        """E_i * F_{fw} in normal order; eword part is () or (i,)."""
        zero_k = (0,) * self.datum.rank
        if not fw:
            return [((), zero_k, (i,), self.field.one)]
        j, rest = fw[0], fw[1:]
        out = []
        for f1, k1, e1, c1 in self._cross_one(i, rest):
            out.append(((j,) + f1, k1, e1, c1))
        if i == j:
            alpha = self.datum.simple_root(i)
            rest_wt = _word_weight(self.datum, rest)
            inv = self._inv_qdiff(i)
            kplus = tuple(a for a in alpha)
            kminus = tuple(-a for a in alpha)
            out.append((rest, kplus,
                        (), self.field.q_power(-self.datum.pairing(alpha, rest_wt)) * inv))
            out.append((rest, kminus,
                        (), -self.field.q_power(self.datum.pairing(alpha, rest_wt)) * inv))
        return out

    def mul(self, a, b):
        fld = self.field
        acc = {}
        for (f1, k1, e1), c1 in a.terms.items():
            for (f2, k2, e2), c2 in b.terms.items():
                c12 = c1 * c2
                for fm, km, em, cc in self._cross(e1, f2):
                    # assemble F_{f1} K_{k1} [F_fm K_km E_em] K_{k2} E_{e2}
                    scal = c12 * cc
                    scal *= fld.q_power(-self.datum.pairing(k1, _word_weight(self.datum, fm)))
                    scal *= fld.q_power(-self.datum.pairing(k2, _word_weight(self.datum, em)))
                    fw = f1 + fm
                    kv = tuple(x + y + z for x, y, z in zip(k1, km, k2))
                    ew = em + e2
                    for bf, cf in self._reduce_word(fw, -1):
                        for be, ce in self._reduce_word(ew, +1):
                            key = (bf, kv, be)
                            val = acc.get(key, fld.zero) + scal * cf * ce
                            acc[key] = val
        return WElement(self, {k: v for k, v in acc.items() if v})

    # -- braid operators -------------------------------------------------------

    def braid(self, i, x, inverse=False):
        if inverse:
            return self.psi(self.braid(i, self.psi(x)))
        out = self.zero()
        for (fw, kv, ew), c in x.terms.items():
            term = WElement(self, {((), self.datum.reflect(i, kv), ()): c})
            img = self.one()
            for j in fw:
                img = self.mul(img, self._braid_F(i, j))
            img = self.mul(img, term)
            for j in ew:
                img = self.mul(img, self._braid_E(i, j))
            out = out + img
        return out

    def psi(self, x):
        """The Q-algebra anti-automorphism: fixes E_i, F_i, inverts K."""
        out = self.zero()
        for (fw, kv, ew), c in x.terms.items():
            epart = self.one()
            for j in reversed(ew):
                epart = self.mul(epart, self.E(j))
            # K_{-kv} F_{rev fw} = q^{(kv|wt fw)} F_{rev fw} K_{-kv}
            shift = self.field.q_power(
                self.datum.pairing(kv, _word_weight(self.datum, fw)))
            rest = self._reduce_term(tuple(reversed(fw)),
                                     tuple(-a for a in kv), (), c * shift)
            out = out + self.mul(epart, rest)
        return out

    @lru_cache(maxsize=None)
    def _braid_F(self, i, j):
        datum, fld = self.datum, self.field
        if i == j:
            return WElement(self, {((), tuple(-a for a in datum.simple_root(i)),
                                    (i,)): -fld.one})
        r = -datum.cartan[i][j]  # -<alpha_j, alpha_i^vee>
        length = datum.root_length(datum.simple_root(i))
        v = fld.q_power(1 if length == "short" else 2)
        out = self.zero()
        for k in range(r + 1):
            coeff = v**k / (fld.qfact(k, length) * fld.qfact(r - k, length))
            if k % 2:
                coeff = -coeff
            word = (i,) * k + (j,) + (i,) * (r - k)
            out = out + self._reduce_term(word, (0,) * datum.rank, (), coeff)
        return out

    @lru_cache(maxsize=None)
    def _braid_E(self, i, j):
        datum, fld = self.datum, self.field
        if i == j:
            return WElement(self, {((i,), datum.simple_root(i), ()): -fld.one})
        r = -datum.cartan[i][j]
        length = datum.root_length(datum.simple_root(i))
        v = fld.q_power(1 if length == "short" else 2)
        out = self.zero()
        for k in range(r + 1):
            coeff = (fld.one / v**k) / (fld.qfact(k, length) * fld.qfact(r - k, length))
            if k % 2:
                coeff = -coeff
            word = (i,) * (r - k) + (j,) + (i,) * k
            out = out + self._reduce_term((), (0,) * datum.rank, word, coeff)
        return out


class WElement:
    """A normal-ordered element of the word engine (immutable)."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = terms

    def __add__(self, other):
        out = dict(self.terms)
        fld = self.algebra.field
        for k, v in other.terms.items():
            val = out.get(k, fld.zero) + v
            if val:
                out[k] = val
            elif k in out:
                del out[k]
        return WElement(self.algebra, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, WElement):
            return self.algebra.mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        if isinstance(c, int):
            c = self.algebra.field.coerce(c)
        if not c:
            return self.algebra.zero()
        return WElement(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, WElement) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def weight(self):
        """The Q-grading; raises if the element is not homogeneous."""
        wts = set()
        n = self.algebra.datum.rank
        for (fw, kv, ew) in self.terms:
            fwt = _word_weight(self.algebra.datum, fw)
            ewt = _word_weight(self.algebra.datum, ew)
            wts.add(tuple(ewt[i] - fwt[i] for i in range(n)))
        if len(wts) > 1:
            raise ValueError("element is not weight-homogeneous")
        return wts.pop() if wts else (0,) * n

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (fw, kv, ew), c in sorted(self.terms.items()):
            part = []
            part.extend("F%d" % (i + 1) for i in fw)
            if any(kv):
                part.append("K%s" % (list(kv),))
            part.extend("E%d" % (i + 1) for i in ew)
            bits.append("(%s)*%s" % (self.algebra.field.render(c),
                                     "*".join(part) or "1"))
        return " + ".join(bits)


def _words_of_weight(nu):
    letters = []
    for i, c in enumerate(nu):
        letters.extend([i] * c)
    return tuple(sorted(set(permutations(letters))))


def _sub_weights(nu):
    out = [()]
    for c in nu:
        out = [w + (k,) for w in out for k in range(c + 1)]
    return out

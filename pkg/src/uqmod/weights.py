"""Weight characters, membership predicates and admissibility classifiers.

A character of the torus part is identified with the tuple of its values on
K_{alpha_1},...,K_{alpha_n}; here each value is an ExponentChar, a monomial
+-q^e * prod p_j^{m_j} with a half-integer exponent e.  Membership in the
exponent classes +-q^N, +-q^Z, ... is decided from exponent arithmetic when
the value is parameter-free and from the registry assumptions otherwise;
"unknown" is a first-class outcome and classifiers refuse rather than guess.
"""

from fractions import Fraction


class UndecidableMembership(RuntimeError):
    pass


class ExponentChar:
    """A monomial character value: sign * q^(e2/2) * prod params^exps."""

    __slots__ = ("sign", "e2", "pexp")

    def __init__(self, sign, e2, pexp=()):
        assert sign in (1, -1)
        self.sign = sign
        self.e2 = int(e2)
        self.pexp = tuple(pexp)

    @classmethod
    def one(cls, nparams=0):
        return cls(1, 0, (0,) * nparams)

    @classmethod
    def q_power(cls, e, nparams=0, sign=1):
        f = Fraction(e)
        assert f.denominator in (1, 2)
        return cls(sign, int(2 * f), (0,) * nparams)

    @classmethod
    def parameter(cls, registry, name, sign=1):
        exps = tuple(1 if n == name else 0 for n in registry.names)
        return cls(sign, 0, exps)

    @property
    def q_exp(self):
        return Fraction(self.e2, 2)

    def is_parameter_free(self):
        return not any(self.pexp)

    def __mul__(self, other):
        return ExponentChar(self.sign * other.sign, self.e2 + other.e2,
                            tuple(a + b for a, b in zip(self.pexp, other.pexp)))

    def inv(self):
        return ExponentChar(self.sign, -self.e2, tuple(-a for a in self.pexp))

    def __pow__(self, m):
        if m < 0:
            return self.inv() ** (-m)
        sign = self.sign if m % 2 else 1
        return ExponentChar(sign, m * self.e2, tuple(m * a for a in self.pexp))

    def __eq__(self, other):
        return (isinstance(other, ExponentChar) and self.sign == other.sign
                and self.e2 == other.e2 and self.pexp == other.pexp)

    def __hash__(self):
        return hash((self.sign, self.e2, self.pexp))

    def to_scalar(self, field):
        names = field.registry.names
        assert len(names) == len(self.pexp)
        return field.monomial(self.sign, Fraction(self.e2, 2),
                              tuple(zip(names, self.pexp)))

    def render(self, registry=None):
        names = registry.names if registry is not None else \
            tuple("p%d" % (k + 1) for k in range(len(self.pexp)))
        factors = []
        if self.e2:
            if self.e2 % 2 == 0:
                factors.append("q^%d" % (self.e2 // 2) if self.e2 != 2 else "q")
            else:
                factors.append("q^%d/2" % self.e2)
        for name, e in zip(names, self.pexp):
            if e:
                factors.append(name + ("^%d" % e if e != 1 else ""))
        body = "*".join(factors) if factors else "1"
        return ("+" if self.sign == 1 else "-") + body

    def __repr__(self):
        return self.render()


def parse_exponent_char(text, registry):
    """Parse a weight-literal entry like '+q^-1', '-q^3', 'p1', '+q^1/2*p2'."""
    s = text.strip()
    sign = 1
    if s and s[0] in "+-":
        if s[0] == "-":
            sign = -1
        s = s[1:]
    e2 = 0
    pexp = [0] * len(registry.names)
    if s in ("1", ""):
        return ExponentChar(sign, 0, tuple(pexp))
    for factor in s.split("*"):
        factor = factor.strip()
        if "^" in factor:
            base, _, exp = factor.partition("^")
            if exp.endswith("/2"):
                enum = int(exp[:-2])
                frac2 = enum
            else:
                frac2 = 2 * int(exp)
        else:
            base, frac2 = factor, 2
        base = base.strip()
        if base == "q":
            e2 += frac2
        elif base == "s":
            if frac2 % 2:
                raise ValueError("fractional power of s in %r" % (text,))
            e2 += frac2 // 2
        elif base == "1":
            pass
        else:
            if frac2 % 2:
                raise ValueError("fractional parameter power in %r" % (text,))
            pexp[registry.index(base)] += frac2 // 2
    return ExponentChar(sign, e2, tuple(pexp))


class WeightChar:
    """A character of U_q^0 as the tuple of its values on the K_{alpha_i}."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = tuple(values)

    @classmethod
    def parse(cls, literals, registry):
        return cls(parse_exponent_char(t, registry) for t in literals)

    @classmethod
    def from_q_vector(cls, datum, mu, nparams=0):
        """The integral character q^mu: K_alpha -> q^{(mu|alpha)}."""
        return cls(ExponentChar.q_power(datum.pairing(mu, datum.simple_root(i)),
                                        nparams)
                   for i in range(datum.rank))

    def __eq__(self, other):
        return isinstance(other, WeightChar) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __mul__(self, other):
        return WeightChar(a * b for a, b in zip(self.values, other.values))

    def eval(self, mu):
        """lambda(K_mu) for mu in the root lattice (integer coordinates)."""
        out = None
        for i, m in enumerate(mu):
            term = self.values[i] ** int(m)
            out = term if out is None else out * term
        return out

    def nparams(self):
        return len(self.values[0].pexp)

    def render(self, registry=None):
        return "[" + ", ".join(v.render(registry) for v in self.values) + "]"

    def __repr__(self):
        return self.render()


def q_shift(datum, lam, mu):
    """The character q^mu * lam (mu a rational vector with integral pairings)."""
    vals = []
    for i, v in enumerate(lam.values):
        e = datum.pairing(mu, datum.simple_root(i))
        vals.append(ExponentChar.q_power(e, len(v.pexp)) * v)
    return WeightChar(vals)


def weyl_char_act(datum, word, lam):
    """(w lam)(K_mu) = lam(K_{w^{-1} mu}), for a Weyl word."""
    from .rootdata import weyl_act
    inv = tuple(reversed(word))
    vals = []
    for i in range(datum.rank):
        vals.append(lam.eval(weyl_act(datum, inv, datum.simple_root(i))))
    return WeightChar(vals)


def reflect_char(datum, beta, lam):
    """s_beta acting on characters, beta any root."""
    vals = []
    for i in range(datum.rank):
        vals.append(lam.eval(datum.reflect_root(beta, datum.simple_root(i))))
    return WeightChar(vals)


def dot_action(datum, word, lam):
    """w.lambda = q^{-rho} w(q^rho lambda)."""
    shifted = q_shift(datum, lam, datum.rho)
    moved = weyl_char_act(datum, word, shifted)
    return q_shift(datum, moved, tuple(-c for c in datum.rho))


def dot_reflect(datum, beta, lam):
    """s_beta . lambda for an arbitrary positive root beta."""
    shifted = q_shift(datum, lam, datum.rho)
    moved = reflect_char(datum, beta, shifted)
    return q_shift(datum, moved, tuple(-c for c in datum.rho))


def kbracket(field, datum, lam, i, c, r):
    """Value at lam of the U^0 element {K_alpha_i ; c over r}."""
    length = datum.root_length(datum.simple_root(i))
    scale = 1 if length == "short" else 2
    x = lam.values[i].to_scalar(field)
    out = field.one
    for j in range(1, r + 1):
        num = x * field.q_power(scale * (c - j + 1)) \
            - field.q_power(-scale * (c - j + 1)) / x
        den = field.q_power(scale * j) - field.q_power(-scale * j)
        out = out * num / den
    return out


# -- exponent-class membership -------------------------------------------------

class QClass:
    """A set +-q^S for S one of: scale*N, scale*Z, 1+2Z, scale*{e >= c}."""

    def __init__(self, kind, scale=1, bound=0):
        assert kind in ("N", "Z", "odd", "geq")
        self.kind = kind
        self.scale = scale
        self.bound = bound

    def contains_exponent(self, e):
        """Membership of the exponent e (a Fraction) in S."""
        e = Fraction(e)
        if self.kind == "odd":
            return e.denominator == 1 and e.numerator % 2 == 1
        if e.denominator != 1 or e.numerator % self.scale:
            return False
        k = e.numerator // self.scale
        if self.kind == "N":
            return k >= 0
        if self.kind == "Z":
            return True
        return k >= self.bound

    def subset_of_integers(self):
        return True  # every class above consists of integer exponents

    def describe(self):
        base = "q" if self.scale == 1 else "q_long"
        return {"N": "+-%s^N" % base, "Z": "+-%s^Z" % base,
                "odd": "+-q^(1+2Z)",
                "geq": "+-%s^(Z>=%d)" % (base, self.bound)}[self.kind]


def pm_qN(scale=1):
    return QClass("N", scale)


def pm_qZ(scale=1):
    return QClass("Z", scale)


def pm_q_odd():
    return QClass("odd")


def pm_qZ_geq(bound, scale=1):
    return QClass("geq", scale, bound)


def member(x, cls, registry=None):
    """Decide x in +-q^S; returns 'yes', 'no' or 'unknown'."""
    if x.is_parameter_free():
        return "yes" if cls.contains_exponent(x.q_exp) else "no"
    if registry is None:
        return "unknown"
    from . import scalars
    nz = [(k, e) for k, e in enumerate(x.pexp) if e]
    if any(registry.flag(registry.names[k]) == scalars.GENERIC for k, _ in nz):
        # generic parameters are algebraically independent from q
        return "no"
    if len(nz) == 1:
        k, e = nz[0]
        flag = registry.flag(registry.names[k])
        if abs(e) == 1 and x.e2 % 2 == 0:
            # x in +-q^S <=> p in +-q^(integer set); the flags exclude that
            if flag == scalars.NOT_IN_PM_QZ:
                return "no"
            if flag == scalars.NOT_IN_PM_QN and e == 1 and cls.kind == "N" \
                    and x.q_exp <= 0:
                return "no"
    return "unknown"


def require_member(x, cls, registry=None):
    v = member(x, cls, registry)
    if v == "unknown":
        raise UndecidableMembership(
            "cannot decide %r in %s with the declared assumptions"
            % (x, cls.describe()))
    return v == "yes"


# -- A(lambda), colored diagrams, admissibility --------------------------------

def a_set(datum, lam, registry=None):
    """A(lambda) = simple roots alpha with lambda(K_alpha) outside +-q_alpha^N."""
    out = set()
    for i in range(datum.rank):
        scale = 1 if datum.root_length(datum.simple_root(i)) == "short" else 2
        if not require_member(lam.values[i], pm_qN(scale), registry):
            out.add(i)
    return frozenset(out)


def colored_diagram(datum, lam, registry=None):
    marked = a_set(datum, lam, registry)
    return "-".join("o" if i in marked else "*" for i in range(datum.rank))


def is_integral(datum, lam, registry=None):
    for i in range(datum.rank):
        scale = 1 if datum.root_length(datum.simple_root(i)) == "short" else 2
        if not require_member(lam.values[i], pm_qZ(scale), registry):
            return False
    return True


class Verdict:
    def __init__(self, answer, rule, details=""):
        self.answer = answer  # 'yes' | 'no' | 'integral-defer'
        self.rule = rule
        self.details = details

    def __bool__(self):
        return self.answer == "yes"

    def __repr__(self):
        return "Verdict(%s; %s)" % (self.answer, self.rule)


def q_rho_value(datum, lam, beta):
    """q^rho lambda evaluated on K_beta."""
    nparams = lam.nparams()
    shift = ExponentChar.q_power(datum.pairing(datum.rho, beta), nparams)
    return shift * lam.eval(beta)


def admissible_hw(datum, lam, registry=None):
    """Decide whether L(lambda) is admissible and infinite dimensional.

    Non-integral weights only; integral weights are routed to the classical
    character oracle and reported as deferred.  Types other than A and C
    admit no infinite dimensional admissible simple highest weight modules.
    """
    if is_integral(datum, lam, registry):
        return Verdict("integral-defer",
                       "integral weight: classical-character oracle applies")
    if datum.kind == "A":
        return _admissible_A(datum, lam, registry)
    if datum.kind == "C":
        return _admissible_C(datum, lam, registry)
    return Verdict("no", "type-excluded",
                   "types B, D (and E, F) admit no infinite dimensional "
                   "admissible simple highest weight modules")


def _admissible_A(datum, lam, registry):
    n = datum.rank
    marked = a_set(datum, lam, registry)
    if n == 1:
        if marked:
            return Verdict("yes", "rank-1: weight outside +-q^N")
        return Verdict("no", "rank-1: finite dimensional")
    if len(marked) == 1:
        (i,) = marked
        if i in (0, n - 1):
            return Verdict("yes", "endpoint singleton diagram")
        return Verdict("no", "interior singleton diagram")
    if len(marked) == 2:
        i, j = sorted(marked)
        if j != i + 1:
            return Verdict("no", "disconnected marked pair")
        beta = tuple(1 if k in (i, j) else 0 for k in range(n))
        val = q_rho_value(datum, lam, beta)
        if require_member(val, pm_qZ_geq(1), registry):
            return Verdict("yes", "adjacent pair with integral positive sum",
                           "q^rho lambda(K_{a%d+a%d}) = %r" % (i + 1, j + 1, val))
        return Verdict("no", "adjacent pair, sum condition fails",
                       "q^rho lambda(K_{a%d+a%d}) = %r" % (i + 1, j + 1, val))
    return Verdict("no", "marked set too large or empty")


def _admissible_C(datum, lam, registry):
    n = datum.rank
    for i in range(1, n):
        if not require_member(lam.values[i], pm_qN(), registry):
            return Verdict("no", "short simple value outside +-q^N",
                           "lambda(K_a%d) = %r" % (i + 1, lam.values[i]))
    if not require_member(lam.values[0], pm_q_odd(), registry):
        return Verdict("no", "long simple value not an odd power",
                       "lambda(K_a1) = %r" % (lam.values[0],))
    beta = tuple(1 if k in (0, 1) else 0 for k in range(n))
    val = lam.eval(beta)
    if not require_member(val, pm_qZ_geq(-2), registry):
        return Verdict("no", "lambda(K_{a1+a2}) below -2",
                       "lambda(K_{a1+a2}) = %r" % (val,))
    return Verdict("yes", "type C conditions hold")


def admissible_C_rootwise(datum, lam, registry=None):
    """Equivalent type-C form: q^rho lambda positive-integral on all short
    roots, odd on all long roots."""
    for beta in datum.positive_roots:
        if datum.root_length(beta) == "short":
            if not require_member(q_rho_value(datum, lam, beta),
                                  pm_qZ_geq(1), registry):
                return False
        else:
            if not require_member(lam.eval(beta), pm_q_odd(), registry):
                return False
    return True


def admissible_rank2_sl3(datum, lam, registry=None):
    """Rank-2 test: some positive root has q^rho lambda(K_beta) in +-q^(Z>0)."""
    assert datum.kind == "A" and datum.rank == 2
    return any(require_member(q_rho_value(datum, lam, beta), pm_qZ_geq(1),
                              registry)
               for beta in datum.positive_roots)


def admissible_rank2_C2(datum, lam, registry=None):
    """The C2 lemma, in the convention where alpha_1 is long."""
    assert datum.kind == "C" and datum.rank == 2
    short = [b for b in datum.positive_roots if datum.root_length(b) == "short"]
    long_ = [b for b in datum.positive_roots if datum.root_length(b) == "long"]
    ok_short = all(require_member(q_rho_value(datum, lam, b), pm_qZ_geq(1),
                                  registry) for b in short)
    ok_long = all(require_member(lam.eval(b), pm_q_odd(), registry)
                  for b in long_)
    return ok_short and ok_long


def solve_exponents(datum, nu, sigma):
    """Solve nu = b_1^{beta_1} ... b_n^{beta_n} on the exponent level.

    nu must be parameter-free with positive sign on every K_{beta_j}.
    Returns (x, detA): the exponent vector with b_j = q^{x_j} and the
    determinant of the Gram matrix (the finiteness certificate: at most
    n*detA solutions exist over C*).
    """
    n = len(sigma)
    rhs = []
    for beta in sigma:
        val = nu.eval(beta)
        if not val.is_parameter_free() or val.sign != 1:
            raise ValueError("exponent solving needs positive parameter-free "
                             "values on the commuting roots")
        rhs.append(val.q_exp)
    gram = [[Fraction(datum.pairing(b1, b2)) for b2 in sigma] for b1 in sigma]
    det = _det(gram)
    assert det != 0, "commuting set is not a basis"
    x = _solve(gram, rhs)
    return tuple(x), det


def _det(m):
    from .rootdata import _det as det
    return det(m)


def _solve(a, b):
    from .rootdata import _solve_unique
    return _solve_unique([row[:] for row in a], list(b))

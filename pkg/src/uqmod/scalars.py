"""Exact coefficient arithmetic: Laurent fractions in q^(1/2) and formal parameters.

Every coefficient in the workbench is an element of the fraction field
Q(s, p1, p2, ...) where s stands for a fixed square root of the quantum
parameter (q = s^2) and the p_j are user-declared formal parameters.  We use
sympy's sparse multivariate fraction fields: elements are kept as canonical
gcd-reduced numerator/denominator pairs, so equality is structural and exact.
There is no floating point anywhere.
"""

from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.fields import FracField

GENERIC = "generic"
NOT_IN_PM_QZ = "not_in_pm_qZ"
NOT_IN_PM_QN = "not_in_pm_qN"

_FLAGS = (GENERIC, NOT_IN_PM_QZ, NOT_IN_PM_QN)


class ParameterRegistry:
    """Ordered list of formal parameter names with genericity assumptions.

    A flag records what we are allowed to assume about the complex number the
    parameter stands for: 'generic' means algebraically independent from q and
    from the other parameters, the weaker flags only exclude membership in
    +-q^Z resp. +-q^N.  Assumptions are immutable after registration.
    """

    def __init__(self, entries=()):
        names = []
        flags = {}
        for entry in entries:
            if isinstance(entry, str):
                name, flag = entry, GENERIC
            else:
                name, flag = entry
            if flag not in _FLAGS:
                raise ValueError("unknown assumption flag %r" % (flag,))
            if name in flags or name in ("q", "s"):
                raise ValueError("duplicate or reserved parameter name %r" % (name,))
            names.append(name)
            flags[name] = flag
        self.names = tuple(names)
        self._flags = flags

    def flag(self, name):
        return self._flags[name]

    def index(self, name):
        return self.names.index(name)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __repr__(self):
        return "ParameterRegistry(%s)" % (
            ", ".join("%s:%s" % (n, self._flags[n]) for n in self.names) or "-",
        )


class ScalarField:
    """The coefficient field Q(s, params) with q = s^2.

    Wraps a sympy sparse fraction field under graded lexicographic monomial
    order; canonical forms (gcd-cancelled, normalized denominator) come for
    free from the wrapped representation.
    """

    def __init__(self, registry=None):
        if registry is None:
            registry = ParameterRegistry()
        elif not isinstance(registry, ParameterRegistry):
            registry = ParameterRegistry(registry)
        self.registry = registry
        gens = ("s",) + registry.names
        self.field = FracField(gens, QQ, "grlex")
        self.gens = self.field.gens
        self.s = self.gens[0]
        self.q = self.s**2
        self.one = self.field.one
        self.zero = self.field.zero
        self._qint_cache = {}

    def __repr__(self):
        return "ScalarField(s%s)" % ("".join(", " + n for n in self.registry.names),)

    def __eq__(self, other):
        return isinstance(other, ScalarField) and self.field == other.field

    def __hash__(self):
        return hash(self.field)

    def param(self, name):
        return self.gens[1 + self.registry.index(name)]

    def rational(self, a, b=1):
        return self.field.ground_new(QQ(a, b))

    def q_power(self, e):
        """q^e for integer or half-integer e (exact, as a power of s)."""
        e2 = _as_half_integer_twice(e)
        s = self.s
        return s**e2 if e2 >= 0 else self.one / s**(-e2)

    def monomial(self, sign=1, q_exp=0, param_exps=()):
        """The monomial sign * q^q_exp * prod params^e; q_exp may be half-integral."""
        x = self.q_power(q_exp)
        if sign == -1:
            x = -x
        elif sign != 1:
            raise ValueError("sign must be +-1")
        for name, e in param_exps:
            p = self.param(name)
            x = x * p**e if e >= 0 else x / p**(-e)
        return x

    # -- q-combinatorics ---------------------------------------------------

    def qint(self, n, length="short"):
        """[n] in q_beta where q_beta = q for short roots and q^2 for long."""
        scale = _scale(length)
        key = (n, scale)
        try:
            return self._qint_cache[key]
        except KeyError:
            pass
        if n == 0:
            val = self.zero
        else:
            m = abs(n)
            # [n] = v^(n-1) + v^(n-3) + ... + v^(1-n) with v = s^(2*scale)
            val = self.zero
            for k in range(m):
                val += self.q_power(scale * (m - 1 - 2 * k))
            if n < 0:
                val = -val
        self._qint_cache[key] = val
        return val

    def qfact(self, n, length="short"):
        if n < 0:
            raise ValueError("q-factorial needs n >= 0")
        val = self.one
        for k in range(2, n + 1):
            val *= self.qint(k, length)
        return val

    def qbinom(self, a, r, length="short"):
        """Gaussian binomial [a; r] = [a][a-1]...[a-r+1]/[r]!, valid for a < 0."""
        if r < 0:
            raise ValueError("qbinom needs r >= 0")
        num = self.one
        for t in range(r):
            num *= self.qint(a - t, length)
        return num / self.qfact(r, length)

    def normalize(self, numerator, denominator=None):
        """Canonical representative of a raw fraction; rejects zero denominators."""
        num = self.coerce(numerator)
        if denominator is None:
            return num
        den = self.coerce(denominator)
        if not den:
            raise ZeroDivisionError("zero denominator")
        return num / den

    def coerce(self, x):
        if isinstance(x, type(self.zero)):
            return x
        if isinstance(x, type(self.zero.numer)):  # polynomial side
            return self.field.new(x)
        if isinstance(x, (int, Fraction)):
            return self.field.ground_new(QQ(x.numerator, x.denominator))
        raise TypeError("cannot coerce %r into %r" % (x, self))

    # -- canonical text form ----------------------------------------------

    def render(self, x):
        """Canonical text rendering, re-parseable by parse()."""
        num, den = x.numer, x.denom
        ns = self._render_poly(num)
        if den == self.field.ring.one:
            return ns
        ds = self._render_poly(den)
        if len(num.terms()) > 1 or "*" in ns:
            ns = "(" + ns + ")"
        if len(den.terms()) > 1 or "*" in ds or "/" in ds:
            ds = "(" + ds + ")"
        return ns + "/" + ds

    def _render_poly(self, p):
        terms = sorted(p.terms(), key=lambda t: p.ring.order(t[0]), reverse=True)
        if not terms:
            return "0"
        out = []
        for monom, coeff in terms:
            frag = self._render_term(monom, coeff)
            if not out:
                out.append(frag)
            elif frag.startswith("-"):
                out.append(" - " + frag[1:])
            else:
                out.append(" + " + frag)
        return "".join(out)

    def _render_term(self, monom, coeff):
        factors = []
        s_exp = monom[0]
        if s_exp:
            if s_exp % 2 == 0:
                factors.append("q" + _exp_str(s_exp // 2))
            else:
                factors.append("s" + _exp_str(s_exp))
        for name, e in zip(self.registry.names, monom[1:]):
            if e:
                factors.append(name + _exp_str(e))
        c = Fraction(coeff.numerator, coeff.denominator)
        if not factors:
            return str(c)
        body = "*".join(factors)
        if c == 1:
            return body
        if c == -1:
            return "-" + body
        return str(c) + "*" + body

    def parse(self, text):
        return _ScalarParser(self, text).parse()


def map_scalar(x, src, dst, assignments=None):
    """Field map src -> dst sending generators to monomials.

    Generators map by name; `assignments` may send a generator name to a
    (sign, e2, pexp-over-dst) triple instead (a monomial image).  Exact on
    the fraction representation.
    """
    assignments = assignments or {}

    def term_image(monom):
        sign = 1
        s_exp = 0  # in s-units (halves of q-exponents)
        pexp = [0] * len(dst.registry.names)
        for name, e in zip(("s",) + src.registry.names, monom):
            if not e:
                continue
            if name in assignments:
                sg, e2, pv = assignments[name]
                if sg == -1 and e % 2:
                    sign = -sign
                s_exp += e2 * e
                for k, a in enumerate(pv):
                    pexp[k] += a * e
            elif name == "s":
                s_exp += e
            else:
                pexp[dst.registry.index(name)] += e
        return dst.monomial(sign, Fraction(s_exp, 2),
                            tuple(zip(dst.registry.names, pexp)))

    def map_side(p):
        total = dst.zero
        for monom, coeff in p.terms():
            c = Fraction(coeff.numerator, coeff.denominator)
            total = total + term_image(monom) * dst.rational(c.numerator,
                                                             c.denominator)
        return total

    den = map_side(x.denom)
    if not den:
        raise ZeroDivisionError("substitution sent the denominator to zero")
    return map_side(x.numer) / den


def _exp_str(e):
    return "" if e == 1 else "^" + str(e)


def _scale(length):
    if length in ("short", 1):
        return 1
    if length in ("long", 2):
        return 2
    raise ValueError("root length must be 'short' or 'long'")


def _as_half_integer_twice(e):
    """2*e as an int, for e an int, Fraction with denominator 1 or 2."""
    f = Fraction(e)
    if f.denominator not in (1, 2):
        raise ValueError("exponent %s is not a half-integer" % (e,))
    return int(2 * f)


class _ScalarParser:
    """Recursive-descent parser for the canonical scalar grammar.

    expr := term (('+'|'-') term)* ; term := atom (('*'|'/') atom)* ;
    atom := '-' atom | base ('^' signed-int)? ; base := int | name | '(' expr ')'.
    'q' and 's' denote the quantum parameter and its square root; 'q^1/2' is
    accepted as a synonym for s.
    """

    def __init__(self, fld, text):
        self.fld = fld
        self.toks = _tokenize(text)
        self.pos = 0

    def parse(self):
        val = self._expr()
        if self.pos != len(self.toks):
            raise ValueError("trailing input at token %r" % (self.toks[self.pos],))
        return val

    def _peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise ValueError("unexpected end of input")
        self.pos += 1
        return tok

    def _expr(self):
        val = self._term()
        while self._peek() in ("+", "-"):
            op = self._next()
            rhs = self._term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _term(self):
        val = self._atom()
        while self._peek() in ("*", "/"):
            op = self._next()
            rhs = self._atom()
            if op == "*":
                val = val * rhs
            else:
                if not rhs:
                    raise ZeroDivisionError("division by zero in scalar literal")
                val = val / rhs
        return val

    def _atom(self):
        if self._peek() == "-":
            self._next()
            return -self._atom()
        base_tok = self._next()
        if base_tok == "(":
            val = self._expr()
            if self._next() != ")":
                raise ValueError("expected ')'")
            is_var = False
        elif isinstance(base_tok, int):
            val = self.fld.rational(base_tok)
            is_var = False
        else:
            is_var = True
        if self._peek() == "^":
            self._next()
            e = self._exponent()
            if is_var:
                return self._power_of(base_tok, e)
            f = Fraction(e)
            if f.denominator != 1:
                raise ValueError("fractional exponent only allowed on q")
            return val**f.numerator if f >= 0 else self.fld.one / val**(-f.numerator)
        if is_var:
            return self._power_of(base_tok, 1)
        return val

    def _exponent(self):
        sign = 1
        if self._peek() == "-":
            self._next()
            sign = -1
        num = self._next()
        if not isinstance(num, int):
            raise ValueError("expected integer exponent, got %r" % (num,))
        if self._peek() == "/":
            save = self.pos
            self._next()
            den = self._peek()
            if den == 2:
                self._next()
                return Fraction(sign * num, 2)
            self.pos = save
        return sign * num

    def _power_of(self, name, e):
        if name == "q":
            return self.fld.q_power(e)
        f = Fraction(e)
        if f.denominator != 1:
            raise ValueError("fractional exponent only allowed on q")
        e = f.numerator
        if name == "s":
            return self.fld.q_power(Fraction(e, 2))
        p = self.fld.param(name)
        return p**e if e >= 0 else self.fld.one / p**(-e)


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "+-*/^()":
            toks.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(int(text[i:j]))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(text[i:j])
            i = j
        else:
            raise ValueError("bad character %r in scalar literal" % (c,))
    return toks

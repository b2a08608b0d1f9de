"""End-to-end torsion-freeness decision procedures with empirical checks.

The criteria are membership conditions on the twist vector b: in type A the
twisted localized simple module is simple and torsion free iff every b_i
avoids +-q^Z and so does lambda(K_{alpha_1})^{-1} b_1...b_n; in type C the
conditions are b_i outside +-q^Z for i >= 2 together with the square-product
b_1^2 b_2...b_n outside +-q^Z.  The empirical window scan is a
necessary-condition test only and the report says "consistent with", never
"proves".
"""

from .weights import (member, pm_qZ, admissible_hw, UndecidableMembership,
                      ExponentChar)
from . import rootdata
from .scalars import ScalarField, ParameterRegistry, map_scalar, GENERIC
from .localization import OreSet, LocalizedElement, phi_compose
from .repmodels import LatticeModel, WindowError, parabolic_quotient
from .uqcore import UqAlgebra, UqElement


class ClassificationReport:
    def __init__(self, kind, rank, lam, bvec):
        self.kind = kind
        self.rank = rank
        self.lam = lam
        self.bvec = bvec
        self.admissible = None
        self.admissible_rule = ""
        self.criterion = None
        self.failed_condition = ""
        self.empirical = None
        self.vanishing = []

    @property
    def agreement(self):
        if self.empirical in (None, "undetermined"):
            return True
        return (self.criterion == "torsion-free") == \
            (self.empirical == "all-injective")

    def lines(self, registry=None):
        out = []
        out.append("type\t%s%d" % (self.kind, self.rank))
        out.append("lambda\t%s" % self.lam.render(registry))
        out.append("b\t[%s]" % ", ".join(b.render(registry) for b in self.bvec))
        out.append("admissible\t%s\t%s" % (self.admissible, self.admissible_rule))
        out.append("criterion\t%s\t%s" % (self.criterion, self.failed_condition))
        out.append("empirical\t%s" % (self.empirical,))
        if self.vanishing:
            out.append("vanishing\t" + "; ".join(
                "%s%s at %s" % (k, i + 1, list(a)) for k, i, a in self.vanishing))
        out.append("agreement\t%s" % ("consistent" if self.agreement
                                      else "DISAGREE"))
        return out

    def text(self, registry=None):
        return "\n".join(self.lines(registry)) + "\n"

    def tsv_row(self, registry=None):
        return "\t".join([
            "%s%d" % (self.kind, self.rank),
            self.lam.render(registry),
            "[%s]" % ",".join(b.render(registry) for b in self.bvec),
            str(self.admissible),
            str(self.criterion),
            str(self.empirical),
            "consistent" if self.agreement else "DISAGREE",
        ])


def torsion_free_A(datum, lam, bvec, registry=None):
    """The type-A criterion: each b_i and the lambda-weighted product
    avoid +-q^Z.  Returns ('torsion-free'|'not-torsion-free', reason)."""
    assert datum.kind == "A"
    for i, b in enumerate(bvec):
        v = member(b, pm_qZ(), registry)
        if v == "unknown":
            raise UndecidableMembership("b_%d membership undecidable" % (i + 1))
        if v == "yes":
            return "not-torsion-free", "b_%d in +-q^Z" % (i + 1)
    prod = lam.values[0].inv()
    for b in bvec:
        prod = prod * b
    v = member(prod, pm_qZ(), registry)
    if v == "unknown":
        raise UndecidableMembership("product membership undecidable")
    if v == "yes":
        return "not-torsion-free", "lambda(K_a1)^-1 b_1...b_n in +-q^Z"
    return "torsion-free", ""


def torsion_free_C(datum, lam, bvec, registry=None):
    """The type-C criterion: b_i (i >= 2) and b_1^2 b_2...b_n avoid +-q^Z."""
    assert datum.kind == "C"
    for i in range(1, len(bvec)):
        v = member(bvec[i], pm_qZ(), registry)
        if v == "unknown":
            raise UndecidableMembership("b_%d membership undecidable" % (i + 1))
        if v == "yes":
            return "not-torsion-free", "b_%d in +-q^Z" % (i + 1)
    prod = bvec[0] * bvec[0]
    for b in bvec[1:]:
        prod = prod * b
    v = member(prod, pm_qZ(), registry)
    if v == "unknown":
        raise UndecidableMembership("square-product membership undecidable")
    if v == "yes":
        return "not-torsion-free", "b_1^2 b_2...b_n in +-q^Z"
    return "torsion-free", ""


def default_window(rank):
    if rank == 2:
        return [(i, j) for i in range(-2, 3) for j in range(-2, 3)]
    return [a for a in _box(rank, -1, 1)]


def _box(rank, lo, hi):
    out = [()]
    for _ in range(rank):
        out = [a + (k,) for a in out for k in range(lo, hi + 1)]
    return out


def classify(alg, lam, bvec, registry=None, window=None, margin=2,
             build_model=True):
    """Run the full pipeline: admissibility, criterion, empirical window scan.

    Rejects Cartan types other than A and C: by the classification, no other
    simple type admits infinite dimensional admissible (hence torsion free)
    modules.
    """
    datum = alg.datum
    if datum.kind not in ("A", "C"):
        raise ValueError(
            "type %s admits no simple torsion free modules; only types A and"
            " C do" % datum.kind)
    report = ClassificationReport(datum.kind, datum.rank, lam, bvec)
    verdict = admissible_hw(datum, lam, registry)
    report.admissible = verdict.answer
    report.admissible_rule = verdict.rule
    if verdict.answer != "yes":
        return report
    crit = torsion_free_A(datum, lam, bvec, registry) if datum.kind == "A" \
        else torsion_free_C(datum, lam, bvec, registry)
    report.criterion, report.failed_condition = crit
    if not build_model:
        return report
    sigma, word = rootdata.commuting_set(datum, J={0})
    ore = OreSet(alg, sigma, word)
    window = window if window is not None else default_window(datum.rank)
    lo = [min(a[k] for a in window) for k in range(datum.rank)]
    anchor = [max(0, -l) + margin for l in lo]
    scan_b = _shift_twist(datum, lam, bvec, anchor)
    report.scanned_b = scan_b
    try:
        lat = LatticeModel(alg, ore, lam, scan_b, window, margin=margin)
    except WindowError as exc:
        report.empirical = "undetermined (%s)" % exc
        return report
    report.vanishing = [v for v in lat.vanishing if v[0] in ("E", "F")]
    report.empirical = "all-injective" if not report.vanishing \
        else "vanishing-found"
    return report


class Classifier:
    """Grid-friendly pipeline sharing quotients and symbolic twist images.

    The twist images phi_{F_Sigma,b}(generator) are computed once with the
    b-coordinates as fresh formal parameters in a side field, then
    substituted per configuration; quotient models are cached per highest
    weight.  Verdicts are identical to classify(), only faster in bulk.
    """

    def __init__(self, alg, registry, window=None, margin=2):
        datum = alg.datum
        if datum.kind not in ("A", "C"):
            raise ValueError(
                "type %s admits no simple torsion free modules; only types A"
                " and C do" % datum.kind)
        self.alg = alg
        self.registry = registry
        self.datum = datum
        self.margin = margin
        self.window = window if window is not None \
            else default_window(datum.rank)
        sigma, word = rootdata.commuting_set(datum, J={0})
        self.ore = OreSet(alg, sigma, word)
        lo = [min(a[k] for a in self.window) for k in range(datum.rank)]
        self.anchor = [max(0, -l) + margin for l in lo]
        self._quotients = {}
        self._sym_names = tuple("bsym%d" % (k + 1) for k in range(datum.rank))
        self._sym_field = ScalarField(ParameterRegistry(
            [(nm, GENERIC) for nm in registry.names]
            + [(nm, GENERIC) for nm in self._sym_names]))
        self._sym_alg = UqAlgebra(datum, self._sym_field)
        self._sym_ore = OreSet(self._sym_alg, sigma, word)
        self._sym_images = None

    def _symbolic_images(self):
        if self._sym_images is not None:
            return self._sym_images
        bs = tuple(ExponentChar.parameter(self._sym_field.registry, nm)
                   for nm in self._sym_names)
        imgs = {}
        gens = [("E", i) for i in range(self.datum.rank)] \
            + [("F", i) for i in range(self.datum.rank)] \
            + [("Fb", k) for k in range(len(self.ore.sigma))]
        for kind, i in gens:
            if kind == "Fb":
                g = self._sym_alg.root_vector("F", self._sym_ore.positions[i])
            else:
                g = self._sym_alg.E(i) if kind == "E" else self._sym_alg.F(i)
            imgs[(kind, i)] = phi_compose(self._sym_ore, bs, g)
        self._sym_images = imgs
        return imgs

    def _substituted_images(self, bvec):
        assigns = {nm: (b.sign, b.e2, b.pexp)
                   for nm, b in zip(self._sym_names, bvec)}
        out = {}
        for key, loc in self._symbolic_images().items():
            terms = {}
            for tkey, c in loc.numer.terms.items():
                terms[tkey] = map_scalar(c, self._sym_field, self.alg.field,
                                         assigns)
            out[key] = LocalizedElement(
                self.ore, loc.denom, UqElement(self.alg, {
                    k: v for k, v in terms.items() if v}))
        return out

    def _quotient(self, lam):
        if lam not in self._quotients:
            self._quotients[lam] = parabolic_quotient(self.alg, lam)
        return self._quotients[lam]

    def run(self, lam, bvec, build_model=True):
        report = ClassificationReport(self.datum.kind, self.datum.rank,
                                      lam, bvec)
        verdict = admissible_hw(self.datum, lam, self.registry)
        report.admissible = verdict.answer
        report.admissible_rule = verdict.rule
        if verdict.answer != "yes":
            return report
        crit = torsion_free_A(self.datum, lam, bvec, self.registry) \
            if self.datum.kind == "A" \
            else torsion_free_C(self.datum, lam, bvec, self.registry)
        report.criterion, report.failed_condition = crit
        if not build_model:
            return report
        scan_b = _shift_twist(self.datum, lam, bvec, self.anchor)
        report.scanned_b = scan_b
        try:
            lat = LatticeModel(self.alg, self.ore, lam, scan_b, self.window,
                               margin=self.margin, quotient=self._quotient(lam),
                               phi_images=self._substituted_images(scan_b))
        except WindowError as exc:
            report.empirical = "undetermined (%s)" % exc
            return report
        report.vanishing = [v for v in lat.vanishing if v[0] in ("E", "F")]
        report.empirical = "all-injective" if not report.vanishing \
            else "vanishing-found"
        return report


def _shift_twist(datum, lam, bvec, anchor):
    """Replace b by a q^Z-shifted twist vector with zeros inside the window.

    Twisting by q^i b gives a module isomorphic to the b-twist, and every
    membership condition of the criteria is invariant under the shift; the
    shift places the critical exponents of integral-power coordinates (and
    of an integral-power product condition) near the window anchor, where
    the basis is representable.
    """
    shifted = list(bvec)
    for k, b in enumerate(shifted):
        if b.is_parameter_free():
            shifted[k] = ExponentChar.q_power(-anchor[k], len(b.pexp)) \
                * ExponentChar(b.sign, 0, (0,) * len(b.pexp))
    if datum.kind == "A":
        prod = lam.values[0].inv()
        for b in shifted:
            prod = prod * b
    else:
        prod = shifted[0] * shifted[0]
        for b in shifted[1:]:
            prod = prod * b
    if prod.is_parameter_free() and prod.q_exp.denominator == 1:
        target = -sum(anchor)
        delta = target - int(prod.q_exp)
        k = len(shifted) - 1
        shifted[k] = ExponentChar.q_power(delta, len(shifted[k].pexp)) \
            * shifted[k]
    return tuple(shifted)

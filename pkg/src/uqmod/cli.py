"""Command-line front end.

Commands: verify-identities, verma-dims, simple-dims, admissible, classify,
shale-weil, twist-act, sl2, sl3.  Configuration comes from a flat key=value
file (lists in the literal syntax shown in --help), with flags overriding
file values.  Exit codes: 0 pass, 1 verification failure, 2 input error.
Identical configurations produce byte-identical output.
"""

import argparse
import sys

from . import rootdata
from .scalars import ScalarField, ParameterRegistry, GENERIC, NOT_IN_PM_QZ, \
    NOT_IN_PM_QN
from .weights import WeightChar, parse_exponent_char, admissible_hw
from .uqcore import UqAlgebra, parse_element, render_element
from .localization import OreSet, phi_generator
from . import repmodels as rm
from . import classify as cls


class InputError(Exception):
    pass


_FLAG_ALIASES = {
    "generic": GENERIC,
    "not_in_pm_qZ": NOT_IN_PM_QZ,
    "not_in_pm_qN": NOT_IN_PM_QN,
}


def _read_config(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InputError("bad config line %r" % line)
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _parse_list(text):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise InputError("unterminated list literal %r" % text)
        text = text[1:-1]
    items = []
    for piece in text.split(","):
        piece = piece.strip().strip('"').strip("'")
        if piece:
            items.append(piece)
    return items


class Job:
    def __init__(self, args):
        cfg = {}
        if args.config:
            cfg = _read_config(args.config)
        def pick(name, flag_value, default=None):
            if flag_value is not None:
                return flag_value
            return cfg.get(name, default)
        self.kind = pick("type", args.type)
        rank = pick("rank", args.rank)
        self.rank = int(rank) if rank is not None else None
        self.lam_literal = pick("lambda", args.lam)
        self.b_literal = pick("b", args.b)
        params = list(args.param or [])
        if "params" in cfg and not params:
            params = _parse_list(cfg["params"])
        entries = []
        for p in params:
            name, _, flags = p.partition(":")
            flag = GENERIC
            for fl in filter(None, flags.split(",")):
                if fl not in _FLAG_ALIASES:
                    raise InputError("unknown assumption flag %r in --param"
                                     % fl)
                flag = _FLAG_ALIASES[fl]
            entries.append((name.strip(), flag))
        self.registry = ParameterRegistry(entries)
        self.field = ScalarField(self.registry)
        self.depth = int(pick("depth", args.depth, 6))
        self.window = int(pick("window", args.window, 2))
        self.margin = int(pick("margin", args.margin, 2))
        self.fmt = pick("format", args.format, "text")
        if self.fmt not in ("text", "tsv"):
            raise InputError("format must be 'text' or 'tsv'")

    def datum(self):
        if self.kind is None or self.rank is None:
            raise InputError("--type and --rank are required")
        try:
            return rootdata.build(self.kind, self.rank)
        except ValueError as exc:
            raise InputError(str(exc))

    def algebra(self):
        return UqAlgebra(self.datum(), self.field)

    def weight(self):
        if not self.lam_literal:
            raise InputError("--lambda is required for this command")
        try:
            return WeightChar.parse(_parse_list(self.lam_literal),
                                    self.registry)
        except (ValueError, KeyError) as exc:
            raise InputError("bad lambda literal: %s" % exc)

    def bvector(self):
        if not self.b_literal:
            raise InputError("--b is required for this command")
        try:
            return tuple(parse_exponent_char(t, self.registry)
                         for t in _parse_list(self.b_literal))
        except (ValueError, KeyError) as exc:
            raise InputError("bad b literal: %s" % exc)


def cmd_verify_identities(job, out):
    alg = job.algebra()
    results = alg.verify_identity_suite()
    sigma, word = rootdata.commuting_set(alg.datum, J={0})
    ore = OreSet(alg, sigma, word)
    from .localization import verify_phi_laws
    results += verify_phi_laws(ore, bnames=job.registry.names[:2])
    bad = 0
    for name, ok in results:
        if job.fmt == "tsv":
            out.write("%s\t%s\n" % (name, "pass" if ok else "FAIL"))
        else:
            out.write("%-40s %s\n" % (name, "pass" if ok else "FAIL"))
        bad += 0 if ok else 1
    out.write("total\t%d\tfailed\t%d\n" % (len(results), bad))
    return 1 if bad else 0


def _dims_table(job, model, out):
    rows = []
    for w, labels in model.basis.items():
        nu = model.nu_of[w]
        rows.append((sum(nu), nu, len(labels)))
    rows.sort()
    if job.fmt == "tsv":
        for _, nu, dim in rows:
            out.write("%s\t%d\n" % (",".join(str(c) for c in nu), dim))
    else:
        for _, nu, dim in rows:
            out.write("nu=%s dim=%d\n" % (list(nu), dim))
    return 0


def cmd_verma_dims(job, out):
    alg = job.algebra()
    model = rm.verma_truncation(alg, job.weight(), job.depth)
    return _dims_table(job, model, out)


def cmd_simple_dims(job, out):
    alg = job.algebra()
    model = rm.simple_quotient(alg, job.weight(), job.depth)
    return _dims_table(job, model, out)


def cmd_admissible(job, out):
    datum = job.datum()
    verdict = admissible_hw(datum, job.weight(), job.registry)
    out.write("admissible\t%s\n" % verdict.answer)
    out.write("rule\t%s\n" % verdict.rule)
    if verdict.details:
        out.write("details\t%s\n" % verdict.details)
    return 0


def cmd_classify(job, out):
    alg = job.algebra()
    w = job.window
    window = [a for a in _box(alg.datum.rank, -w, w)] if alg.datum.rank == 2 \
        else [a for a in _box(alg.datum.rank, -1, 1)]
    report = cls.classify(alg, job.weight(), job.bvector(), job.registry,
                          window=window, margin=job.margin)
    if job.fmt == "tsv":
        out.write(report.tsv_row(job.registry) + "\n")
    else:
        out.write(report.text(job.registry))
        out.write("torsion-free: %s\n"
                  % ("yes" if report.criterion == "torsion-free" else "no"))
    return 0 if report.agreement else 1


def _box(rank, lo, hi):
    out = [()]
    for _ in range(rank):
        out = [a + (k,) for a in out for k in range(lo, hi + 1)]
    return out


def cmd_shale_weil(job, out):
    datum = job.datum()
    if datum.kind != "C":
        raise InputError("shale-weil requires type C")
    model = rm.shale_weil(job.field, datum, 2 * job.depth)
    fails = rm.check_relations(model)
    hws = rm.highest_weight_vectors(model)
    for w, label in sorted(hws, key=lambda t: sum(t[1])):
        out.write("hw\tX^%s\t%s\n" % (list(label), w.render(job.registry)))
    out.write("relations\t%s\n" % ("pass" if not fails else "FAIL"))
    return 1 if fails else 0


def cmd_twist_act(job, out):
    alg = job.algebra()
    sigma, word = rootdata.commuting_set(alg.datum, J={0})
    ore = OreSet(alg, sigma, word)
    bvec = job.bvector()
    if len(bvec) != 1:
        raise InputError("twist-act prints phi_{F_beta,b}; pass one b value")
    b = bvec[0]
    for beta in sigma:
        for gname, g in [("E%d" % (i + 1), alg.E(i)) for i in range(alg.n)] \
                + [("F%d" % (i + 1), alg.F(i)) for i in range(alg.n)] \
                + [("K%s" % list(alg.datum.simple_root(0)),
                    alg.K(alg.datum.simple_root(0)))]:
            img = phi_generator(ore, beta, b, g)
            out.write("phi[F%s,%s](%s) = %r\n"
                      % (list(beta), b.render(job.registry), gname, img))
    return 0


def cmd_sl2(job, out):
    datum = rootdata.build("A", 1)
    lam = job.weight().values[0]
    b = job.bvector()[0]
    window = range(-job.window, job.window + 1)
    model = rm.sl2_family(job.field, datum, lam, b, window)
    verdict = rm.sl2_torsion_free_verdict(job.registry, lam, b)
    for i in window:
        w = model.index_weights[i]
        entry = model.actions[("E", 0)].get((w, i))
        if entry is None:
            continue
        coeff = entry[0][2] if entry else job.field.zero
        out.write("E v_%d = (%s) v_%d\n"
                  % (i, job.field.render(coeff), i - 1))
    out.write("verdict\t%s\n" % verdict)
    return 0


def cmd_sl3(job, out):
    datum = rootdata.build("A", 2)
    bvec = job.bvector()
    if len(bvec) != 2:
        raise InputError("sl3 needs b = [c1, c2]")
    w = job.window
    window = [(i, j) for i in range(-w, w + 1) for j in range(-w, w + 1)]
    model = rm.sl3_example(job.field, datum, bvec[0], bvec[1], window)
    for (i, j) in window:
        lab = model.labels[(i, j)]
        for key, name in [(("E", 0), "E1"), (("E", 1), "E2"),
                          (("Fb", 0), "Fb1"), (("Fb", 1), "Fb2")]:
            entry = model.actions[key].get((lab, (i, j)))
            if entry is None:
                continue
            coeff = entry[0][2] if entry else job.field.zero
            out.write("%s w[%d,%d] -> (%s)\n"
                      % (name, i, j, job.field.render(coeff)))
    zeros = model.zero_locus()
    out.write("zeros\t%s\n" % ("; ".join("%s at (%d,%d)" % z for z in zeros)
                               if zeros else "none"))
    return 0


_COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "verma-dims": cmd_verma_dims,
    "simple-dims": cmd_simple_dims,
    "admissible": cmd_admissible,
    "classify": cmd_classify,
    "shale-weil": cmd_shale_weil,
    "twist-act": cmd_twist_act,
    "sl2": cmd_sl2,
    "sl3": cmd_sl3,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="uqmod",
        description="Exact workbench for quantized enveloping algebras: "
                    "identity verification, weight-module models and "
                    "torsion-free classification.")
    ap.add_argument("command", choices=sorted(_COMMANDS))
    ap.add_argument("--config", help="flat key=value configuration file")
    ap.add_argument("--type", dest="type", help="Cartan type A, B, C or D")
    ap.add_argument("--rank", type=int)
    ap.add_argument("--lambda", dest="lam",
                    help='weight literal, e.g. "+q^-1,+q^0" or \'["p1","+q^0"]\'')
    ap.add_argument("--b", help='twist vector literal, e.g. "c,c" or "+q^1/2"')
    ap.add_argument("--param", action="append",
                    help="declare a formal parameter NAME[:FLAGS]; flags from "
                         "generic, not_in_pm_qZ, not_in_pm_qN")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--window", type=int)
    ap.add_argument("--margin", type=int)
    ap.add_argument("--format", choices=("text", "tsv"))
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        job = Job(args)
        code = _COMMANDS[args.command](job, sys.stdout)
    except InputError as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return 2
    except (ValueError, KeyError) as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())

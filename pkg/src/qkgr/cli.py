"""Command-line front end: products, operator actions, Bethe roots,
pairings, restrictions, the verification harness, and cache management.

Exit codes: 0 success, 2 usage problem, 3 a verification or internal
consistency failure (the output carries a witness).
"""

import argparse
import json
import os
import shutil
import sys

from . import bethe, products
from .bethe import DegeneracyError
from .localization import opposite_class, qk_pairing, restriction_vector
from .products import ConsistencyError
from .scalars import CoeffRing, LaurentScalar, QKValue, QSeries, RatScalar
from .shapes import BoxPartition, all_partitions
from .vertex import (
    ModuleElement, apply_generator, dual_generator, dual_transfer, transfer,
)
from .weyl import (
    apply_demazure, apply_rho, apply_rho_inverse, apply_s0, apply_simple,
    apply_translation, apply_translation_inverse, apply_w0,
)

DEFAULTS = {"n_max": 3, "q_order": 2, "cache_dir": None}


class UsageError(ValueError):
    pass


# -- input parsing -------------------------------------------------------------

def parse_parts(text):
    text = (text or "").strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.replace(" ", ",").split(",") if p)
    except ValueError:
        raise UsageError("cannot read %r as a partition" % text)


def _shape(args, attr="lam"):
    try:
        return BoxPartition(args.k, args.n, parse_parts(getattr(args, attr)))
    except ValueError as e:
        raise UsageError(str(e))


def _check_ranks(n, k):
    if not (isinstance(n, int) and isinstance(k, int) and 0 < k < n):
        raise UsageError("need integer ranks with 0 < k < n")


# -- configuration -------------------------------------------------------------

def load_config(path=None, env=None):
    """Defaults, overlaid by the config file, overlaid by environment."""
    env = os.environ if env is None else env
    cfg = dict(DEFAULTS)
    path = path or env.get("QKGR_CONFIG")
    if path:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as e:
            raise UsageError("cannot read config: %s" % e)
        except json.JSONDecodeError as e:
            raise UsageError("config is not valid JSON: %s" % e)
        for key in DEFAULTS:
            if key in doc:
                cfg[key] = doc[key]
    if env.get("QKGR_CACHE_DIR"):
        cfg["cache_dir"] = env["QKGR_CACHE_DIR"]
    return cfg


# -- LaTeX rendering -----------------------------------------------------------

def _latex_names(n):
    return ["q", "y"] + ["\\varepsilon_{%d}" % (i + 1) for i in range(n)]


def _latex_laurent(c, names):
    if c.is_zero():
        return "0"
    parts = []
    for exp, coef in c.sorted_terms():
        factors = []
        for name, e in zip(names, exp):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append("%s^{%d}" % (name, e))
        body = " ".join(factors)
        if not body:
            parts.append("%+d" % coef)
        elif coef == 1:
            parts.append("+%s" % body)
        elif coef == -1:
            parts.append("-%s" % body)
        else:
            parts.append("%+d %s" % (coef, body))
    s = " ".join(parts)
    return s[1:] if s.startswith("+") else s


def _latex_scalar(c, names):
    if isinstance(c, LaurentScalar):
        return _latex_laurent(c, names)
    if isinstance(c, RatScalar):
        if c.den.is_one():
            return _latex_laurent(c.num, names)
        return "\\frac{%s}{%s}" % (_latex_laurent(c.num, names),
                                   _latex_laurent(c.den, names))
    if isinstance(c, QSeries):
        parts = []
        for d in sorted(c.coeffs):
            body = _latex_scalar(c.coeffs[d], names)
            parts.append(body if d == 0 else
                         "\\left(%s\\right) q^{%d}" % (body, d))
        parts.append("O\\!\\left(q^{%d}\\right)" % (c.order + 1))
        return " + ".join(parts)
    if isinstance(c, QKValue):
        num = " + ".join(
            "\\left(%s\\right) q^{%d}" % (_latex_scalar(v, names), d)
            if d else _latex_scalar(v, names)
            for d, v in sorted(c.num_coeffs.items())) or "0"
        if c.den_pow == 0:
            return num
        return "\\frac{%s}{1-q}" % num
    raise TypeError("no LaTeX form for %r" % type(c))


def _latex_label(parts):
    if not parts:
        return "\\mathcal{O}_{\\varnothing}"
    return "\\mathcal{O}_{(%s)}" % ",".join(str(p) for p in parts)


# -- result payloads -----------------------------------------------------------

def _normalize(v):
    """One coefficient type per element, so serialization round-trips."""
    kinds = {type(c) for c in v.coeffs.values()}
    if len(kinds) <= 1:
        return v
    if QSeries in kinds:
        raise ConsistencyError("mixed series and exact coefficients")
    return v.map_coefficients(
        lambda c: c if isinstance(c, RatScalar) else RatScalar.from_laurent(c))


def _element_payload(v):
    return {"kind": "element", "element": _normalize(v)}


def _render_element(v, fmt):
    names = CoeffRing(v.n).var_names()
    if fmt == "json":
        return json.dumps(v.to_json(), indent=2, sort_keys=True)
    lines = []
    if fmt == "latex":
        for lam in v.support():
            lines.append("%s\\colon %s" % (
                _latex_label(lam.parts),
                _latex_scalar(v.coeffs[lam], _latex_names(v.n))))
        return "\\\\\n".join(lines) if lines else "0"
    for lam in v.support():
        c = v.coeffs[lam]
        lines.append("O_(%s) : %s" % (
            ",".join(str(p) for p in lam.parts), c.render(names)))
    return "\n".join(lines) if lines else "0"


def _render_payload(payload, fmt):
    kind = payload["kind"]
    if kind == "element":
        return _render_element(payload["element"], fmt)
    if kind == "value":
        val, n = payload["value"], payload["n"]
        names = CoeffRing(n).var_names()
        if fmt == "json":
            return json.dumps(val.to_json(), indent=2, sort_keys=True)
        if fmt == "latex":
            return _latex_scalar(val, _latex_names(n))
        return val.render()
    if kind == "root":
        doc = payload["doc"]
        if fmt == "json":
            return json.dumps(doc, indent=2, sort_keys=True)
        names = CoeffRing(payload["n"]).var_names()
        roots = payload["root"].roots
        if fmt == "latex":
            return "\\\\\n".join("x_{%d} = %s" % (
                i + 1, _latex_scalar(s, _latex_names(payload["n"])))
                for i, s in enumerate(roots))
        return "\n".join("x%d = %s" % (i + 1, s.render(names))
                         for i, s in enumerate(roots))
    if kind == "restrictions":
        if fmt == "json":
            return json.dumps(payload["doc"], indent=2, sort_keys=True)
        names = CoeffRing(payload["n"]).var_names()
        rows = payload["rows"]
        if fmt == "latex":
            return "\\\\\n".join("%s \\mapsto %s" % (
                _latex_label(mu), _latex_scalar(c, _latex_names(payload["n"])))
                for mu, c in rows)
        return "\n".join("at (%s): %s" % (
            ",".join(str(p) for p in mu), c.render(names))
            for mu, c in rows)
    if kind == "report":
        doc = payload["doc"]
        if fmt == "json":
            return json.dumps(doc, indent=2, sort_keys=True)
        lines = []
        for chk in doc["checks"]:
            mark = "ok  " if chk["ok"] else "FAIL"
            extra = ""
            if not chk["ok"] and chk.get("witness") is not None:
                extra = "  witness=%s" % (chk["witness"],)
            lines.append("%s %-28s %s%s" % (mark, chk["name"], chk["case"],
                                            extra))
        lines.append("%d checks, %d failures" % (len(doc["checks"]),
                                                 doc["failures"]))
        if fmt == "latex":
            return "\n".join("%% %s" % ln for ln in lines)
        return "\n".join(lines)
    if kind == "plain":
        if fmt == "json":
            return json.dumps(payload["doc"], indent=2, sort_keys=True)
        return "\n".join("%s: %s" % (k, v)
                         for k, v in sorted(payload["doc"].items()))
    raise TypeError("unknown payload kind %r" % kind)


# -- verbs ---------------------------------------------------------------------

def _cmd_product(args, cfg):
    _check_ranks(args.n, args.k)
    a = ModuleElement.basis(args.k, args.n, _shape(args, "a"))
    b = ModuleElement.basis(args.k, args.n, _shape(args, "b"))
    return 0, _element_payload(products.qk_product(a, b))


def _cmd_transfer(args, cfg):
    _check_ranks(args.n, args.k)
    ring = CoeffRing(args.n)
    v = ModuleElement.basis(args.k, args.n, _shape(args))
    entry = args.entry
    if entry == "t":
        out = transfer(ring.y(), v)
    elif entry == "dual":
        out = dual_transfer(ring.y(), v)
    elif entry.startswith("dual"):
        i, j = int(entry[4]), int(entry[5])
        out = dual_generator(i, j, ring.y(), v)
    else:
        i, j = int(entry[0]), int(entry[1])
        out = apply_generator(i, j, ring.y(), v)
    return 0, _element_payload(out)


_WORD_OPS = {
    "rho": apply_rho,
    "rho-": apply_rho_inverse,
    "s0": apply_s0,
    "w0": apply_w0,
}


def _apply_token(tok, v):
    if tok in _WORD_OPS:
        return _WORD_OPS[tok](v)
    kind, body = tok[0], tok[1:]
    inverse = body.endswith("-")
    if inverse:
        body = body[:-1]
    if not body.isdigit():
        raise UsageError("cannot read generator %r" % tok)
    i = int(body)
    if kind == "s" and not inverse:
        return apply_simple(i, v)
    if kind == "d" and not inverse:
        return apply_demazure(i, v)
    if kind == "t":
        return apply_translation_inverse(i, v) if inverse \
            else apply_translation(i, v)
    raise UsageError("cannot read generator %r" % tok)


def _cmd_act(args, cfg):
    _check_ranks(args.n, args.k)
    v = ModuleElement.basis(args.k, args.n, _shape(args))
    tokens = args.word.split()
    if not tokens:
        raise UsageError("empty generator word")
    for tok in reversed(tokens):
        v = _apply_token(tok, v)
    return 0, _element_payload(v)


def _cmd_bethe(args, cfg):
    _check_ranks(args.n, args.k)
    lam = _shape(args)
    order = args.order if args.order is not None else cfg["q_order"]
    cache_dir = args.cache_dir or cfg["cache_dir"]
    have_file = False
    if cache_dir:
        path = bethe.cache_path(cache_dir, args.k, args.n, order)
        have_file = os.path.exists(path)
        if have_file:
            bethe.load_roots(cache_dir, args.k, args.n, order)
    root = bethe.solve_bae(lam, order)
    if cache_dir and not have_file:
        bethe.save_roots(cache_dir, args.k, args.n, order)
    doc = {"k": args.k, "n": args.n}
    doc.update(root.to_json())
    return 0, {"kind": "root", "root": root, "doc": doc, "n": args.n}


def _cmd_pair(args, cfg):
    _check_ranks(args.n, args.k)
    a = _shape(args, "a")
    b = _shape(args, "b")
    va = opposite_class(a) if args.opposite_a \
        else ModuleElement.basis(args.k, args.n, a)
    vb = opposite_class(b) if args.opposite_b \
        else ModuleElement.basis(args.k, args.n, b)
    return 0, {"kind": "value", "value": qk_pairing(va, vb), "n": args.n}


def _cmd_localize(args, cfg):
    _check_ranks(args.n, args.k)
    lam = _shape(args)
    ring = CoeffRing(args.n)
    vec = restriction_vector(ModuleElement.basis(args.k, args.n, lam))
    names = ring.var_names()
    if args.at is not None:
        at = BoxPartition(args.k, args.n, parse_parts(args.at))
        rows = [(at.parts, vec.get(at, ring.zero()))]
    else:
        rows = [(mu.parts, vec.get(mu, ring.zero()))
                for mu in all_partitions(args.k, args.n)]
    doc = {"k": args.k, "n": args.n, "partition": list(lam.parts),
           "restrictions": [{"at": list(mu), "value": c.to_json(names)}
                            for mu, c in rows]}
    return 0, {"kind": "restrictions", "doc": doc, "rows": rows,
               "n": args.n}


# -- the verification harness ---------------------------------------------------

def _boxes(n_max):
    return [(k, n) for n in range(2, n_max + 1) for k in range(1, n)]


def _ring_checks(n_max, q_order):
    for k, n in _boxes(n_max):
        case = "Gr(%d,%d)" % (k, n)
        r = products.verify_functional_relation(k, n)
        yield ("rings/functional", case, r.ok,
               None if r.ok else list(r.witness.parts))
        r = products.verify_whitney(k, n)
        yield ("rings/whitney", case, r.ok,
               None if r.ok else list(r.witness.parts))
        r = products.verify_wedge_duality(k, n)
        yield ("rings/wedge-duality", case, r.ok,
               None if r.ok else r.witness)


def _weyl_checks(n_max, q_order):
    for k, n in _boxes(n_max):
        case = "Gr(%d,%d)" % (k, n)
        ring = CoeffRing(n)
        ok_inv = ok_dem = ok_braid = True
        wit_inv = wit_dem = wit_braid = None
        for lam in all_partitions(k, n):
            v = ModuleElement.basis(k, n, lam)
            for i in range(1, n):
                if ok_inv and not (
                        apply_simple(i, apply_simple(i, v)) - v).is_zero():
                    ok_inv, wit_inv = False, list(lam.parts)
                dv = apply_demazure(i, v)
                if ok_dem and not (apply_demazure(i, dv) - dv).is_zero():
                    ok_dem, wit_dem = False, list(lam.parts)
            for i in range(1, n - 1):
                aba = apply_simple(i, apply_simple(i + 1, apply_simple(i, v)))
                bab = apply_simple(i + 1, apply_simple(i, apply_simple(
                    i + 1, v)))
                if ok_braid and not (aba - bab).is_zero():
                    ok_braid, wit_braid = False, list(lam.parts)
        yield "weyl/involution", case, ok_inv, wit_inv
        yield "weyl/demazure-idempotent", case, ok_dem, wit_dem
        if n > 2:
            yield "weyl/braid", case, ok_braid, wit_braid
        ok_rho, wit_rho = True, None
        for lam in all_partitions(k, n):
            v = ModuleElement.basis(k, n, lam)
            out = v
            for _ in range(n):
                out = apply_rho(out, q_val=ring.q())
            if not (out - v.scale(ring.q(n - k))).is_zero():
                ok_rho, wit_rho = False, list(lam.parts)
                break
        yield "weyl/rho-power", case, ok_rho, wit_rho


def _bethe_checks(n_max, q_order):
    for k, n in _boxes(n_max):
        case = "Gr(%d,%d)" % (k, n)
        ok_res = ok_eig = ok_dual = True
        wit_res = wit_eig = wit_dual = None
        for lam in all_partitions(k, n):
            root = bethe.solve_bae(lam, q_order)
            res = bethe.bae_residuals(lam, root.roots)
            if ok_res and bethe.residual_valuation(res) is not None:
                ok_res, wit_res = False, list(lam.parts)
            if ok_eig and not bethe.eigenvalue_residual(
                    lam, q_order).is_zero():
                ok_eig, wit_eig = False, list(lam.parts)
            if ok_dual:
                mate = bethe.dual_on_shell(lam.transpose(), q_order)
                want = bethe.on_shell_vector(
                    lam.transpose().transpose(), q_order)
                if not (mate.element - want.element).is_zero():
                    ok_dual, wit_dual = False, list(lam.parts)
        yield "bethe/residuals", case, ok_res, wit_res
        yield "bethe/eigenvalue", case, ok_eig, wit_eig
        yield "bethe/dual-match", case, ok_dual, wit_dual


def _pairing_checks(n_max, q_order):
    for k, n in _boxes(n_max):
        case = "Gr(%d,%d)" % (k, n)
        ok, wit = True, None
        for lam in all_partitions(k, n):
            v = ModuleElement.basis(k, n, lam)
            for mu in all_partitions(k, n):
                val = qk_pairing(v, opposite_class(mu))
                if val.is_single_monomial_over_1mq() is None:
                    ok, wit = False, [list(lam.parts), list(mu.parts)]
                    break
            if not ok:
                break
        yield "pairings/monomial-shape", case, ok, wit


_SUITES = {
    "rings": [_ring_checks],
    "weyl": [_weyl_checks],
    "bethe": [_bethe_checks],
    "pairings": [_pairing_checks],
    "all": [_ring_checks, _weyl_checks, _bethe_checks, _pairing_checks],
}


def _cmd_verify(args, cfg):
    n_max = args.n_max if args.n_max is not None else cfg["n_max"]
    q_order = args.q_order if args.q_order is not None else cfg["q_order"]
    if n_max < 2:
        raise UsageError("need --n-max at least 2")
    checks = []
    for gen in _SUITES[args.suite]:
        for name, case, ok, witness in gen(n_max, q_order):
            item = {"name": name, "case": case, "ok": bool(ok)}
            if not ok:
                item["witness"] = witness
            checks.append(item)
    failures = sum(1 for c in checks if not c["ok"])
    doc = {"suite": args.suite, "n_max": n_max, "q_order": q_order,
           "checks": checks, "failures": failures}
    return (3 if failures else 0), {"kind": "report", "doc": doc}


# -- cache management ------------------------------------------------------------

def _cmd_cache(args, cfg):
    _check_ranks(args.n, args.k)
    cache_dir = args.dir or cfg["cache_dir"]
    if not cache_dir:
        raise UsageError("no cache directory (flag, config, or environment)")
    order = args.order if args.order is not None else cfg["q_order"]
    k, n = args.k, args.n
    if args.action == "write":
        bpath = bethe.save_roots(cache_dir, k, n, order)
        spath = products.save_structure(cache_dir, k, n)
        doc = {"action": "write", "bethe": bpath, "structure": spath}
        return 0, {"kind": "plain", "doc": doc}
    if args.action == "verify":
        fresh_ok = True
        path = bethe.cache_path(cache_dir, k, n, order)
        with open(path) as fh:
            doc = json.load(fh)
        if (doc["n"], doc["k"], doc["order"]) != (n, k, order):
            raise ValueError("cache document does not match its path")
        stored = {tuple(e["partition"]): bethe.BetheRoot.from_json(k, n, e)
                  for e in doc["roots"]}
        bethe.clear_caches()
        for lam in all_partitions(k, n):
            fresh = bethe.solve_bae(lam, order)
            got = stored.get(lam.parts)
            if got is None or got.roots != fresh.roots:
                fresh_ok = False
        table = products.load_structure(cache_dir, k, n)
        for lam in all_partitions(k, n):
            direct = products.class_operator(lam)
            mat = table.get(lam.parts, {})
            for mu, col in direct.items():
                if mat.get(mu.parts) != {nu.parts: e
                                         for nu, e in col.items()}:
                    fresh_ok = False
        doc = {"action": "verify", "identical": fresh_ok}
        return (0 if fresh_ok else 3), {"kind": "plain", "doc": doc}
    box_dir = os.path.dirname(bethe.cache_path(cache_dir, k, n, order))
    existed = os.path.isdir(box_dir)
    if existed:
        shutil.rmtree(box_dir)
    doc = {"action": "clear", "removed": existed}
    return 0, {"kind": "plain", "doc": doc}


# -- entry point ------------------------------------------------------------------

def _add_common(sp, ranks=True):
    if ranks:
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--format", choices=["json", "latex", "text"],
                    default="json")
    sp.add_argument("--config", default=None)


def build_parser():
    p = argparse.ArgumentParser(
        prog="qkgr",
        description="exact quantum K-theory of Grassmannians")
    sub = p.add_subparsers(dest="verb", required=True)

    sp = sub.add_parser("product", help="star product of two basis classes")
    _add_common(sp)
    sp.add_argument("--a", required=True, help="first partition, e.g. '2,1'")
    sp.add_argument("--b", required=True, help="second partition")
    sp.set_defaults(fn=_cmd_product)

    sp = sub.add_parser("transfer", help="transfer or monodromy entry")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--entry", default="t",
                    choices=["t", "dual", "00", "01", "10", "11",
                             "dual00", "dual01", "dual10", "dual11"])
    sp.set_defaults(fn=_cmd_transfer)

    sp = sub.add_parser("act", help="apply a generator word")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--word", required=True,
                    help="e.g. 's1 d2 rho t1 rho- t2-'; rightmost acts first")
    sp.set_defaults(fn=_cmd_act)

    sp = sub.add_parser("bethe", help="solve the Bethe equations")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--order", type=int, default=None)
    sp.add_argument("--cache-dir", default=None)
    sp.set_defaults(fn=_cmd_bethe)

    sp = sub.add_parser("pair", help="quantum pairing of two classes")
    _add_common(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--opposite-a", action="store_true",
                    help="replace the first class by its opposite")
    sp.add_argument("--opposite-b", action="store_true")
    sp.set_defaults(fn=_cmd_pair)

    sp = sub.add_parser("localize", help="fixed-point restrictions")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--at", default=None,
                    help="restrict at one fixed point only")
    sp.set_defaults(fn=_cmd_localize)

    sp = sub.add_parser("verify", help="run identity suites")
    _add_common(sp, ranks=False)
    sp.add_argument("--suite", default="all", choices=sorted(_SUITES))
    sp.add_argument("--n-max", type=int, default=None)
    sp.add_argument("--q-order", type=int, default=None)
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("cache", help="write, verify, or clear cache files")
    _add_common(sp)
    sp.add_argument("--dir", default=None)
    sp.add_argument("--action", default="write",
                    choices=["write", "verify", "clear"])
    sp.add_argument("--order", type=int, default=None)
    sp.set_defaults(fn=_cmd_cache)
    return p


def run(argv, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = load_config(args.config)
        code, payload = args.fn(args, cfg)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (ConsistencyError, DegeneracyError, ArithmeticError,
            AssertionError) as e:
        print("consistency failure: %s" % e, file=sys.stderr)
        return 3
    print(_render_payload(payload, args.format), file=out)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 1 failed check or comparison mismatch, 2 malformed
input or usage error, 3 resource guard refusal.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .errors import CheckFailure, ResourceGuard, SpecError
from .problem import Problem, load_problem

THREADS_ENV = "CROSSEDHC_THREADS"


class Abort(Exception):
    def __init__(self, code: int, payload: dict):
        self.code, self.payload = code, payload


# -- output ---------------------------------------------------------------------

def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=str) + "\n"


def _rows(obj, prefix=""):
    """Flatten nested dicts/lists into (key, value) rows for CSV."""
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _rows(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _rows(x, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj, sort_keys=True, ensure_ascii=False, default=str) if isinstance(obj, (list, dict)) else obj


def _csv(obj) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _rows(obj):
        w.writerow([k, v])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(obj, fmt: str, out: str | None, stem: str) -> None:
    text = _canonical(obj) if fmt == "json" else _csv(obj)
    if out:
        atomic_write(Path(out) / f"{stem}.{fmt}", text)
    else:
        click.echo(text, nl=False)


# -- error handling --------------------------------------------------------------

def _run(fn):
    """Run a command body, mapping library exceptions to JSON diagnostics and exit codes."""
    try:
        code = fn() or 0
    except Abort as a:
        click.echo(_canonical(a.payload), nl=False, err=True)
        code = a.code
    except SpecError as e:
        click.echo(_canonical(e.to_json()), nl=False, err=True)
        code = 2
    except ResourceGuard as e:
        click.echo(_canonical(e.to_json()), nl=False, err=True)
        code = 3
    except CheckFailure as e:
        click.echo(_canonical(e.to_json()), nl=False, err=True)
        code = 1
    sys.exit(code)


def _load(spec, truncation, weight, klass) -> Problem:
    return load_problem(spec, truncation, weight, klass)


def _map(fn, items):
    n = int(os.environ.get(THREADS_ENV, "1") or 1)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- computations ----------------------------------------------------------------

def _class_job(args):
    spec, N, w, phi, pipeline, compare, which = args
    P = load_problem(spec, N, None, None)
    return _class_report(P, phi, w, pipeline, compare)


def _class_report(P: Problem, phi: int, w, pipeline: str, compare: bool) -> dict:
    from .crossed import class_component
    from .complexes import cyclic_homology
    from .groups import crossed_product
    from .quasi_iso import finite_centralizer_pipeline, finite_order_pipeline, hp_estimate
    from .simplicial import derive_parachain
    A, G, act, N = P.algebra, P.group, P.action, P.truncation
    if pipeline == "direct":
        Acr = crossed_product(A, G, act)
        M = derive_parachain(class_component(Acr, phi, N, w))
        H = cyclic_homology(M)
        return {"class": G.elements[phi], "method": "direct", "weight": w, "truncation": N,
                "hc_dims": list(H.dims), "hp_estimate": hp_estimate(M), "agree": True, "checks": []}
    coefficients = None
    if pipeline == "hkr":
        from .hkr import hkr_coefficients
        coefficients = hkr_coefficients(act, N, w)
        pipeline = "finite"
    if pipeline == "finite":
        r = finite_centralizer_pipeline(A, G, act, phi, N, w, coefficients=coefficients, direct=compare)
    else:
        r = finite_order_pipeline(A, G, act, phi, N, w, coefficients=coefficients, spectral=False, direct=compare)
    return r


def _reports(P: Problem, compare: bool, spec) -> list[dict]:
    if P.infinite is not None:
        return [_infinite_report(P)]
    jobs = [(phi, w) for phi in P.phi for w in P.weights()]
    if isinstance(spec, (str, Path)) and int(os.environ.get(THREADS_ENV, "1") or 1) > 1:
        return _map(_class_job, [(str(spec), P.truncation, w, phi, P.pipeline, compare, None) for phi, w in jobs])
    return [_class_report(P, phi, w, P.pipeline, compare) for phi, w in jobs]


def _sigma_coefficients(P: Problem):
    from .crossed import TwistedAlgebraCyclic
    from .simplicial import derive_parachain
    Y = TwistedAlgebraCyclic(P.algebra, P.truncation, None, P.weight, P.action)
    return derive_parachain(Y), Y.act_matrix


def _infinite_report(P: Problem) -> dict:
    from .quasi_iso import infinite_order_report
    C, act = _sigma_coefficients(P)
    r = infinite_order_report(P.infinite["extension"], C, act, P.truncation)
    r["class"] = "phi"
    r["agree"] = True
    return r


def _ok(reports) -> bool:
    good = True
    for r in reports:
        good &= bool(r.get("agree", True))
        for key in ("pi0_alpha_iso", "eps_nu_alpha_iso"):
            good &= bool(r.get(key, True))
        if "embedding" in r:
            good &= bool(r["embedding"]["iso"])
    return good


# -- commands --------------------------------------------------------------------

common = [
    click.option("--truncation", "-N", type=int, default=None, help="Truncation degree N (at most 6)."),
    click.option("--weight", "-w", type=int, default=None, help="Restrict to one weight of a graded algebra."),
    click.option("--class", "klass", default=None, help="Group element whose conjugacy class is treated."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json"),
    click.option("--out", type=click.Path(file_okay=False), default=None, help="Directory for artifacts."),
]


def with_common(f):
    for opt in reversed(common):
        f = opt(f)
    return f


@click.group()
def main():
    """Exact cyclic homology of crossed products by finite groups."""


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
def validate(spec, truncation, weight, klass, fmt, out):
    """Run every constructor identity on a problem description."""
    def body():
        from .crossed import centralizer_model, class_component, tensor_over_gamma
        from .groups import crossed_product
        from .quasi_iso import SigmaModel
        from .simplicial import derive_parachain
        from .complexes import cyclic_complex, totalize_bicomplex
        P = _load(spec, truncation, weight, klass)
        checks = ["group axioms", "algebra unital and associative", "action by automorphisms"]
        N = min(P.truncation, 4)
        if P.infinite is not None:
            C, act = _sigma_coefficients(P)
            ext = P.infinite["extension"]
            SigmaModel(ext.quotient, ext.u, C, act, N)
            checks += ["Euler cocycle: du = 0", "(d+)^2 = 0", "d+ commutes with u cap -"]
        else:
            Acr = crossed_product(P.algebra, P.group, P.action)
            Acr.check()
            checks.append("crossed product unital and associative")
            for phi in P.phi:
                for w in P.weights():
                    lab = P.class_label(phi) + ("" if w is None else f" weight {w}")
                    comp = class_component(Acr, phi, N, w)
                    cyclic_complex(derive_parachain(comp))
                    cd, X, Y, T = centralizer_model(P.algebra, P.group, P.action, phi, N, w, region="triangle")
                    tot = totalize_bicomplex(T.to_parachain_bicomplex())
                    cyclic_complex(tot)
                    checks += [f"[{lab}] cyclic identities of C(A x| G)[phi]",
                               f"[{lab}] paracyclic identities of C^phi(A) and C^phi(G_phi)",
                               f"[{lab}] tensor product identities", f"[{lab}] totalization identities"]
        emit({"ok": True, "truncation": N, "checks": checks}, fmt, out, "validate")
    _run(body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
@click.option("--compare", is_flag=True, help="Also compute the direct side and require agreement.")
def hc(spec, truncation, weight, klass, fmt, out, compare):
    """Cyclic homology per conjugacy class (and weight)."""
    def body():
        P = _load(spec, truncation, weight, klass)
        reports = _reports(P, compare, spec)
        emit({"pipeline": P.pipeline, "truncation": P.truncation, "reports": reports}, fmt, out, "hc")
        if compare and not _ok(reports):
            return 1
    _run(body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
def hp(spec, truncation, weight, klass, fmt, out):
    """Periodic cyclic homology estimates with stabilization certificates."""
    def body():
        P = _load(spec, truncation, weight, klass)
        reports = _reports(P, False, spec)
        slim = [{k: r.get(k) for k in ("class", "weight", "method", "hp_estimate", "periodicity_ranks") if k in r}
                for r in reports]
        emit({"truncation": P.truncation, "reports": slim}, fmt, out, "hp")
    _run(body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
def split(spec, truncation, weight, klass, fmt, out):
    """Split C(A x| G) by conjugacy classes; chain dims and HC per class."""
    def body():
        from .complexes import cyclic_homology
        from .crossed import split_by_class
        from .groups import crossed_product
        from .simplicial import derive_parachain
        P = _load(spec, truncation, weight, klass)
        if P.infinite is not None:
            raise Abort(2, {"error": "usage", "message": "split needs a finite group"})
        Acr = crossed_product(P.algebra, P.group, P.action)
        rows = []
        for w in P.weights():
            comps = split_by_class(Acr, P.truncation, w)
            for rep in sorted(comps):
                if klass is not None and rep not in P.phi:
                    continue
                M = derive_parachain(comps[rep])
                H = cyclic_homology(M)
                rows.append({"class": P.group.elements[rep], "weight": w,
                             "members": [P.group.elements[g] for g in comps[rep].klass],
                             "chain_dims": list(comps[rep].spaces.dims), "hc_dims": list(H.dims)})
        emit({"truncation": P.truncation, "components": rows}, fmt, out, "split")
    _run(body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
@click.option("--which", type=click.Choice(["I", "II", "III", "sigma"]), default="I")
@click.option("--pages", type=int, default=3)
def ss(spec, truncation, weight, klass, fmt, out, which, pages):
    """Spectral-sequence pages E^0..E^pages and E^infinity."""
    def body():
        P = _load(spec, truncation, weight, klass)
        if which == "sigma":
            if P.infinite is None:
                raise Abort(2, {"error": "usage", "message": "--which sigma needs an infinite_order problem"})
            from .quasi_iso import sigma_model
            C, act = _sigma_coefficients(P)
            ext = P.infinite["extension"]
            res = sigma_model(ext.quotient, ext.u, C, act, P.truncation, pages=pages)
            emit({"which": "sigma", "ss": res["spectral_sequence"].to_dict()}, fmt, out, "ss-sigma")
            return 0 if res["spectral_sequence"].converges() else 1
        if P.infinite is not None:
            raise Abort(2, {"error": "usage", "message": f"--which {which} needs a finite-order class"})
        from .quasi_iso import finite_order_pipeline
        reports, good = [], True
        for phi in P.phi:
            for w in P.weights():
                r = finite_order_pipeline(P.algebra, P.group, P.action, phi, P.truncation, w, pages=pages,
                                          certify=False, direct=True)
                s = r["spectral_sequences"][which]
                good &= s["converges"] and s.get("matches_direct", True)
                reports.append({"class": r["class"], "weight": w, "which": which, "ss": s,
                                "hc_direct": r["hc_direct"]})
        emit({"reports": reports}, fmt, out, f"ss-{which}")
        return 0 if good else 1
    _run(body)


@main.command("hkr-check")
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@with_common
@click.option("--compare", is_flag=True, help="Run the varieties pipeline on every class and require agreement.")
def hkr_check(spec, truncation, weight, klass, fmt, out, compare):
    """Twisted HKR map: parachain-map check and weightwise isomorphism on Hochschild homology."""
    def body():
        from .hkr import check_hkr, varieties_pipeline
        P = _load(spec, truncation, weight, klass)
        if not P.is_poly:
            raise Abort(2, {"error": "usage", "message": "hkr-check needs a 'poly' problem with 'linear_action'"})
        A, G, act = P.algebra, P.group, P.action
        reports, good = [], True
        for phi in P.phi:
            entry = {"class": G.elements[phi], "weights": {}}
            for w in P.weights():
                r = check_hkr(A, act.linear[phi], P.truncation, w)
                good &= r["iso"]
                entry["weights"][str(w)] = r
            if compare:
                v = varieties_pipeline(act, phi, P.truncation, P.weights())
                entry["pipeline"] = v
                good &= v["agree"]
            reports.append(entry)
        emit({"truncation": P.truncation, "reports": reports}, fmt, out, "hkr")
        return 0 if good else 1
    _run(body)


@main.command()
@click.option("--truncation", "-N", type=int, default=4)
@click.option("--connes", is_flag=True, help="Also compare lambda-complex homology with mixed-complex HC.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(file_okay=False), default=None)
def identities(truncation, connes, fmt, out):
    """Run the identity suite over the shipped corpus."""
    def body():
        from .corpus import connes_cross_check, run_identity_suite
        res = run_identity_suite(truncation)
        for r in res:
            r.pop("seconds", None)
        payload = {"truncation": truncation, "instances": res}
        good = all(r["ok"] for r in res)
        if connes:
            cc = connes_cross_check(truncation)
            payload["connes"] = cc
            good &= all(r["ok"] for r in cc)
        emit(payload, fmt, out, "identities")
        return 0 if good else 1
    _run(body)


@main.command("write-corpus")
@click.argument("directory", type=click.Path(file_okay=False))
def write_corpus_cmd(directory):
    """Write the shipped problem descriptions as JSON files."""
    from .corpus import write_corpus
    for p in write_corpus(directory):
        click.echo(str(p))


if __name__ == "__main__":
    main()

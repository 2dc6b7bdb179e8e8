"""Experiment runner: schema validation, dispatch, deterministic reports."""

from __future__ import annotations

import copy
import csv
import io
import json
import os
import random
import time
from datetime import datetime, timezone
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema

from . import __version__, catalog, dyndeg, monomial, orbitlab
from .exact import poly_parse
from .exact.upoly import Uncertifiable
from .interval import decimal_string
from .projmap import (ProjMap, ProjPoint, ResourceLimitExceeded, degree_sequence, load_map,
                      map_from_json)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_UNCERTIFIABLE = 4


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every offending field."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


@lru_cache(maxsize=None)
def schema() -> dict:
    return json.loads(resources.files("adlab").joinpath("config.schema.json").read_text())


def _defaults(kind: str) -> dict:
    props = schema()["$defs"][f"{kind}_params"].get("properties", {})
    return {k: copy.deepcopy(v["default"]) for k, v in props.items() if "default" in v}


def validate(config: dict) -> dict:
    """Validate and return the resolved config with every default filled in."""
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{where}: {e.message}")
        raise ConfigError(msgs)
    resolved = copy.deepcopy(config)
    resolved.setdefault("seed", 0)
    params = _defaults(config["kind"])
    if config["kind"] == "invariant":
        params.update(F=list(catalog.BHT_F_EXPRS), phi=catalog.BHT_PHI_EXPR, vars=list(catalog.BHT_VARS))
    params.update(config.get("params", {}))
    resolved["params"] = params
    return resolved


def versions() -> dict:
    import gmpy2
    out = {"adlab": __version__, "gmpy2": gmpy2.version()}
    try:
        import flint
        out["python-flint"] = flint.__version__
    except ImportError:  # pragma: no cover
        out["python-flint"] = None
    return out


def resolve_map(spec: dict, base_dir: str = ".") -> ProjMap:
    if "catalog" in spec:
        try:
            obj = catalog.get(spec["catalog"], **spec.get("params", {}))
        except catalog.UnknownMap as exc:
            raise ConfigError([f"map/catalog: {exc.args[0]}"]) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError([f"map/params: {exc}"]) from None
        if not isinstance(obj, ProjMap):
            raise ConfigError([f"map/catalog: {spec['catalog']!r} is a function, not a map"])
        return obj
    if "file" in spec:
        path = spec["file"]
        return load_map(path if os.path.isabs(path) else os.path.join(base_dir, path))
    return map_from_json(spec)


def _tol(x) -> Fraction:
    return Fraction(str(x))


def _point(spec, dim: int) -> ProjPoint:
    if len(spec) != dim + 1:
        raise ConfigError([f"params/point: expected {dim + 1} coordinates, got {len(spec)}"])
    if not any(spec):
        raise ConfigError(["params/point: all coordinates are zero"])
    return ProjPoint(tuple(spec))


def _avoid(text, f: ProjMap):
    return poly_parse(text, list(f.names)) if text else None


# -- experiment kinds -----------------------------------------------------------

def _run_degseq(cfg, f, rng):
    p = cfg["params"]
    seq = degree_sequence(f, p["L"], backend=p["backend"], term_cap=p["term_cap"])
    res = {"degrees": seq.degs, "truncated": seq.truncated, "failed_at": seq.failed_at,
           "term_counts": seq.term_counts, "submultiplicative": seq.is_submultiplicative()}
    rows = [[n + 1, d] for n, d in enumerate(seq.degs)]
    return res, {"degrees": (["n", "degree"], rows)}


def _run_dyndeg(cfg, f, rng):
    p = cfg["params"]
    seq = degree_sequence(f, p["L"], backend=p["backend"], term_cap=p["term_cap"])
    est = dyndeg.estimate_growth(seq)
    res = {"degrees": seq.degs, "estimate": est.to_json()}
    rows = [[n + 1, d] for n, d in enumerate(seq.degs)]
    return res, {"degrees": (["n", "degree"], rows)}


def _run_bdj(cfg, f, rng):
    p = cfg["params"]
    h = monomial.MonomialMap.from_zeta(*p["zeta"])
    series = dyndeg.bdj_delta1(h, _tol(p["tol"]))
    delta2 = abs(monomial.det(h.M))
    verdict = dyndeg.classify([series.value, delta2])
    res = {"delta1": series.to_json(), "delta2": str(delta2), "classification": verdict.to_json(),
           "deg_h_powers": monomial.power_degrees(h, 8)}
    return res, {}


def _run_monomial(cfg, f, rng):
    p = cfg["params"]
    h = monomial.MonomialMap(tuple(tuple(r) for r in p["rows"])) if "rows" in p \
        else monomial.MonomialMap.from_zeta(*p["zeta"])
    rep = monomial.monomial_report(h, p["J"], _tol(p["tol"]))
    res = rep.to_json()
    res["log_concave"] = dyndeg.check_log_concavity([1, *rep.dyn_degrees])[0]
    return res, {}


def _run_pisot(cfg, f, rng):
    p = cfg["params"]
    coeffs = dyndeg.univariate(p["poly"])
    tol = _tol(p["tol"])
    res = {"coefficients": [str(c) for c in coeffs]}
    try:
        res["largest_real_root"] = dyndeg.largest_real_root(coeffs, tol).to_json()
    except dyndeg.upoly.NoRealRoot as exc:
        res["largest_real_root"] = None
        res["note"] = str(exc)
    if all(c.denominator == 1 for c in coeffs):
        res["pisot"] = monomial.pisot_check([int(c) for c in coeffs], tol).to_json()
    else:
        res["pisot"] = {"is_pisot": False, "reason": "non-integer coefficients"}
    return res, {}


def _sample_or_given(p, f, rng, key="point"):
    if p.get(key) is not None:
        return _point(p[key], f.dim)
    return orbitlab.random_points(rng, f.dim, 1, p["bound"], _avoid(p.get("avoid"), f))[0]


def _run_orbit(cfg, f, rng):
    p = cfg["params"]
    P = _sample_or_given(p, f, rng)
    rec = orbitlab.run_orbit(f, P, p["budget"], p["height_cap"])
    est = None
    try:
        est = orbitlab.arith_degree(rec, p["window"])
    except orbitlab.OrbitTooShort:
        pass
    doc = orbitlab.orbit_report(rec, est)
    return {"orbit": doc}, {"orbit": orbitlab.orbit_csv(rec)}


def _run_arithdeg(cfg, f, rng):
    p = cfg["params"]
    avoid = _avoid(p["avoid"], f)
    orbits, redrawn = [], []
    while len(orbits) < p["samples"]:
        P = orbitlab.random_points(rng, f.dim, 1, p["bound"], avoid)[0]
        rec = orbitlab.run_orbit(f, P, p["budget"])
        if rec.stop["reason"] == "hit_indeterminacy":
            redrawn.append(list(P.coords))
            if len(redrawn) > p["max_redraws"]:
                raise ResourceLimitExceeded("too many starting points hit indeterminacy")
            continue
        orbits.append(rec)
    docs, rows = [], []
    for i, rec in enumerate(orbits):
        est = orbitlab.arith_degree(rec, p["window"])
        doc = orbitlab.orbit_report(rec, est)
        if not rec.is_periodic:
            for key, check, k in (("power_check", orbitlab.power_consistency, 2),
                                  ("shift_check", orbitlab.shift_consistency, 3)):
                try:
                    doc[key] = _floats(check(rec, k, p["window"]))
                except orbitlab.OrbitTooShort as exc:
                    doc[key] = {"k": k, "ok": None, "note": str(exc)}
        if p["delta1"] is not None:
            doc["exceeds_delta1"] = est.alpha_lower > p["delta1"] * 1.05
        docs.append(doc)
        for n, hv in enumerate(rec.heights):
            rows.append([i, n, decimal_string(hv.h)])
    return {"orbits": docs, "redrawn": redrawn}, {"heights": (["orbit", "n", "h"], rows)}


def _floats(d: dict) -> dict:
    return {k: decimal_string(v) if isinstance(v, float) else v for k, v in d.items()}


def _run_dml(cfg, f, rng):
    p = cfg["params"]
    Z = poly_parse(p["Z"], list(f.names))
    P = _sample_or_given(p, f, rng)
    rs = orbitlab.return_set(f, P, Z, p["budget"])
    res = {"start": list(P.coords), **rs.to_json()}
    return res, {}


def _run_invariant(cfg, f, rng):
    p = cfg["params"]
    F, phi, variables = p["F"], p["phi"], p["vars"]
    try:
        ok = orbitlab.check_invariant(F, phi, variables)
    except ValueError as exc:
        raise ConfigError([f"params: {exc}"]) from None
    return {"invariant": ok, "F": list(F), "phi": phi, "vars": list(variables)}, {}


def _run_heightineq(cfg, f, rng):
    p = cfg["params"]
    samples = orbitlab.random_points(rng, f.dim, p["samples"], p["bound"])
    try:
        rep = orbitlab.three_point_experiment(f, samples, p["d1"], p["d2"], p["zeta"])
    except ValueError as exc:
        raise ConfigError([f"params: {exc}"]) from None
    return _floats(rep), {}


_KINDS = {
    "degseq": _run_degseq, "dyndeg": _run_dyndeg, "bdj": _run_bdj, "monomial": _run_monomial,
    "pisot": _run_pisot, "orbit": _run_orbit, "arithdeg": _run_arithdeg, "dml": _run_dml,
    "invariant": _run_invariant, "heightineq": _run_heightineq,
}


def run(config: dict, seed: int | None = None, base_dir: str = ".") -> tuple[dict, dict]:
    """Execute one experiment; returns (report, csv tables by name)."""
    if seed is not None:
        config = {**config, "seed": seed}
    cfg = validate(config)
    rng = random.Random(cfg["seed"])
    f = resolve_map(cfg["map"], base_dir) if "map" in cfg else None
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    result, tables = _KINDS[cfg["kind"]](cfg, f, rng)
    report = {
        "kind": cfg["kind"],
        "config": cfg,
        "versions": versions(),
        "map": f.to_json() if f is not None else None,
        "result": result,
        "timestamp": {"started": started, "elapsed_s": round(time.perf_counter() - t0, 6)},
    }
    return report, tables


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def strip_timestamps(report):
    if isinstance(report, dict):
        return {k: strip_timestamps(v) for k, v in report.items() if k != "timestamp"}
    if isinstance(report, list):
        return [strip_timestamps(v) for v in report]
    return report


def _csv_text(table) -> str:
    if isinstance(table, str):
        return table
    header, rows = table
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_outputs(report: dict, tables: dict, out_dir: str, stem: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f"{stem}.json")]
    with open(paths[0], "w") as fh:
        fh.write(dumps(report))
    for name, table in sorted(tables.items()):
        path = os.path.join(out_dir, f"{stem}.{name}.csv")
        with open(path, "w") as fh:
            fh.write(_csv_text(table))
        paths.append(path)
    return paths


def exit_code_for(exc: BaseException) -> int:
    from .exact.parse import ParseError
    from .projmap import MapError
    if isinstance(exc, (ConfigError, ParseError, MapError, catalog.UnknownMap)):
        return EXIT_VALIDATION
    if isinstance(exc, ResourceLimitExceeded):
        return EXIT_RESOURCE
    if isinstance(exc, Uncertifiable):
        return EXIT_UNCERTIFIABLE
    return EXIT_OTHER

"""Command-line experiment runner.

Every experiment takes an :class:`ExperimentConfig` (built from flags or a
JSON file), returns a :class:`RunReport` whose values are all strings (exact
fractions as ``p/q``), and maps its overall verdict to an exit code:
0 PASS/CONSISTENT, 1 FAIL/VIOLATION, 2 INCONCLUSIVE/UNKNOWN, 3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import random
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from . import cantor_free as cf
from . import criterion as crit
from . import return_sets as rs
from .errors import FreeDynError, HorizonExceeded, ParseError
from .free_space import FreeVector, free_norm, line_norm, pair
from .maps import apply, parse_map, parse_tuple, sigma
from .metric_spaces import parse_point, parse_space
from .verdicts import EXIT_CODES, Verdict

EXIT_BAD_INPUT = 3


@dataclass
class ExperimentConfig:
    experiment: str
    space: str = "cantor"
    maps: list = field(default_factory=list)
    u0: Optional[str] = None
    u: list = field(default_factory=list)
    v0: Optional[str] = None
    v: list = field(default_factory=list)
    family: list = field(default_factory=list)
    g: Optional[str] = None
    horizon: int = rs.DEFAULT_HORIZON
    min_count: int = rs.DEFAULT_MIN_COUNT
    r: int = 2
    vector: list = field(default_factory=list)
    powers: list = field(default_factory=lambda: [1, 2])
    K: int = 20
    eps: str = str(crit.DEFAULT_EPS)
    schedule: Optional[list] = None
    level: int = 5
    upto: int = 15
    cols: int = 8
    rows: int = 8
    m_range: str = "1..30"
    center: str = "2:1/2"
    radius: str = "1/4"
    seed: int = 0
    samples: int = 5
    output: Optional[str] = None
    format: Optional[str] = None
    timing: bool = False

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParseError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ParseError("config needs an 'experiment' key")
        data = dict(data)
        for key in ("maps", "u", "v", "family", "vector"):
            if isinstance(data.get(key), str):
                data[key] = [data[key]]
        for key in ("powers", "schedule"):
            if data.get(key) is not None:
                data[key] = _int_list(data[key])
        return cls(**data)

    def echo(self) -> dict:
        """Settings that differ from the defaults; output location and timing are left out."""
        defaults = ExperimentConfig(self.experiment)
        return {
            f.name: getattr(self, f.name)
            for f in dataclasses.fields(self)
            if f.name not in ("output", "format", "timing")
            and (f.name == "experiment" or getattr(self, f.name) != getattr(defaults, f.name))
        }


@dataclass
class RunReport:
    experiment: str
    config: dict
    verdict: str
    verdicts: dict
    tables: dict
    wall_time: Optional[str] = None

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        if self.wall_time is None:
            del d["wall_time"]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        return cls(**data)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[Verdict(self.verdict)]


# -- literal parsing -------------------------------------------------------------

def _frac(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def _int_list(value) -> list[int]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return [int(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad integer list {value!r}") from exc


def _range(text: str) -> range:
    lo, sep, hi = str(text).partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError as exc:
        raise ParseError(f"bad range {text!r}; expected a..b") from exc
    if a < 0 or b < a:
        raise ParseError(f"bad range {text!r}")
    return range(a, b + 1)


def _l1(text: str) -> cf.L1Vector:
    """``"2:1/2,5:-1"`` -> (1/2) e_2 - e_5."""
    terms = {}
    for item in str(text).split(","):
        n, sep, c = item.partition(":")
        if not sep:
            raise ParseError(f"bad l1 term {item!r}; expected n:coef")
        try:
            terms[int(n)] = terms.get(int(n), 0) + _frac(c)
        except ValueError as exc:
            raise ParseError(f"bad l1 index {n!r}") from exc
    return cf.L1Vector(terms)


def _vector(space, items) -> FreeVector:
    terms = []
    for item in items:
        p, sep, c = str(item).rpartition(":")
        if not sep:
            raise ParseError(f"bad vector term {item!r}; expected point:coef")
        terms.append((parse_point(space, p), _frac(c)))
    return FreeVector(space, terms)


def _sets(items) -> list:
    return [rs.parse_set(s) for s in items]


# -- experiments -----------------------------------------------------------------

def _s(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def _sample_row(sample: rs.ReturnSetSample, verdict) -> dict:
    return {
        "tuple": ",".join(str(f) for f in sample.tuple),
        "U0": str(sample.u0),
        "U": ";".join(str(s) for s in sample.u),
        "m_min": _s(sample.m_min),
        "density": _s(sample.density),
        "cofinite_from": _s(sample.cofinite_from),
        "verdict": _s(verdict),
        "members": " ".join(map(str, sample.members)),
    }


def _gaps(cfg):
    if cfg.upto < 1:
        raise ParseError("--upto must be >= 1")
    rows, ok = [], True
    for n in range(1, cfg.upto + 1):
        g = cf.gap(n)
        if n >= 2:
            parent = cf.gap(n // 2)
            ok &= apply(sigma(), g.right) == parent.right and apply(sigma(), g.left) == parent.left
        rows.append({
            "n": _s(n), "level": _s(cf.level(n)), "a": _s(g.a), "b": _s(g.b), "d": _s(g.d),
            "a_digits": str(g.left), "b_digits": str(g.right),
        })
    v = Verdict.PASS if ok else Verdict.FAIL
    return v, {"shift_consistency": v.value}, {"gaps": rows}


def _matrix(cfg):
    if cfg.cols < 1 or cfg.rows < 1:
        raise ParseError("--cols and --rows must be >= 1")
    cols = {n: cf.m_sigma_column(n, cfg.rows) for n in range(1, cfg.cols + 1)}
    ok = all(
        cols[n].get(r, Fraction(0)) == cf.s_sigma_apply(cf.e(n)).coordinate(r)
        for n in cols for r in range(1, cfg.rows + 1)
    )
    rows = [
        {"row": _s(r), **{f"e{n}": _s(cols[n].get(r, Fraction(0))) for n in cols}}
        for r in range(1, cfg.rows + 1)
    ]
    v = Verdict.PASS if ok else Verdict.FAIL
    return v, {"operator_agreement": v.value}, {"matrix": rows}


def _return_sets(cfg):
    tup = parse_tuple(cfg.maps)
    if cfg.family:
        fam = _sets(cfg.family)
        rep = rs.check_disjoint_transitive(tup, fam, cfg.horizon)
        rows = [_sample_row(s, "empty" if not s.members else "hit") for s in rep.samples]
        return rep.verdict, {"disjoint_transitive": rep.verdict.value}, {"samples": rows}
    if cfg.u0 is None or len(cfg.u) != len(tup):
        raise ParseError(f"need --u0 and {len(tup)} --u sets (or a --family)")
    u0, u = rs.parse_set(cfg.u0), _sets(cfg.u)
    sample = rs.disjoint_return_set(tup, u0, u, cfg.horizon)
    v = rs.nonempty_implies_infinite_check(sample, cfg.min_count)
    return v, {"nonempty_implies_infinite": v.value}, {"samples": [_sample_row(sample, v)]}


def _weak_mixing(cfg):
    tup = parse_tuple(cfg.maps)
    fam = _sets(cfg.family)
    if not fam:
        raise ParseError("weak-mixing needs a --family")
    if cfg.r < 1:
        raise ParseError("--r must be >= 1")
    rep = rs.weakly_mixing_order_r(tup, cfg.r, fam, cfg.horizon)
    rows = [_sample_row(s, "") for s in rep.samples]
    fails = [{"choices": " & ".join(f"{c.u0}->{';'.join(map(str, c.u))}" for c in combo)} for combo in rep.failures]
    return rep.verdict, {f"weakly_mixing_order_{cfg.r}": rep.verdict.value}, {"samples": rows, "failures": fails}


def _filter_witness(cfg):
    tup = parse_tuple(cfg.maps)
    if cfg.g is None:
        raise ParseError("filter-witness needs --g")
    g = parse_map(cfg.g, tup.space)
    n = len(tup)
    if cfg.u0 is None or cfg.v0 is None or len(cfg.u) != n or len(cfg.v) != n:
        raise ParseError(f"need --u0, --v0 and {n} each of --u and --v")
    U = [rs.parse_set(cfg.u0)] + _sets(cfg.u)
    V = [rs.parse_set(cfg.v0)] + _sets(cfg.v)
    try:
        wit = rs.commutator_filter_witness(tup, g, U, V, cfg.horizon)
    except HorizonExceeded as exc:
        return Verdict.INCONCLUSIVE, {"witness": "NOT_FOUND", "detail": str(exc)}, {}
    chk = rs.filter_inclusion_check(tup, U, V, wit.w, cfg.horizon)
    row = {
        "m": _s(wit.m),
        "W": " ; ".join(str(x) for x in wit.w),
        "W_members": " ".join(map(str, chk.w_members)),
        "U_members": " ".join(map(str, chk.u_members)),
        "V_members": " ".join(map(str, chk.v_members)),
        "extra": " ".join(map(str, chk.extra)),
    }
    return chk.verdict, {"inclusion": chk.verdict.value}, {"witness": [row]}


def _free_norm(cfg):
    space = parse_space(cfg.space)
    vec = _vector(space, cfg.vector)
    cert = free_norm(vec)
    ok = pair(cert.witness_g, vec) == cert.value and cert.witness_g.lipschitz_constant() <= 1
    verdicts = {"dual_witness": "PASS" if ok else "FAIL"}
    if space.is_line:
        agree = line_norm(vec).value == cert.value
        verdicts["closed_form_agreement"] = "PASS" if agree else "FAIL"
        ok &= agree
    rows = [{"point": str(p), "coefficient": _s(c), "g": _s(cert.witness_g(p))} for p, c in vec.terms.items()]
    verdicts["norm"] = _s(cert.value)
    return (Verdict.PASS if ok else Verdict.FAIL), verdicts, {"support": rows}


def _conjugacy(cfg):
    L = cfg.level
    if L < 1:
        raise ParseError("--level must be >= 1")
    rng = random.Random(cfg.seed)
    cases = [(f"e{n}", cf.e(n)) for n in range(1, 2**L)]
    for s in range(cfg.samples):
        idx = rng.sample(range(1, 2**L), min(4, 2**L - 1))
        vec = cf.L1Vector({n: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for n in idx})
        cases.append((f"random{s}", vec))
    rows, ok = [], True
    for name, vec in cases:
        res = cf.conjugacy_residual(vec, L)
        ok &= res.residual <= res.tail_bound
        rows.append({"vector": name, "residual": _s(res.residual), "tail_bound": _s(res.tail_bound)})
    v = Verdict.PASS if ok else Verdict.FAIL
    return v, {"residual_within_tail": v.value}, {"residuals": rows}


def _witness(cfg):
    powers = _int_list(cfg.powers)
    center, radius = _l1(cfg.center), _frac(cfg.radius)
    rows, found_all = [], True
    for m in _range(cfg.m_range):
        res = cf.operator_return_witness(powers, center, radius, [(center, radius)] * len(powers), m)
        found_all &= res.found
        rows.append({
            "m": _s(m),
            "found": _s(res.found),
            "u0_distance": _s(res.u0_distance),
            "target_distances": " ".join(map(str, res.target_distances)),
        })
    v = Verdict.PASS if found_all else Verdict.UNKNOWN
    return v, {"all_witnessed": v.value}, {"witnesses": rows}


def _criterion(kind):
    def run(cfg):
        powers = _int_list(cfg.powers)
        fn = crit.shift_powers_experiment if kind == "shift" else crit.tent_powers_experiment
        sched = _int_list(cfg.schedule) if cfg.schedule is not None else None
        rep = fn(powers, cfg.K, _frac(cfg.eps), schedule=sched)
        j = rep.to_json()
        verdicts = {f"condition_{c}": v for c, v in j["conditions"].items()}
        verdicts.update({f"worst_{c}": v for c, v in j["worst_at_K"].items()})
        verdicts["test_bound"] = rep.test_bound
        verdicts["implication"] = rep.implication
        return rep.verdict, verdicts, {"decay": j["decay"]}
    return run


def _list(cfg):
    rows = [{"name": n, "description": d, "anchor": a} for n, d, a in list_experiments()]
    return Verdict.PASS, {}, {"experiments": rows}


_REGISTRY: dict[str, tuple[Callable, str, str]] = {
    "gaps": (_gaps, "Gap endpoints, lengths and levels of the Cantor set in heap order", "Cantor gaps and the Godard l1 model"),
    "matrix": (_matrix, "Truncated matrix of the shift operator on l1", "matrix of the conjugated shift"),
    "return-sets": (_return_sets, "Exact disjoint return sets, or disjoint transitivity over a family", "disjoint return sets; non-empty implies infinite"),
    "weak-mixing": (_weak_mixing, "Disjoint weak mixing of order r via intersections of return sets", "weak mixing of order r; product reduction"),
    "filter-witness": (_filter_witness, "Commuting-map witness W with d-N(W) inside d-N(U) and d-N(V)", "commutator filter theorem"),
    "free-norm": (_free_norm, "Exact Lipschitz-free norm with a dual 1-Lipschitz witness", "Lipschitz-free spaces; KR duality"),
    "conjugacy": (_conjugacy, "Residual of phi(S v) against T_sigma phi(v) with exact tail bounds", "Godard isometry and the conjugated shift"),
    "witness": (_witness, "Constructive witnesses for operator return times on l1 balls", "disjoint mixing of shift powers on F(C)"),
    "criterion-shift": (_criterion("shift"), "Lipschitz disjoint hypercyclicity criterion for shift powers", "shift powers on the Cantor set"),
    "criterion-tent": (_criterion("tent"), "Lipschitz disjoint hypercyclicity criterion for tent-map powers", "anti-symmetric tent map powers"),
    "list": (_list, "This catalog", "catalog"),
}


def list_experiments() -> list[tuple[str, str, str]]:
    return [(n, d, a) for n, (_, d, a) in _REGISTRY.items()]


def _validate(cfg: ExperimentConfig) -> None:
    """Parse every literal the experiment will touch so errors surface up front."""
    if cfg.experiment not in _REGISTRY:
        raise ParseError(f"unknown experiment {cfg.experiment!r}")
    for name in ("horizon", "min_count", "r", "K", "level", "upto", "cols", "rows", "seed", "samples"):
        if not isinstance(getattr(cfg, name), int) or isinstance(getattr(cfg, name), bool):
            raise ParseError(f"{name} must be an integer")
    if cfg.horizon < 0:
        raise ParseError("horizon must be >= 0")
    if cfg.K < 3 and cfg.experiment.startswith("criterion"):
        raise ParseError("K must be >= 3")
    if cfg.maps:
        parse_tuple(cfg.maps)
    for s in [cfg.u0, cfg.v0, *cfg.u, *cfg.v, *cfg.family]:
        if s is not None:
            rs.parse_set(s)
    parse_space(cfg.space)
    _frac(cfg.eps)
    _frac(cfg.radius)
    _int_list(cfg.powers)
    _range(cfg.m_range)
    _l1(cfg.center)


def run(cfg: ExperimentConfig) -> RunReport:
    _validate(cfg)
    start = time.perf_counter()
    verdict, verdicts, tables = _REGISTRY[cfg.experiment][0](cfg)
    wall = f"{time.perf_counter() - start:.3f}" if cfg.timing else None
    return RunReport(cfg.experiment, cfg.echo(), Verdict(verdict).value, dict(verdicts), tables, wall)


# -- output ----------------------------------------------------------------------

def _to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for name, rows in report.tables.items():
        if not rows:
            continue
        header = list(rows[0])
        writer.writerow([f"# {name}"])
        writer.writerow(header)
        for row in rows:
            writer.writerow([row.get(h, "") for h in header])
    writer.writerow(["# verdict", report.verdict])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(report: RunReport, fmt: str) -> str:
    return _to_csv(report) if fmt == "csv" else report.dumps()


# -- argument parsing ------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with experiment settings")
    p.add_argument("--output", "-o", help="write the report here (atomically)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--timing", action="store_true", default=None, help="include wall time (breaks byte-stability)")
    p.add_argument("--seed", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="free-dyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gaps", help=_REGISTRY["gaps"][1])
    p.add_argument("--upto", type=int)
    _common(p)

    p = sub.add_parser("matrix", help=_REGISTRY["matrix"][1])
    p.add_argument("--cols", type=int)
    p.add_argument("--rows", type=int)
    _common(p)

    for name in ("return-sets", "weak-mixing", "filter-witness"):
        p = sub.add_parser(name, help=_REGISTRY[name][1])
        p.add_argument("--map", dest="maps", action="append", help="map literal, repeat for a tuple")
        p.add_argument("--family", action="append", help="set literal, repeat for a family")
        p.add_argument("--horizon", type=int)
        if name == "return-sets":
            p.add_argument("--u0")
            p.add_argument("--u", action="append")
            p.add_argument("--min-count", dest="min_count", type=int)
        if name == "weak-mixing":
            p.add_argument("--r", type=int)
        if name == "filter-witness":
            p.add_argument("--g")
            p.add_argument("--u0")
            p.add_argument("--u", action="append")
            p.add_argument("--v0")
            p.add_argument("--v", action="append")
        _common(p)

    p = sub.add_parser("free-norm", help=_REGISTRY["free-norm"][1])
    p.add_argument("--space")
    p.add_argument("--term", dest="vector", action="append", help="point:coef, repeatable")
    _common(p)

    p = sub.add_parser("conjugacy", help=_REGISTRY["conjugacy"][1])
    p.add_argument("--level", type=int)
    p.add_argument("--samples", type=int)
    _common(p)

    p = sub.add_parser("witness", help=_REGISTRY["witness"][1])
    p.add_argument("--powers")
    p.add_argument("--m-range", dest="m_range")
    p.add_argument("--center", help="l1 vector as n:coef,...")
    p.add_argument("--radius")
    _common(p)

    p = sub.add_parser("criterion", help="Lipschitz disjoint hypercyclicity criterion experiments")
    p.add_argument("kind", choices=("shift", "tent"))
    p.add_argument("--powers")
    p.add_argument("--K", type=int)
    p.add_argument("--eps")
    p.add_argument("--schedule", help="comma-separated n_k (default 1..K)")
    _common(p)

    p = sub.add_parser("list", help="list experiments")
    _common(p)
    return parser


_NOT_CONFIG = {"command", "config", "kind"}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("config file must hold a JSON object")
    experiment = ns.command if ns.command != "criterion" else f"criterion-{ns.kind}"
    if data.setdefault("experiment", experiment) != experiment:
        raise ParseError(f"config is for {data['experiment']!r}, command is {experiment!r}")
    for key, value in vars(ns).items():
        if key not in _NOT_CONFIG and value is not None:
            data[key] = value
    return ExperimentConfig.from_mapping(data)


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else 0
    try:
        cfg = config_from_args(ns)
    except (FreeDynError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        report = run(cfg)
    except FreeDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    fmt = cfg.format or ("csv" if (cfg.output or "").endswith(".csv") else "json")
    text = render(report, fmt)
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

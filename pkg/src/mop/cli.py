"""Command-line front end: figures, verification suites, sweeps.

All commands read a single JSON config (flags override fields) and emit
full-precision CSV and/or JSON.  Identical config and seed give
byte-identical output.  MOP_THREADS caps suite parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, MopError, NumericalError
from .recurrence import RecurrenceSpec, eval_poly
from .hessenberg import (
    MinorSelect,
    check_interlacing,
    minor_det,
    minor_det_exact,
    minor_det_recursive,
    minor_zeros,
    monomial_order,
    parity_ray,
)
from .patterns import pattern_expansion
from .symbol import Symbol
from .geometry import expected_interval_count, forced_membership, star_set
from .measures import mu_density, weak_convergence_report
from .asymptotics import (
    hierarchy_slope,
    is_product_ordered,
    nikishin_sign_test,
    ratio_limit,
    widom_vs_recurrence,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

FMT = "%.17e"


@dataclass
class RunConfig:
    p: int = 2
    mode: str = "periodic"
    coefficients: tuple = (1.0,)
    r: int | None = None
    k: int | None = None
    l: int | None = None
    n: tuple = ()
    n_list: tuple = ()
    grid: int = 4096
    points: tuple = ()
    seed: int = 0
    out: str = "."
    suite_cases: int = 20
    nikishin_n: int = 60
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        if path:
            with open(path) as fh:
                data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**{k: v for k, v in data.items() if k in known})
        cfg = cls(
            **{
                **{k: getattr(cfg, k) for k in known},
                "coefficients": tuple(cfg.coefficients),
                "n": tuple(cfg.n) if cfg.n else (),
                "n_list": tuple(cfg.n_list) if cfg.n_list else (),
                "points": tuple(tuple(pt) for pt in cfg.points),
            }
        )
        try:
            cfg.spec()
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    def spec(self) -> RecurrenceSpec:
        if self.mode == "periodic":
            return RecurrenceSpec.periodic(self.p, self.coefficients)
        if self.mode == "constant":
            return RecurrenceSpec.constant(self.p, self.coefficients[0])
        if self.mode == "explicit":
            return RecurrenceSpec.explicit(self.p, self.coefficients)
        if self.mode == "perturbed":
            return RecurrenceSpec.perturbed(self.p, self.coefficients)
        raise ConfigError(f"unknown mode {self.mode!r}")

    def complex_points(self, default):
        if not self.points:
            return list(default)
        return [complex(pt[0], pt[1]) for pt in self.points]


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    (FMT % v) if isinstance(v, float) else str(v) for v in row
                )
                + "\n"
            )


def _write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _max_workers() -> int:
    cap = os.environ.get("MOP_THREADS")
    if cap:
        return max(int(cap), 1)
    return min(os.cpu_count() or 1, 8)


def _run_cases(fn, cases):
    """Deterministic parallel case runner (ordered collection)."""
    workers = _max_workers()
    if workers == 1 or len(cases) <= 1:
        return [fn(c) for c in cases]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cases))


# ---------------------------------------------------------------------------
# figure


def cmd_figure(cfg: RunConfig) -> int:
    spec = cfg.spec()
    sym = Symbol.from_recurrence(spec)
    p = spec.p
    rows = []
    levels = [0] + ([cfg.k] if cfg.k else [1] if p >= 1 else [])
    for n in cfg.n:
        for k in levels:
            if k >= p + 1 or (k > 0 and n <= k):
                continue
            zeros = minor_zeros(spec, MinorSelect.consecutive(k, int(n)))
            m = monomial_order(k, int(n), p)
            series = f"Q{n}" if k == 0 else f"P{k}_{n}"
            for _ in range(m):
                rows.append((series, 0.0, 0.0))
            for y in zeros:
                s = abs(y) ** (1.0 / (p + 1))
                for ray in range(p + 1):
                    x = parity_ray(p, k, ray) * s
                    rows.append((series, float(x.real), float(x.imag)))
    if cfg.n:
        for k in range(p):
            st = star_set(sym, k, grid=cfg.grid)
            for i, (lo, hi) in enumerate(st.magnitudes()):
                ss = np.linspace(lo, hi, 33)
                for ray in range(p + 1):
                    for s in ss:
                        x = parity_ray(p, k, ray) * s
                        rows.append((f"gamma{k}", float(x.real), float(x.imag)))
    out = Path(cfg.out) / "figure.csv"
    _write_csv(out, ("series", "re", "im"), rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites


def _suite_interlace(cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    spec0 = cfg.spec()
    cases = []
    for t in range(cfg.suite_cases):
        if t == 0:
            spec = spec0
        else:
            p = int(rng.integers(2, 5))
            r = int(rng.integers(1, 7))
            spec = RecurrenceSpec.periodic(p, rng.uniform(0.3, 3.0, r))
        n = int(rng.integers(3 * (spec.p + 1), 61))
        k = int(rng.integers(0, spec.p))
        cases.append((t, spec, k, n))

    def run(case):
        t, spec, k, n = case
        p = spec.p
        za = minor_zeros(spec, MinorSelect.consecutive(k, n))
        zb = minor_zeros(spec, MinorSelect.consecutive(k, n + 1))
        zc = minor_zeros(spec, MinorSelect.consecutive(k, n + p + 1))
        fails = []
        rep = check_interlacing(za, zb, "consecutive", p=p, k=k, n=n)
        if not rep.ok:
            fails.append(f"consecutive {rep.detail}")
        rep = check_interlacing(za, zc, "gap", p=p, k=k, n=n)
        if not rep.ok:
            fails.append(f"gap {rep.detail}")
        if k >= 1:
            l = int(np.random.default_rng(cfg.seed + t).integers(k + 1, p + 1))
            zd = minor_zeros(spec, MinorSelect.row_column(k, l, n))
            rep = check_interlacing(za, zd, "kl", p=p, k=k, n=n)
            if not rep.ok:
                fails.append(f"kl(l={l}) {rep.detail}")
        m = monomial_order(k, n, p)
        if n % (p + 1) == 0 and m != k * (p - k):
            fails.append("monomial order at multiple of p+1")
        return (f"case{t}(p={p},k={k},n={n})", fails)

    results = _run_cases(run, cases)
    return _report("interlace", "weak interlacing of compressed minor zeros", results)


def _suite_widom(cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    spec0 = cfg.spec()
    cases = []
    for t in range(max(cfg.suite_cases // 4, 2)):
        if t == 0:
            spec = spec0
        else:
            p = int(rng.integers(1, 4))
            r = int(rng.integers(1, 6))
            spec = RecurrenceSpec.periodic(p, rng.uniform(0.3, 3.0, r))
        cases.append((t, spec))

    def run(case):
        t, spec = case
        sym = Symbol.from_recurrence(spec)
        rng_c = np.random.default_rng(cfg.seed + 1000 + t)
        fails = []
        for _ in range(10):
            x = complex(rng_c.normal(), rng_c.normal()) * 2.0
            n = int(rng_c.integers(0, 41))
            j = int(rng_c.integers(0, sym.r))
            err = widom_vs_recurrence(spec, n, j, x, sym)
            if err > 1e-8:
                fails.append(f"n={n} j={j} err={err:.2e}")
        return (f"case{t}", fails)

    results = _run_cases(run, cases)
    return _report("widom", "branch-sum determinant identity for periodic sections", results)


def _suite_gamma(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    sym = Symbol.from_recurrence(spec)
    results = []
    for k in range(spec.p):
        st = star_set(sym, k, grid=cfg.grid)
        fails = []
        if st.count != st.expected_count and st.min_gap > 1e-4:
            fails.append(
                f"count {st.count} vs {st.expected_count}, min gap {st.min_gap:.2e}"
            )
        zero_forced, inf_forced = forced_membership(spec.p, sym.r, k)
        if zero_forced and not st.contains0():
            fails.append("forced origin membership missing")
        if inf_forced and not st.unbounded:
            fails.append("forced unboundedness missing")
        results.append((f"k={k}", fails))
    return _report("gamma", "star structure and interval count of the tie sets", results)


def _suite_mass(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    sym = Symbol.from_recurrence(spec)
    tol = cfg.tolerances.get("mass", 1e-6)
    results = []
    for k in range(spec.p):
        st = star_set(sym, k, grid=cfg.grid)
        d = mu_density(sym, k, st)
        target = (spec.p - k) / spec.p
        err = abs(d.mass() - target)
        fails = [] if err <= tol else [f"mass err {err:.2e}"]
        if d.density.min() < -1e-9:
            fails.append(f"negative density {d.density.min():.2e}")
        results.append((f"k={k}", fails))
    return _report("mass", "total mass of the equilibrium measures", results)


def _suite_ratio(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    rng = np.random.default_rng(cfg.seed)
    n_list = list(cfg.n_list) if cfg.n_list else [50, 100, 200]
    pts = cfg.complex_points(
        [complex(rng.uniform(0.5, 2.0), rng.uniform(0.4, 2.0)) for _ in range(5)]
    )
    tol = cfg.tolerances.get("ratio", 1e-4)
    results = []
    for k in range(spec.p + 1):
        for x in pts:
            rep = ratio_limit(spec, k, x, n_list)
            fails = []
            if not rep["decreasing"]:
                fails.append("error not decreasing")
            if rep["final"] > tol:
                fails.append(f"final err {rep['final']:.2e}")
            results.append((f"k={k},x={x:.3f}", fails))
    return _report("ratio", "consecutive-period minor ratios against branch products", results)


def _suite_nikishin(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    results = []
    if not is_product_ordered(spec):
        return _report(
            "nikishin",
            "one-signed residues of the compressed minor ratios",
            [("precondition", ["spec is not product-ordered with r multiple of p"])],
        )
    sym = Symbol.from_recurrence(spec)
    for k in range(spec.p):
        for l in range(k + 1, spec.p + 1):
            rep = nikishin_sign_test(spec, k, l, cfg.nikishin_n)
            fails = [] if rep.uniform_sign else ["residues not one-signed"]
            slope = hierarchy_slope(sym, k, l)
            if abs(slope - (k - l)) > 0.05:
                fails.append(f"hierarchy slope {slope:.3f} vs {k - l}")
            results.append((f"k={k},l={l}", fails))
    return _report("nikishin", "one-signed residues of the compressed minor ratios", results)


def _suite_patterns(cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    results = []
    for t in range(max(cfg.suite_cases // 2, 5)):
        p = int(rng.integers(1, 5))
        k = int(rng.integers(0, min(p, 3) + 1))
        n = int(rng.integers(k + 1, 11))
        lo = max(n - p, 0)
        pool = list(range(lo, n))
        if len(pool) < k:
            continue
        head = sorted(rng.choice(pool, size=k, replace=False).tolist()) if k else []
        indices = tuple(head) + (n,)
        spec = RecurrenceSpec.periodic(p, [float(v) for v in rng.integers(1, 7, int(rng.integers(1, 4)))])
        x = complex(rng.normal(), rng.normal())
        sel = MinorSelect(k=k, indices=indices)
        fails = []
        try:
            v1 = pattern_expansion(spec, k, indices, x)
            v2 = minor_det(spec, sel, x).to_complex()
            v3 = minor_det_recursive(spec, sel, x).to_complex()
            scale = max(abs(v1), abs(v2), 1e-12)
            if abs(v1 - v2) > 1e-9 * scale or abs(v2 - v3) > 1e-9 * scale:
                fails.append(f"route mismatch {v1:.6e} {v2:.6e} {v3:.6e}")
        except MopError as exc:
            fails.append(f"{type(exc).__name__}: {exc}")
        results.append((f"case{t}(p={p},k={k},n={n})", fails))
    return _report("patterns", "signed pattern-sum expansion of the minors", results)


SUITES = {
    "interlace": _suite_interlace,
    "widom": _suite_widom,
    "gamma": _suite_gamma,
    "mass": _suite_mass,
    "ratio": _suite_ratio,
    "nikishin": _suite_nikishin,
    "patterns": _suite_patterns,
}


def _report(suite: str, theorem: str, results) -> dict:
    failures = [
        {"id": cid, "detail": "; ".join(fails)} for cid, fails in results if fails
    ]
    return {
        "suite": suite,
        "theorem": theorem,
        "cases": len(results),
        "passes": len(results) - len(failures),
        "failures": failures,
    }


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    if suite == "all":
        reports = [SUITES[name](cfg) for name in sorted(SUITES)]
    elif suite in SUITES:
        reports = [SUITES[suite](cfg)]
    else:
        print(f"unknown suite {suite!r}; choose from {sorted(SUITES) + ['all']}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out) / f"verify_{suite}.json"
    payload = reports[0] if len(reports) == 1 else {"suite": "all", "reports": reports}
    _write_json(out, payload)
    ok = all(not rep["failures"] for rep in reports)
    for rep in reports:
        print(f"{rep['suite']}: {rep['passes']}/{rep['cases']} pass")
        for f in rep["failures"]:
            print(f"  FAIL {f['id']}: {f['detail']}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# sweeps


def cmd_gamma(cfg: RunConfig) -> int:
    spec = cfg.spec()
    sym = Symbol.from_recurrence(spec)
    rows = []
    summary = []
    for k in range(spec.p):
        st = star_set(sym, k, grid=cfg.grid)
        for i, (lo, hi) in enumerate(st.intervals):
            rows.append((k, i, float(lo), float(hi), int(st.unbounded and i == len(st.intervals) - 1)))
        summary.append(
            {
                "k": k,
                "count": st.count,
                "expected": st.expected_count,
                "unbounded": st.unbounded,
                "intervals": [[float(a), float(b)] for a, b in st.intervals],
            }
        )
    _write_csv(Path(cfg.out) / "gamma.csv", ("k", "interval", "t_lo", "t_hi", "unbounded"), rows)
    _write_json(Path(cfg.out) / "gamma.json", summary)
    print(f"wrote gamma.csv / gamma.json for {spec.p} levels")
    return EXIT_OK


def cmd_measure(cfg: RunConfig) -> int:
    spec = cfg.spec()
    sym = Symbol.from_recurrence(spec)
    rows = []
    masses = []
    for k in range(spec.p):
        st = star_set(sym, k, grid=cfg.grid)
        d = mu_density(sym, k, st)
        t = d.signed_t()
        for i in range(d.s.size):
            rows.append((k, float(d.s[i]), float(t[i]), float(d.density[i]), float(d.weights[i])))
        masses.append({"k": k, "mass": d.mass(), "target": (spec.p - k) / spec.p})
    _write_csv(Path(cfg.out) / "measure.csv", ("k", "s", "t", "density", "weight"), rows)
    _write_json(Path(cfg.out) / "measure.json", masses)
    print("wrote measure.csv / measure.json:", ", ".join(f"k={m['k']}: {m['mass']:.8f}" for m in masses))
    return EXIT_OK


def cmd_ratio(cfg: RunConfig) -> int:
    spec = cfg.spec()
    n_list = list(cfg.n_list) if cfg.n_list else [50, 100, 200]
    pts = cfg.complex_points([1.0 + 0.8j])
    ks = [cfg.k] if cfg.k is not None else list(range(spec.p + 1))
    rows = []
    for k in ks:
        for x in pts:
            rep = ratio_limit(spec, k, x, n_list)
            for row in rep["rows"]:
                rows.append(
                    (k, float(x.real), float(x.imag), row["n"],
                     float(row["ratio"].real), float(row["ratio"].imag), float(row["err"]))
                )
    _write_csv(
        Path(cfg.out) / "ratio.csv",
        ("k", "x_re", "x_im", "n", "ratio_re", "ratio_im", "err"),
        rows,
    )
    print(f"wrote ratio.csv ({len(rows)} rows)")
    return EXIT_OK


def cmd_nikishin(cfg: RunConfig) -> int:
    spec = cfg.spec()
    if not is_product_ordered(spec):
        print("config error: nikishin requires an ordered periodic spec with r a multiple of p", file=sys.stderr)
        return EXIT_CONFIG
    out = []
    for k in range(spec.p):
        for l in range(k + 1, spec.p + 1):
            rep = nikishin_sign_test(spec, k, l, cfg.nikishin_n)
            out.append(
                {
                    "k": k,
                    "l": l,
                    "n": rep.n,
                    "uniform_sign": rep.uniform_sign,
                    "sign": rep.sign,
                    "alpha_inf": rep.alpha_inf,
                    "alpha_inf_coupled": rep.alpha_inf_coupled,
                    "poles": rep.poles.tolist(),
                    "residues": rep.residues.tolist(),
                }
            )
    _write_json(Path(cfg.out) / "nikishin.json", out)
    bad = [o for o in out if not o["uniform_sign"]]
    print(f"wrote nikishin.json; {len(out) - len(bad)}/{len(out)} level pairs one-signed")
    return EXIT_OK if not bad else EXIT_FAIL


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("figure", "verify", "gamma", "measure", "ratio", "nikishin"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        if name == "verify":
            sp.add_argument("--suite", default="all")
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, {"seed": args.seed, "out": args.out})
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "figure":
            return cmd_figure(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        if args.command == "gamma":
            return cmd_gamma(cfg)
        if args.command == "measure":
            return cmd_measure(cfg)
        if args.command == "ratio":
            return cmd_ratio(cfg)
        if args.command == "nikishin":
            return cmd_nikishin(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

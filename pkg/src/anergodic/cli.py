"""Command-line interface: cf, ostrowski, orbit, sum, bounds, estimate, compare, sweep.

Exit codes: 0 when every verdict is PASS or EXPLORATORY, 1 when one is
INDETERMINATE, 2 when one is FAIL, 3 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import __version__
from . import bounds as bd
from . import comparisons as cp
from .cf_engine import Rotation, TableTooShallow, verify_determinant, verify_recurrences
from .estimates import METHODS, estimate
from .numerics import (
    IndeterminateError,
    PrecisionPolicy,
    RigorousReal,
    SpecError,
    Verdict,
    combine,
    format_bounds,
    random_periodic_spec,
)
from .observables import birkhoff_sum_direct, make_theta, parse_observable
from .orbit import epsilon_bounds, make_context, verify_distribution
from .ostrowski import represent, triple_of, validate

EXIT = {Verdict.PASS: 0, Verdict.EXPLORATORY: 0, Verdict.INDETERMINATE: 1, Verdict.FAIL: 2}
USAGE = 3
EPSILON_CHECKS = ("eps_L < eps", "eps < eps_U", "|eps| < 1/q'_r")
CHECKS = ("sandwich", "methods", "lower", "epsilon", "parity", "priorart")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ output

@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    digits: int = 20

    def add(self, verdict: Optional[Verdict] = None, **values) -> None:
        row = {}
        for k, v in values.items():
            if isinstance(v, RigorousReal):
                row[k + ".lo"], row[k + ".hi"] = format_bounds(v, self.digits)
            elif isinstance(v, Verdict):
                row[k] = v.value
            elif isinstance(v, float):
                row[k] = repr(v)
            elif isinstance(v, Fraction):
                row[k] = str(v)
            else:
                row[k] = v
        if verdict is not None:
            row["verdict"] = verdict.value
            self.verdicts.append(verdict)
        self.rows.append(row)

    @property
    def verdict(self) -> Verdict:
        return combine(self.verdicts) if self.verdicts else Verdict.PASS


def emit(table: Table, fmt: str, meta: dict) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": table.rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=table.columns, extrasaction="raise", restval="", lineterminator="\n")
    w.writeheader()
    for row in table.rows:
        w.writerow(row)
    return buf.getvalue()


def load(text: str, fmt: str) -> dict:
    """Parse output written by ``emit``; CSV gives {"meta": {}, "rows": [...]}."""
    if fmt == "json":
        return json.loads(text)
    return {"meta": {}, "rows": list(csv.DictReader(io.StringIO(text)))}


def _cols(*names: str, rr: Iterable[str] = ()) -> list[str]:
    """Column names with every enclosure name expanded to .lo/.hi."""
    out = []
    rr = set(rr)
    for n in names:
        out += [n + ".lo", n + ".hi"] if n in rr else [n]
    return out


# ------------------------------------------------------------------ parsing

def _policy(args) -> PrecisionPolicy:
    try:
        return PrecisionPolicy(initial_bits=args.bits, max_bits=max(args.max_bits, args.bits))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _rotation(spec: str, policy: PrecisionPolicy) -> Rotation:
    try:
        return Rotation.from_spec(spec, policy)
    except SpecError as exc:
        raise UsageError(str(exc)) from exc


def _fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{name}: not a rational: {text!r}") from exc


def _need(args, *names: str) -> None:
    for n in names:
        if getattr(args, n.replace("-", "_")) is None:
            raise UsageError(f"--{n} is required for {args.command}")


def _observable(name: str):
    try:
        return parse_observable(name)
    except SpecError as exc:
        raise UsageError(str(exc)) from exc


# ----------------------------------------------------------------- commands

def cmd_cf(args, policy) -> Table:
    _need(args, "alpha")
    rot = _rotation(args.alpha, policy)
    depth = args.depth or 10
    t = rot.table(depth + 2)
    tab = Table(_cols("r", "a_r", "p_r", "q_r", "q'_r", rr=["q'_r"]))
    for r in range(1, depth + 1):
        tab.add(r=r, a_r=t.a(r), p_r=t.p(r), q_r=t.q(r), **{"q'_r": t.qs(r)})
    tab.verdicts += [verify_determinant(t)[0], verify_recurrences(t)[0]]
    return tab


def cmd_ostrowski(args, policy) -> Table:
    _need(args, "alpha", "n")
    rot = _rotation(args.alpha, policy)
    rep = represent(rot.table_for(args.n), args.n)
    v, note = validate(rep)
    tab = Table(["r", "q_r", "b_r", "verdict", "note"])
    for r in range(rep.n, -1, -1):
        tab.add(v, r=r, q_r=rep.table.q(r), b_r=rep.digit(r), note=note)
    return tab


def cmd_orbit(args, policy) -> Table:
    _need(args, "alpha", "n")
    rot = _rotation(args.alpha, policy)
    N = args.n
    table = rot.table_for(N)
    if N > 2000:
        rep = verify_distribution(rot, [N])
        tab = Table(["check", "PASS", "FAIL", "INDETERMINATE", "verdict"])
        for key, c in rep.counts.items():
            v = combine(k for k, cnt in c.items() if cnt)
            tab.add(v, check=key, PASS=c[Verdict.PASS], FAIL=c[Verdict.FAIL],
                    INDETERMINATE=c[Verdict.INDETERMINATE])
        return tab
    ctx = make_context(table, N, rot.policy)
    tab = Table(_cols("M", "r", "s", "t", "eps", "eps_L", "eps_U", "verdict", rr=["eps", "eps_L", "eps_U"]))
    for M in range(1, N + 1):
        tr = triple_of(ctx.rep, M)
        e = epsilon_bounds(ctx, tr)
        tab.add(e.verdict, M=M, r=tr.r, s=tr.s, t=tr.t, eps=e.eps, eps_L=e.eps_L, eps_U=e.eps_U)
    return tab


def cmd_sum(args, policy) -> Table:
    _need(args, "alpha", "n")
    rot = _rotation(args.alpha, policy)
    phi = _observable(args.phi or f"theta:{args.beta or 1}")
    tab = Table(_cols("N", "phi", "S_N", rr=["S_N"]))
    tab.add(N=args.n, phi=phi.label, S_N=birkhoff_sum_direct(rot, phi, args.n, policy=rot.policy))
    return tab


def cmd_bounds(args, policy) -> Table:
    _need(args, "alpha", "n")
    rot = _rotation(args.alpha, policy)
    phi = _observable(args.phi or f"theta:{args.beta or 1}")
    if phi.monotonicity != "decreasing":
        raise UsageError(f"bounds needs a decreasing observable, got {phi.label}")
    ctx = bd.bounds_context(rot, args.n)
    tab = Table(_cols("r", "B_lower", "segment", "B_upper", "verdict", "note", rr=["B_lower", "segment", "B_upper"]))
    for row in bd.verify_sandwich(ctx, phi):
        tab.add(row.verdict, r="all" if row.r < 0 else row.r, B_lower=row.B_lower, segment=row.segment,
                B_upper=row.B_upper, note=row.note)
    return tab


def cmd_estimate(args, policy) -> Table:
    _need(args, "alpha", "n")
    rot = _rotation(args.alpha, policy)
    beta = _fraction(args.beta or "1", "--beta")
    if beta < 1:
        raise UsageError("--beta must be >= 1")
    rep = estimate(rot, args.n, beta)
    methods = METHODS if args.method in (None, "all") else (args.method,)
    tab = Table(_cols("quantity", "kind", "value", "direct", "verdict", rr=["value", "direct"]))
    for m in methods:
        tab.add(rep.verdicts[f"total_{m}"], quantity=f"method_{m}", kind="upper",
                value=rep.totals[m], direct=rep.direct)
    tab.add(rep.verdicts["lower_single"], quantity="lower_single", kind="lower",
            value=rep.lower_single, direct=rep.head_single)
    tab.add(rep.verdicts["lower_symmetric"], quantity="lower_symmetric", kind="lower",
            value=rep.lower_symmetric, direct=rep.head_symmetric)
    return tab


def _report_rows(tab: Table, rep: cp.ComparisonReport, N) -> None:
    named = [("ours", rep.ours), ("theirs", rep.theirs), ("direct", rep.direct)] + list(rep.extra.items())
    for name, val in named:
        if val is None:
            continue
        kind = "value" if name == "direct" else rep.kinds.get(name, "value")
        tab.add(target=rep.target, N=N, quantity=name, kind=kind, value=val)
    for name, v in rep.verdicts.items():
        tab.add(v, target=rep.target, N=N, quantity=name, kind="check")
    for name, r in rep.ratios.items():
        tab.add(target=rep.target, N=N, quantity=name, kind="ratio", ratio=r)


COMPARE_COLS = _cols("target", "N", "quantity", "kind", "value", "ratio", "verdict", rr=["value"])


def cmd_compare(args, policy) -> Table:
    _need(args, "alpha", "target")
    rot = _rotation(args.alpha, policy)
    t = args.target
    tab = Table(COMPARE_COLS)
    if t == "lang":
        _need(args, "n")
        _report_rows(tab, cp.lang_compare(rot, args.n), args.n)
    elif t == "beresnevich":
        _need(args, "n")
        _report_rows(tab, cp.sum_nearest_bounds(rot, args.n, with_estimates=True), args.n)
        _report_rows(tab, cp.beresnevich_lower(rot, args.n), args.n)
    elif t == "antisym":
        phi = _observable(args.phi or "cot")
        k = int(math.log2(args.n_max or 1 << 14))
        scan = cp.antisym_scan(rot, phi, k)
        for N, s, lo, hi in scan.rows:
            tab.add(Verdict.EXPLORATORY, target="antisym", N=N, quantity=f"S_N {phi.label}", kind="scan",
                    value=s, ratio=hi)
    elif t == "weighted":
        _need(args, "gamma")
        phi = _observable(args.phi or "cot")
        w = cp.weighted_series(rot, phi, _fraction(args.gamma, "--gamma"), args.n or 1 << 14,
                               _fraction(args.beta or "1", "--beta"))
        for N, s, lo, hi in w.rows:
            tab.add(Verdict.EXPLORATORY, target="weighted", N=N, quantity=f"W_N {w.growth}", kind="scan",
                    value=s, ratio=hi)
    elif t == "sinai":
        n_max = args.n_max or 20
        scan = cp.exp2_scan(rot, n_max)
        for q, re, lo, hi in scan.rows:
            tab.add(Verdict.EXPLORATORY, target="exp2", N=q, quantity="|Exp2(q_n)|/q_n", kind="scan", ratio=hi)
        phi = _observable(args.phi or "cot")
        table = rot.table(n_max + 2)
        for n in range(1, n_max + 1):
            q = table.q(n)
            if q * q >= 1 << 31:
                break
            pb = cp.partial_birkhoff_lipschitz(rot, q, q, phi)
            tab.add(target="partial_birkhoff", N=q, quantity=f"bound M=q_{n}", kind="upper", value=pb.bound)
            tab.add(pb.verdict, target="partial_birkhoff", N=q, quantity=f"|S_N(e_M phi)|<=bound M=q_{n}",
                    kind="check", ratio=pb.direct[1] / float(pb.bound))
    elif t == "conjecture":
        c = cp.conjecture_scan(rot, N=args.n)
        for M, r in c.rows:
            tab.add(Verdict.EXPLORATORY, target="conjecture", N=c.N, quantity=f"M={M}", kind="scan", ratio=r)
        tab.add(Verdict.EXPLORATORY, target="conjecture", N=c.N, quantity="max/min", kind="ratio", ratio=c.spread)
    else:
        raise UsageError(f"unknown target {t!r}")
    return tab


# -------------------------------------------------------------------- sweep

@dataclass
class SweepConfig:
    alphas: list[str]
    Ns: str
    betas: list[Fraction] = field(default_factory=lambda: [Fraction(1)])
    phis: list[str] = field(default_factory=lambda: ["theta"])
    checks: list[str] = field(default_factory=lambda: ["sandwich"])
    output: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if not self.alphas or not self.Ns or not self.betas or not self.phis or not self.checks:
            raise UsageError("sweep grids must be nonempty")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise UsageError(f"unknown checks {bad}; choose from {CHECKS}")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")


def read_config(text: str) -> SweepConfig:
    kv = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {line!r}")
        k, v = (x.strip() for x in line.split("=", 1))
        kv[k] = v
    unknown = set(kv) - {"alphas", "Ns", "betas", "phis", "checks", "output", "format"}
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    split = lambda s: [x.strip() for x in s.split(";") if x.strip()]  # noqa: E731
    if "alphas" not in kv or "Ns" not in kv:
        raise UsageError("config needs alphas and Ns")
    return SweepConfig(
        alphas=split(kv["alphas"]),
        Ns=kv["Ns"],
        betas=[_fraction(b, "betas") for b in split(kv.get("betas", "1"))],
        phis=split(kv.get("phis", "theta")),
        checks=split(kv.get("checks", "sandwich")),
        output=kv.get("output"),
        format=kv.get("format", "csv"),
    )


def expand_alphas(items: list[str], seed: int) -> list[str]:
    """'random:k' expands to k random periodic cf specs drawn from the seed."""
    rng = random.Random(seed)
    out = []
    for a in items:
        if a.startswith("random:"):
            out += [random_periodic_spec(rng).text for _ in range(int(a.split(":", 1)[1]))]
        else:
            out.append(a)
    return out


def parse_Ns(text: str, rot: Rotation) -> list[int]:
    """Comma list of N, a..b, a..b:stride, quasiperiods:n (q_r, q_r +- 1, b q_r for r <= n)."""
    out = set()
    for item in (x.strip() for x in text.split(",")):
        try:
            if item.startswith("quasiperiods:"):
                n = int(item.split(":", 1)[1])
                out.update(bd.standard_grid(rot.table(n + 4), small=0, n_max=n))
            elif ".." in item:
                rng, _, stride = item.partition(":")
                a, b = (int(x) for x in rng.split(".."))
                out.update(range(a, b + 1, int(stride or 1)))
            else:
                out.add(int(item))
        except ValueError as exc:
            raise UsageError(f"bad Ns item {item!r}") from exc
    Ns = sorted(x for x in out if x >= 1)
    if not Ns:
        raise UsageError("Ns is empty")
    return Ns


def _sweep_observables(cfg: SweepConfig) -> list:
    out = []
    for name in cfg.phis:
        if name == "theta":
            out += [make_theta(b) for b in cfg.betas]
        else:
            out.append(_observable(name))
    return out


SWEEP_COLS = _cols("alpha", "N", "check", "param", "value", "verdict", rr=["value"])


def run_sweep(cfg: SweepConfig, policy: PrecisionPolicy, seed: int) -> Table:
    tab = Table(SWEEP_COLS)
    phis = _sweep_observables(cfg)
    for spec in expand_alphas(cfg.alphas, seed):
        rot = _rotation(spec, policy)
        Ns = parse_Ns(cfg.Ns, rot)
        label = rot.label
        if "epsilon" in cfg.checks or "parity" in cfg.checks:
            rep = verify_distribution(rot, Ns)
            for key, c in rep.counts.items():
                kind = "epsilon" if key in EPSILON_CHECKS else "parity"
                if kind in cfg.checks:
                    v = combine(k for k, cnt in c.items() if cnt)
                    tab.add(v, alpha=label, N=f"{Ns[0]}..{Ns[-1]}", check=kind,
                            param=f"{key} [{c[Verdict.PASS]}/{c[Verdict.FAIL]}/{c[Verdict.INDETERMINATE]}]")
        cache: dict = {}
        for N in Ns:
            ctx = bd.bounds_context(rot, N, cache)
            if "sandwich" in cfg.checks:
                for phi in phis:
                    if phi.monotonicity != "decreasing":
                        continue
                    agg = bd.verify_sandwich(ctx, phi)[-1]
                    tab.add(agg.verdict, alpha=label, N=N, check="sandwich", param=phi.label, value=agg.segment)
            if "methods" in cfg.checks or "lower" in cfg.checks:
                for beta in cfg.betas:
                    rep = estimate(rot, N, beta, cache)
                    if "methods" in cfg.checks:
                        for m in METHODS:
                            tab.add(rep.verdicts[f"total_{m}"], alpha=label, N=N, check="methods",
                                    param=f"beta={beta} {m}", value=rep.totals[m])
                    if "lower" in cfg.checks:
                        for k, val in (("lower_single", rep.lower_single), ("lower_symmetric", rep.lower_symmetric)):
                            tab.add(rep.verdicts[k], alpha=label, N=N, check="lower",
                                    param=f"beta={beta} {k}", value=val)
            if "priorart" in cfg.checks and N >= 2:
                lang = cp.lang_compare(rot, N, cache)
                tab.add(lang.verdict, alpha=label, N=N, check="priorart", param="lang ours", value=lang.ours)
                near = cp.sum_nearest_bounds(rot, N, cache)
                for k, v in near.verdicts.items():
                    tab.add(v, alpha=label, N=N, check="priorart", param=f"nearest {k}")
    return tab


def cmd_sweep(args, policy) -> Table:
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = read_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    else:
        _need(args, "alpha")
        cfg = SweepConfig(alphas=args.alpha.split(";"), Ns=f"1..{args.n or args.n_max or 100}",
                          betas=[_fraction(args.beta or "1", "--beta")], phis=[args.phi or "theta"])
    if args.format is None:
        args.format = cfg.format
    if args.out is None:
        args.out = cfg.output
    args.alpha_meta = ";".join(cfg.alphas)
    return run_sweep(cfg, policy, args.seed)


COMMANDS = {
    "cf": cmd_cf,
    "ostrowski": cmd_ostrowski,
    "orbit": cmd_orbit,
    "sum": cmd_sum,
    "bounds": cmd_bounds,
    "estimate": cmd_estimate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anergodic", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--alpha")
    p.add_argument("--depth", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--beta")
    p.add_argument("--phi")
    p.add_argument("--method", choices=["A", "B", "C", "all"])
    p.add_argument("--target", choices=["lang", "beresnevich", "sinai", "antisym", "weighted", "conjecture"])
    p.add_argument("--gamma")
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--max-bits", type=int, default=8192)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for name in ("n", "n_max", "depth"):
            v = getattr(args, name)
            if v is not None and v < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
        policy = _policy(args)
        tab = COMMANDS[args.command](args, policy)
        fmt = args.format or "csv"
        meta = {
            "version": __version__,
            "command": args.command,
            "alpha": getattr(args, "alpha_meta", None) or args.alpha,
            "policy": {"initial_bits": policy.initial_bits, "max_bits": policy.max_bits},
        }
        text = emit(tab, fmt, meta)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (TableTooShallow, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except IndeterminateError as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT[Verdict.INDETERMINATE]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT[tab.verdict]

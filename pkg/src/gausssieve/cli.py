"""Command-line front end: ``gausssieve {verify,scan,extremal,counts,approx,selftest}``."""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path


from .config import BudgetExceeded, Limits
from .expsum import MODES, SEQ_KINDS
from .moduli_sets import KINDS
from .verify import BOUND_NAMES, csv_text

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BUDGET, EXIT_SELFTEST = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    set_kind: str = "all"
    Q: list = field(default_factory=list)
    N: list = field(default_factory=list)
    N_rule: tuple | None = None  # (pow, div): N = floor(Q^pow / div)
    seq_kind: str = "random_phase"
    seeds: list = field(default_factory=lambda: [0])
    epsilon: float = 0.05
    delta: float = 0.5
    bounds: tuple = ("huxley",)
    output: str = "-"
    threads: int = 1
    limits: Limits = field(default_factory=Limits)
    mode: str = "auto"
    include_zero: bool = True
    timings: bool = False
    extra: dict = field(default_factory=dict)

    def n_values(self, Q: int) -> list:
        if self.N_rule is not None:
            p, d = self.N_rule
            return [max(1, int(math.floor(Q**p / d + 1e-9)))]
        return list(self.N)


def parse_sweep(text: str, typ=int) -> list:
    """``v``, ``a,b,c``, ``lo:hi:*k`` (geometric) or ``lo:hi:+k`` (arithmetic)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3 or parts[2][:1] not in "*+" or not parts[2][1:]:
                raise ValueError
            lo, hi, step = typ(parts[0]), typ(parts[1]), typ(parts[2][1:])
            out, v = [], lo
            if parts[2][0] == "*":
                if step <= 1 or lo <= 0:
                    raise ValueError
                while v <= hi:
                    out.append(v)
                    v = v * step
            else:
                if step <= 0:
                    raise ValueError
                while v <= hi:
                    out.append(v)
                    v = v + step
            if not out:
                raise ValueError
            return out
        return [typ(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}") from None


def parse_n_rule(text: str) -> tuple:
    try:
        kv = dict(part.split(":", 1) for part in text.split(","))
        p, d = float(kv.pop("pow")), float(kv.pop("div", "1"))
        if kv or d <= 0:
            raise ValueError
        return p, d
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"bad N-rule {text!r}; expected pow:P,div:D") from None


def parse_bounds(text: str) -> tuple:
    names = tuple(b.strip() for b in text.split(",") if b.strip())
    bad = [b for b in names if b not in BOUND_NAMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown bound(s) {bad}; choose from {BOUND_NAMES}")
    return names


def parse_complex(text: str) -> complex:
    try:
        if "," in text:
            re_, im_ = text.split(",")
            return complex(float(re_), float(im_))
        return complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}") from None


def _add_limits(p: argparse.ArgumentParser):
    g = p.add_argument_group("budget caps")
    for f in fields(Limits):
        g.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default,
                       help=f"(default: {f.default})")


def _add_experiment(p: argparse.ArgumentParser, sweep: bool):
    p.add_argument("--set", dest="set_kind", choices=[k for k in KINDS if k != "custom"],
                   default="all", help="moduli set (default: all)")
    qhelp = "Q, or a sweep lo:hi:*k / lo:hi:+k / a,b,c" if sweep else "set parameter Q"
    p.add_argument("--Q", required=True, type=(lambda s: parse_sweep(s)) if sweep else int, help=qhelp)
    n = p.add_mutually_exclusive_group(required=True)
    n.add_argument("--N", type=(lambda s: parse_sweep(s)) if sweep else int,
                   help="norm bound of the sequence support" + (" (sweep allowed)" if sweep else ""))
    n.add_argument("--N-rule", type=parse_n_rule, help="N = floor(Q^pow / div), e.g. pow:1.5,div:16")
    p.add_argument("--seq", dest="seq_kind", choices=[k for k in SEQ_KINDS if k != "custom"],
                   default="random_phase", help="coefficient sequence (default: random_phase)")
    p.add_argument("--seed", type=(lambda s: parse_sweep(s)) if sweep else int, default=None,
                   help="RNG seed" + (" or sweep" if sweep else "") + " (default: 0)")
    p.add_argument("--bounds", type=parse_bounds, default=("huxley",),
                   help=f"comma list from {','.join(BOUND_NAMES)} (default: huxley)")
    p.add_argument("--epsilon", type=float, default=0.05, help="exponent of (QN)^eps (default: 0.05)")
    p.add_argument("--delta", type=float, default=0.5, help="delta of the prime bound (default: 0.5)")
    p.add_argument("--mode", choices=MODES, default="auto", help="evaluator (default: auto)")
    p.add_argument("--exclude-zero", action="store_true", help="drop n = 0 from the support")
    p.add_argument("--timings", action="store_true", help="fill the seconds column")
    p.add_argument("--out", default="-", help="CSV path, - for stdout (default: -)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gausssieve", description="Large sieve experiments over Z[i].",
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", help="run one experiment and print its CSV rows")
    _add_experiment(p, sweep=False)
    _add_limits(p)

    p = sub.add_parser("scan", help="sweep Q, N and seeds; one CSV")
    _add_experiment(p, sweep=True)
    _add_limits(p)

    p = sub.add_parser("extremal", help="largest lhs/Z over all sequences (power iteration)")
    p.add_argument("--set", dest="set_kind", choices=[k for k in KINDS if k != "custom"], default="all")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--bounds", type=parse_bounds, default=("huxley",))
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--exclude-zero", action="store_true")
    p.add_argument("--out", default="-")
    _add_limits(p)

    p = sub.add_parser("counts", help="K(Delta) of the Farey points and the approximant check")
    p.add_argument("--set", dest="set_kind", choices=[k for k in KINDS if k != "custom"], default="all")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--Delta", type=float, required=True, help="0 < Delta <= 1/2")
    _add_limits(p)

    p = sub.add_parser("approx", help="Dirichlet approximant b/r of alpha")
    p.add_argument("--alpha", type=parse_complex, required=True, help="x,y or a Python complex")
    p.add_argument("--tau", type=float, required=True)
    _add_limits(p)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--out", default=None, help="directory for the CSV artifacts")
    p.add_argument("--only", type=lambda s: parse_sweep(s), default=None,
                   help="criteria to run, e.g. 3,4 or 1:14:+1")
    return ap


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(ns.subcommand)
    if hasattr(ns, "max_residue_norm"):
        cfg.limits = Limits(**{f.name: getattr(ns, f.name) for f in fields(Limits)})
    if ns.subcommand in ("verify", "scan", "extremal"):
        cfg.set_kind = ns.set_kind
        as_list = (lambda v: v if isinstance(v, list) else [v])
        cfg.Q = as_list(ns.Q)
        cfg.bounds = ns.bounds
        cfg.epsilon, cfg.delta = ns.epsilon, ns.delta
        cfg.include_zero = not ns.exclude_zero
        cfg.output = ns.out
        if not 0 <= cfg.epsilon <= 0.25:
            raise UsageError("--epsilon must lie in [0, 0.25]")
        if not 0 < cfg.delta < 1:
            raise UsageError("--delta must lie in (0, 1)")
        if any(q < 1 for q in cfg.Q):
            raise UsageError("--Q must be >= 1")
        if ns.subcommand == "extremal":
            cfg.N = [ns.N]
        else:
            cfg.N = as_list(ns.N) if ns.N is not None else []
            cfg.N_rule = ns.N_rule
            cfg.seq_kind = ns.seq_kind
            cfg.seeds = as_list(ns.seed) if ns.seed is not None else [0]
            cfg.mode = ns.mode
            cfg.timings = ns.timings
            cfg.threads = ns.threads
            if cfg.threads < 1:
                raise UsageError("--threads must be >= 1")
        if any(n < 1 for n in cfg.N):
            raise UsageError("--N must be >= 1")
    elif ns.subcommand == "counts":
        if not 0 < ns.Delta <= 0.5:
            raise UsageError("--Delta must lie in (0, 1/2]")
        cfg.set_kind, cfg.Q, cfg.extra = ns.set_kind, [ns.Q], {"Delta": ns.Delta}
    elif ns.subcommand == "approx":
        if ns.tau < 1:
            raise UsageError("--tau must be >= 1")
        cfg.extra = {"alpha": ns.alpha, "tau": ns.tau}
    else:
        cfg.output = ns.out
        cfg.extra = {"only": ns.only}
    return cfg


def emit_csv(reports, path, timings: bool = False) -> None:
    text = csv_text(reports, timings=timings)
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _experiments(cfg: RunConfig):
    from .verify import run_experiment

    jobs = [(Q, N, s) for Q in cfg.Q for N in cfg.n_values(Q) for s in cfg.seeds]

    def one(job):
        Q, N, s = job
        return run_experiment(cfg.set_kind, Q, N, cfg.seq_kind, s, cfg.bounds, epsilon=cfg.epsilon,
                              delta=cfg.delta, include_zero=cfg.include_zero, mode=cfg.mode,
                              limits=cfg.limits)

    if cfg.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            return list(pool.map(one, jobs))
    return [one(j) for j in jobs]


def _extremal(cfg: RunConfig):
    from .expsum import extremal_lhs
    from .farey import farey_count
    from .moduli_sets import build_set
    from .verify import SieveReport, make_bound, rhs_bound

    Q, N = cfg.Q[0], cfg.N[0]
    S = build_set(cfg.set_kind, Q, cfg.limits)
    lam, _ = extremal_lhs(S, N, include_zero=cfg.include_zero, limits=cfg.limits)
    rep = SieveReport(cfg.set_kind, Q, N, "extremal", 0, lam, 1.0, farey_count(S))
    for b in cfg.bounds:
        rhs = rhs_bound(make_bound(b, S, N, cfg.epsilon, cfg.delta))
        rep.rhs[b], rep.ratio[b] = rhs, lam / rhs
    return [rep]


def _counts(cfg: RunConfig):
    from .farey import lemma1_check
    from .moduli_sets import build_set

    S = build_set(cfg.set_kind, cfg.Q[0], cfg.limits)
    rep = lemma1_check(cfg.extra["Delta"], S)
    ap = rep.approximant
    lines = [
        f"K={rep.K}",
        f"center={rep.center.real!r},{rep.center.imag!r}",
        f"approximant_b={ap.b}",
        f"approximant_r={ap.r}",
        f"approximant_z_abs={abs(ap.z)!r}",
        f"P_center={rep.P_center}",
    ]
    lines += [f"P_shift={w.real!r},{w.imag!r},{p}" for w, p in rep.shifted]
    lines += [f"bound={rep.bound}", f"holds={rep.holds}", f"shift_cover_holds={rep.shift_cover_holds}"]
    print("\n".join(lines))
    return 0


def _approx(cfg: RunConfig):
    from .farey import dirichlet_approx

    ap = dirichlet_approx(cfg.extra["alpha"], cfg.extra["tau"], cfg.limits)
    print(f"b={ap.b}\nr={ap.r}\nz={ap.z.real!r},{ap.z.imag!r}\ntau={ap.tau!r}")
    return 0


def _selftest(cfg: RunConfig):
    from .acceptance import run_all

    only = cfg.extra.get("only")
    out = Path(cfg.output) if cfg.output else None
    results = run_all(only=only, out_dir=out)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return EXIT_SELFTEST if failed else EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as e:  # argparse: --help (0) or usage error (2)
        return int(e.code or 0)
    except UsageError as e:
        print(f"gausssieve: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.subcommand in ("verify", "scan"):
            emit_csv(_experiments(cfg), cfg.output, cfg.timings)
        elif cfg.subcommand == "extremal":
            emit_csv(_extremal(cfg), cfg.output)
        elif cfg.subcommand == "counts":
            return _counts(cfg)
        elif cfg.subcommand == "approx":
            return _approx(cfg)
        else:
            return _selftest(cfg)
    except BudgetExceeded as e:
        print(f"gausssieve: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as e:
        print(f"gausssieve: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"gausssieve: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

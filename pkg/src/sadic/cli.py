"""Command line: render | expand | coincidence | lyapunov | code | stats | verify.

Exit codes: 0 success, 2 checked but condition absent, 1 error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import cf
from .coincidence import (CoincidenceWitness, geometric_coincidence_check,
                          geometric_finiteness_check, negative_strong_coincidence,
                          strong_coincidence, verify_witness)
from .directive import DirectiveSequence, limit_word_prefix
from .dynamics import (bounded_remainder_stats, finest_covered, natural_coding_check,
                       natural_coding_scan, recurrence_estimate, word_balance)
from .fractal import covering_histogram, lattice_translates, rauzy_cloud
from .geometry import Face, project, right_eigenvector_approx
from .lyapunov import (BrunSampler, PeriodicSampler, ar_iid_sampler, lyapunov_estimate,
                       pisot_condition)

OK, ABSENT, ERROR = 0, 2, 1
EPS_SCAN = (0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001)

# orthonormal basis of 1-perp used as the image frame
B1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
B2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
COLORS = {1: (215, 48, 39), 2: (26, 152, 80), 3: (69, 117, 180)}
# translates drawn in lighter shades of the same letter colors
PALE = {i: tuple(int(255 - (255 - c) * 0.45) for c in rgb) for i, rgb in COLORS.items()}


class UsageError(Exception):
    pass


def _positive(name, v, allow_zero=False):
    if v is None:
        return v
    if v < 0 or (v == 0 and not allow_zero):
        raise UsageError(f"--{name} must be {'non-negative' if allow_zero else 'positive'}")
    return v


def _seq(args) -> DirectiveSequence:
    if not args.seq:
        raise UsageError("--seq is required")
    try:
        return DirectiveSequence.parse(args.seq)
    except (ValueError, KeyError) as e:
        raise UsageError(f"invalid --seq: {e}") from None


def _u(seq, args) -> np.ndarray:
    """Frequency direction: exact formula for Brun points, else column average."""
    spec = (args.seq or "").strip().lower()
    if spec.startswith("brun:"):
        return cf.brun_frequency([float(c) for c in spec[5:].split(",")])
    return right_eigenvector_approx(seq, args.u_depth)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# ---------------------------------------------------------------- render

def rasterize(points, labels, size: int, bounds=None, layers=()) -> bytes:
    """P6 image of labelled points of 1-perp in the frame (B1, B2).  Later
    points overwrite earlier ones; ``layers`` are drawn first."""
    xy = np.stack([points @ B1, points @ B2], axis=1)
    allxy = [xy] + [np.stack([p @ B1, p @ B2], axis=1) for p, _, _ in layers]
    if bounds is None:
        cat = np.concatenate(allxy) if len(points) or layers else np.zeros((1, 2))
        lo, hi = cat.min(axis=0), cat.max(axis=0)
    else:
        lo, hi = bounds
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    scale = (size - 1) * 0.94 / span
    centre = (lo + hi) / 2
    img = np.full((size, size, 3), 255, dtype=np.uint8)

    def draw(q, labs, palette):
        col = np.rint((q[:, 0] - centre[0]) * scale + (size - 1) / 2).astype(np.int64)
        row = np.rint((centre[1] - q[:, 1]) * scale + (size - 1) / 2).astype(np.int64)
        ok = (col >= 0) & (col < size) & (row >= 0) & (row < size)
        for i, rgb in palette.items():
            m = ok & (labs == i)
            img[row[m], col[m]] = rgb

    for (p, labs, palette), q in zip(layers, allxy[1:]):
        draw(q, labs, palette)
    draw(xy, labels, COLORS)
    return f"P6\n{size} {size}\n255\n".encode() + img.tobytes()


def cmd_render(args) -> int:
    seq = _seq(args)
    _positive("size", args.size)
    _positive("min-len", args.min_len)
    u = _u(seq, args)
    cloud = rauzy_cloud(seq, args.depth, args.min_len, u, np.ones(3))
    layers = []
    if args.translates:
        for t in lattice_translates(args.translates):
            if t == (0, 0, 0):
                continue
            off = project(u, np.ones(3), np.array(t, float))
            layers.append((cloud.points + off, cloud.labels, PALE))
    data = rasterize(cloud.points, cloud.labels, args.size, layers=layers)
    if not args.out:
        raise UsageError("render needs --out")
    with open(args.out, "wb") as fh:
        fh.write(data)
    return OK


# ---------------------------------------------------------------- expand

def cmd_expand(args) -> int:
    _positive("n", args.n, allow_zero=True)
    conv = Fraction if args.exact else float
    try:
        p = [conv(c) for c in args.point.split(",")]
    except ValueError as e:
        raise UsageError(f"invalid --point: {e}") from None
    if args.algorithm == "brun":
        exp = cf.brun_expand(p, args.n, exact=args.exact)
    else:
        exp = cf.ar_expand(p, args.n)
    out = {"algorithm": args.algorithm, "input": [str(c) for c in p], "n": args.n, "digits": str(exp),
           "point": [str(c) for c in exp.point], "stopped": exp.stopped}
    _emit(args, json.dumps(out, sort_keys=True))
    return OK


# ---------------------------------------------------------------- coincidence

def cmd_coincidence(args) -> int:
    seq = _seq(args)
    if args.kind in ("strong", "negative_strong"):
        fn = strong_coincidence if args.kind == "strong" else negative_strong_coincidence
        wit = fn(seq, _positive("l-max", args.l_max))
    elif args.kind == "geometric":
        u = _u(seq, args)
        wit = None
        for n in range(args.n_max + 1):
            wit = geometric_coincidence_check(seq, n, _positive("C", args.C, True), u)
            if wit is not None:
                break
    else:
        wit = None
        for n in range(args.n_max + 1):
            if geometric_finiteness_check(seq, n, _positive("R", args.R, True)):
                wit = CoincidenceWitness("finiteness", n, {"R": args.R}, str(seq))
                break
    if wit is None:
        _emit(args, json.dumps({"kind": args.kind, "found": False, "seq": str(seq)}))
        return ABSENT
    if not wit.seq:
        wit.seq = str(seq)
    _emit(args, wit.to_json())
    return OK


# ---------------------------------------------------------------- lyapunov

def cmd_lyapunov(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    _positive("n-steps", args.n_steps)
    if args.seed is None:
        raise UsageError("--seed is required for lyapunov")
    if args.sampler == "brun":
        sampler = BrunSampler()
    elif args.sampler == "ar-iid":
        sampler = ar_iid_sampler()
    else:
        seq = _seq(args)
        spec = args.seq.strip()
        if not spec.lower().startswith("periodic:"):
            raise UsageError("periodic sampler needs --seq 'periodic: ...'")
        period = spec.split(":", 1)[1].split()
        sampler = PeriodicSampler([seq.matrix(k) for k in range(len(period))], name=str(seq))
    rep = lyapunov_estimate(sampler, args.n_steps, args.trials, args.seed,
                            burn_in=args.burn_in, form=args.form)
    verdict = pisot_condition(rep)
    out = json.loads(rep.to_json())
    out["pisot"] = bool(verdict)
    _emit(args, json.dumps(out, sort_keys=True))
    return OK if verdict else ABSENT


# ---------------------------------------------------------------- code

def cmd_code(args) -> int:
    seq = _seq(args)
    _positive("N", args.N)
    _positive("epsilon", args.epsilon)
    u = _u(seq, args)
    e = np.zeros(3)
    e[args.j - 1] = 1.0
    t = project(u, np.ones(3), e)
    if args.scan:
        reps = natural_coding_scan(seq, args.depth, u, t, args.N, EPS_SCAN,
                                   min_len=args.min_len, j=args.j)
        rep = finest_covered(reps)
    else:
        reps = None
        rep = natural_coding_check(seq, args.depth, u, t, args.N, args.epsilon,
                                   min_len=args.min_len, j=args.j)
    out = json.loads(rep.to_json())
    if reps is not None:
        out["scan"] = [json.loads(r.to_json()) for r in reps]
    out["seq"] = str(seq)
    out["unambiguous_fraction"] = rep.matched / rep.N if rep.N else 1.0
    _emit(args, json.dumps(out, sort_keys=True))
    ok = rep.mismatched == 0 and out["unambiguous_fraction"] >= args.min_unambiguous
    return OK if ok else ABSENT


# ---------------------------------------------------------------- stats

def cmd_stats(args) -> int:
    seq = _seq(args)
    _positive("horizon", args.horizon)
    u = _u(seq, args)
    word = limit_word_prefix(seq, args.depth, max(args.horizon, args.min_len))
    disc = bounded_remainder_stats(word, u, args.horizon)
    bal = word_balance(word, args.max_len)
    rec = recurrence_estimate(word[:args.recurrence_len], args.n_max)
    out = {"seq": str(seq), "horizon": args.horizon, "word_length": len(word),
           "frequency": [float(c) for c in u], "discrepancy": [float(c) for c in disc],
           "balance": bal, "balance_max_len": args.max_len, "recurrence": rec.to_dict()}
    if args.cover:
        cloud = rauzy_cloud(seq, args.depth, args.min_len, u, np.ones(3))
        r = int(math.ceil(cloud.diameter())) + 2
        tr = [Face(x, i) for x in lattice_translates(r) for i in (1, 2, 3)]
        h = covering_histogram(seq, args.depth, u, tr, args.epsilon, args.samples,
                               args.seed if args.seed is not None else 0, cloud=cloud)
        out["covering"] = json.loads(h.to_json())
    _emit(args, json.dumps(out, sort_keys=True))
    return OK if float(np.max(disc)) <= bal else ABSENT


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    with open(args.witness) as fh:
        wit = CoincidenceWitness.from_json(fh.read())
    spec = args.seq or wit.seq
    seq = None
    if spec:
        try:
            seq = DirectiveSequence.parse(spec)
        except ValueError as e:
            raise UsageError(f"cannot rebuild sequence {spec!r}: {e}") from None
    ok = verify_witness(wit, seq)
    _emit(args, json.dumps({"kind": wit.kind, "index": wit.index, "valid": ok}))
    return OK if ok else ABSENT


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sadic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, **defaults):
        sp.add_argument("--seq", help="'periodic: a1 a2 a3', 'b3 b1 periodic: b2', "
                        "'brun:x1,x2' or 'ar:v1,v2,v3'")
        sp.add_argument("--depth", type=int, default=defaults.get("depth", 400))
        sp.add_argument("--min-len", type=int, default=defaults.get("min_len", 100_000))
        sp.add_argument("--u-depth", type=int, default=60)
        sp.add_argument("--epsilon", type=float, default=0.02)
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("render", help="rasterize the Rauzy cloud to PPM (P6)")
    common(sp)
    sp.add_argument("--size", type=int, default=800)
    sp.add_argument("--translates", type=int, default=0,
                    help="also draw lattice translates up to this sup-norm radius")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("expand", help="Brun or Arnoux-Rauzy digits")
    common(sp)
    sp.add_argument("--algorithm", choices=("brun", "ar"), default="brun")
    sp.add_argument("--point", required=True, help="x1,x2 (brun) or v1,v2,v3 (ar)")
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--exact", action="store_true", help="rational arithmetic (brun)")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("coincidence", help="search a coincidence certificate")
    common(sp)
    sp.add_argument("--kind", choices=("strong", "negative_strong", "geometric", "finiteness"),
                    default="strong")
    sp.add_argument("--l-max", type=int, default=6)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--C", type=float, default=2.0)
    sp.add_argument("--R", type=float, default=1.0)
    sp.set_defaults(func=cmd_coincidence)

    sp = sub.add_parser("lyapunov", help="Lyapunov exponents and the Pisot condition")
    common(sp)
    sp.add_argument("--sampler", choices=("brun", "ar-iid", "periodic"), default="brun")
    sp.add_argument("--n-steps", type=int, default=100_000)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--burn-in", type=int, default=100)
    sp.add_argument("--form", choices=("vector", "product"), default="vector")
    sp.set_defaults(func=cmd_lyapunov)

    sp = sub.add_parser("code", help="natural coding of the toral translation")
    common(sp, min_len=None)
    sp.add_argument("--N", type=int, default=2000)
    sp.add_argument("--j", type=int, default=3, choices=(1, 2, 3))
    sp.add_argument("--min-unambiguous", type=float, default=0.95)
    sp.add_argument("--scan", action="store_true",
                    help="scan eps and report the finest eps covering every orbit point")
    sp.set_defaults(func=cmd_code)

    sp = sub.add_parser("stats", help="discrepancy, balance, recurrence, covering")
    common(sp)
    sp.add_argument("--horizon", type=int, default=10_000)
    sp.add_argument("--max-len", type=int, default=200)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--recurrence-len", type=int, default=20_000)
    sp.add_argument("--cover", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("verify", help="re-validate a witness JSON file")
    common(sp)
    sp.add_argument("--witness", required=True)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ERROR if e.code else OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"sadic {args.command}: usage error: {e}", file=sys.stderr)
        return ERROR
    except (ValueError, OSError, ArithmeticError, MemoryError, RuntimeError) as e:
        print(f"sadic {args.command}: error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())

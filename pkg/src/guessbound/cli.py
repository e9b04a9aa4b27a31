"""Command-line front end.

    guessbound curve --M 256 --alpha 1 --rho 1 --out fig1.csv
    guessbound bound --M 16 --alpha 2 --H 3.5
    guessbound hw-sweep --n 8 --alphas 1,0.5 --out fig3.csv
    guessbound probing --model model.json --alpha 0.5
    guessbound scatter --M 32 --alpha 1 --count 2000 --seed 1
    guessbound verify

Exit codes: 0 success, 2 usage error, 3 numerical failure.  Without
``--out`` the table goes to stdout; relative ``--out`` paths are placed
under ``$GUESSBOUND_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .bounds import (
    BASELINES,
    BoundError,
    BoundSpec,
    advantage_bound,
    baseline_bounds,
    binary_bounds,
    curve,
    first_order_bound,
    lower_bound_many,
    minentropy_bounds,
    random_probing_bounds,
)
from .distributions import OrderParams
from .entropies import LN2, EntropyValue
from .guesswork import uniform_moment
from .io import render, write_atomic
from .leakage import (
    HammingWeightModel,
    QuadratureError,
    RandomProbingModel,
    hw_conditional_entropy,
    hw_conditional_guesswork,
    load_model_config,
    probing_values,
    random_function_scatter,
    random_probing_model,
)
from .verify import report, run_all

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


def _positive(text):
    v = float(text)
    if not v > 0 or math.isnan(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _positive_finite(text):
    v = _positive(text)
    if math.isinf(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _support_size(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"bounds need M >= 2, got {v}")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _alpha_list(text):
    return [_positive(t) for t in text.split(",") if t.strip()]


def _baseline_list(text):
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in BASELINES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown baseline(s) {bad}; choose from {', '.join(BASELINES)}")
    return names


def _alpha_label(alpha):
    return "inf" if math.isinf(alpha) else alpha


def _tag(alpha):
    return "inf" if math.isinf(alpha) else format(alpha, "g")


def _to_nats(value, unit):
    return value * LN2 if unit == "bits" else value


def _entropy_row(param, H_nats, G, M, rho):
    H = EntropyValue(min(max(H_nats, 0.0), math.log(M)))
    return {
        "param": param,
        "H_nats": H.nats,
        "H_bits": H.bits,
        "G": G,
        "deltaH_nats": math.log(M) - H.nats,
        "deltaG": uniform_moment(M, rho) - G,
    }


def _baseline_value(M, H, name, params):
    alpha = None if name != "arikan" else params.alpha
    return baseline_bounds(M, H, name, rho=params.rho, alpha=alpha)


def cmd_curve(args):
    params = OrderParams(args.alpha, args.rho)
    if "arikan" in args.baselines and abs(params.alpha - 1 / (1 + params.rho)) > 1e-12:
        raise UsageError("the arikan baseline needs --alpha = 1/(1+rho)")
    spec = BoundSpec(args.M, params, size=args.size, lo=args.lo, hi=args.hi)
    rows = []
    for pt in curve(spec):
        row = pt.as_row()
        if args.first_order:
            row["deltaG_first_order"] = first_order_bound(args.M, params, pt.deltaH)
        for name in args.baselines:
            row[f"G_{name}"] = _baseline_value(args.M, pt.H.nats, name, params)
        rows.append(row)
    meta = {"command": "curve", "M": args.M, "alpha": _alpha_label(args.alpha), "rho": args.rho, "size": args.size, "unit": args.unit}
    return rows, meta


def cmd_bound(args):
    params = OrderParams(args.alpha, args.rho)
    M = args.M
    logm = math.log(M)
    if args.H is not None:
        H = np.array([_to_nats(v, args.unit) for v in args.H])
        given = list(args.H)
    else:
        H = np.array([logm - _to_nats(v, args.unit) for v in args.deltaH])
        given = list(args.deltaH)
    if np.any(H < -1e-12) or np.any(H > logm + 1e-12):
        raise UsageError(f"entropies must lie in [0, log M] ({logm / LN2:g} bits)")
    H = np.clip(H, 0.0, logm)
    G = lower_bound_many(M, params, H)
    rows = []
    for v, h, g in zip(given, H, G):
        row = _entropy_row(v, float(h), float(g), M, args.rho)
        row["deltaG_first_order"] = first_order_bound(M, params, row["deltaH_nats"])
        if params.is_min_entropy:
            row["G_upper"] = minentropy_bounds(M, args.rho, float(h)).upper
        elif M == 2:
            row["G_upper"] = binary_bounds(params, float(h)).upper
        for name in args.baselines:
            row[f"G_{name}"] = _baseline_value(M, float(h), name, params)
        rows.append(row)
    meta = {"command": "bound", "M": M, "alpha": _alpha_label(args.alpha), "rho": args.rho, "unit": args.unit,
            "input": "H" if args.H is not None else "deltaH"}
    return rows, meta


def cmd_hw_sweep(args):
    n, rho = args.n, args.rho
    M = 2**n
    gm = uniform_moment(M, rho)
    alphas = args.alphas
    sigma2 = np.geomspace(args.sigma2_min, args.sigma2_max, args.points)
    arikan_alpha = 1 / (1 + rho)
    rows = []
    for s2 in sigma2:
        model = HammingWeightModel(n, math.sqrt(s2))
        G = hw_conditional_guesswork(model, rho).value
        H = {a: hw_conditional_entropy(model, a).nats for a in alphas}
        row = _entropy_row(float(s2), H[alphas[0]], G, M, rho)
        row["source"] = "hw"
        row["sigma"] = model.sigma
        for a in alphas:
            params = OrderParams(a, rho)
            dH = max(math.log(M) - H[a], 0.0)
            row[f"deltaH_alpha{_tag(a)}_nats"] = dH
            row[f"deltaG_bound_alpha{_tag(a)}"] = float(advantage_bound(M, params, dH))
            row[f"deltaG_first_order_alpha{_tag(a)}"] = first_order_bound(M, params, dH)
        h1 = H[1.0] if 1.0 in H else hw_conditional_entropy(model, 1.0).nats
        for name in args.baselines:
            if name == "arikan":
                h = H.get(arikan_alpha)
                if h is None:
                    h = hw_conditional_entropy(model, arikan_alpha).nats
                row["deltaG_arikan"] = gm - baseline_bounds(M, h, "arikan", rho=rho, alpha=arikan_alpha)
            elif name == "mceliece_yu":
                row["deltaG_mceliece_yu_lower"] = gm - baseline_bounds(M, h1, name)
            else:
                row[f"deltaG_{name}"] = gm - baseline_bounds(M, h1, name)
        rows.append(row)
    meta = {"command": "hw-sweep", "n": n, "M": M, "alpha": _alpha_label(alphas[0]), "rho": rho, "unit": args.unit,
            "alphas": [_alpha_label(a) for a in alphas]}
    return rows, meta


def _region_rows(M, alpha, size):
    rows = []
    for h in np.linspace(0.0, math.log(M), size):
        lo, hi = random_probing_bounds(M, alpha, float(h))
        for source, g in (("region_lower", lo), ("region_upper", hi)):
            row = _entropy_row(float(h), float(h), g, M, 1.0)
            row["source"] = source
            rows.append(row)
    return rows


def cmd_probing(args):
    if args.model:
        model = load_model_config(args.model)
        if not isinstance(model, RandomProbingModel):
            raise UsageError("probing needs a {\"probing\": ...} model config")
        models = [model]
    else:
        rng = np.random.default_rng(args.seed)
        models = [random_probing_model(args.M, args.states, args.n_range, seed=rng) for _ in range(args.count)]
    M = models[0].M
    if M < 2:
        raise UsageError("probing models need at least 2 keys")
    rows = _region_rows(M, args.alpha, args.size)
    for k, m in enumerate(models):
        H, G = probing_values(m, args.alpha)
        row = _entropy_row(k, H, G, M, 1.0)
        row["source"] = "exact"
        rows.append(row)
    meta = {"command": "probing", "M": M, "alpha": _alpha_label(args.alpha), "rho": 1.0, "unit": args.unit}
    return rows, meta


def cmd_scatter(args):
    M = args.M
    rows = _region_rows(M, args.alpha, args.size)
    pts = random_function_scatter(M, args.n_range or M, args.count, seed=args.seed, alpha=args.alpha)
    for k, (H, G) in enumerate(pts):
        row = _entropy_row(k, float(H), float(G), M, 1.0)
        row["source"] = "exact"
        rows.append(row)
    meta = {"command": "scatter", "M": M, "alpha": _alpha_label(args.alpha), "rho": 1.0, "unit": args.unit,
            "seed": args.seed, "n_range": args.n_range or M}
    return rows, meta


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--unit", choices=("bits", "nats"), default="bits",
                   help="unit of entropies given on the command line (tables carry both)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="guessbound", description="Optimal guessing-moment bounds under Rényi leakage")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="optimal lower-bound curve for (M, alpha, rho)")
    p.add_argument("--M", type=_support_size, required=True)
    p.add_argument("--alpha", type=_positive, default=1.0, help="entropy order; 'inf' for min-entropy")
    p.add_argument("--rho", type=_positive_finite, default=1.0)
    p.add_argument("--size", type=_count, default=512, help="grid points (endpoints added)")
    p.add_argument("--lo", type=float, help="smallest curve parameter")
    p.add_argument("--hi", type=float, help="largest curve parameter")
    p.add_argument("--first-order", action="store_true", help="add the small-leakage bound column")
    p.add_argument("--baselines", type=_baseline_list, default=[], help="comma list of " + ",".join(BASELINES))
    _add_output(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("bound", help="evaluate the bounds at given leakage levels")
    p.add_argument("--M", type=_support_size, required=True)
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--rho", type=_positive_finite, default=1.0)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--H", type=float, nargs="+", help="conditional entropies")
    grp.add_argument("--deltaH", type=float, nargs="+", help="information advantages")
    p.add_argument("--baselines", type=_baseline_list, default=[])
    _add_output(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("hw-sweep", help="Hamming weight model over a noise grid")
    p.add_argument("--n", type=_count, default=8, help="bit width (M = 2**n)")
    p.add_argument("--alphas", type=_alpha_list, default=[1.0, 0.5], help="comma list of entropy orders")
    p.add_argument("--rho", type=_positive_finite, default=1.0)
    p.add_argument("--sigma2-min", type=_positive_finite, default=2.0**-4)
    p.add_argument("--sigma2-max", type=_positive_finite, default=2.0**10)
    p.add_argument("--points", type=_count, default=33)
    p.add_argument("--baselines", type=_baseline_list, default=[])
    _add_output(p)
    p.set_defaults(func=cmd_hw_sweep)

    p = sub.add_parser("probing", help="random probing model: exact points and region")
    p.add_argument("--model", help="JSON model config (file path or inline JSON)")
    p.add_argument("--M", type=_support_size, default=32)
    p.add_argument("--states", type=_count, default=2)
    p.add_argument("--n-range", type=_count, default=8)
    p.add_argument("--count", type=_count, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--size", type=_count, default=257, help="entropy grid for the region boundary")
    _add_output(p)
    p.set_defaults(func=cmd_probing)

    p = sub.add_parser("scatter", help="exact points of Y = f(K) for random functions f")
    p.add_argument("--M", type=_support_size, default=32)
    p.add_argument("--n-range", type=_count, help="size of the output alphabet (default M)")
    p.add_argument("--count", type=_count, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--size", type=_count, default=257)
    _add_output(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_count, default=2000)
    p.add_argument("--size", type=_count, default=128)
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=None)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            results = run_all(seed=args.seed, count=args.count, size=args.size, perturb=args.perturb)
            sys.stdout.write(report(results))
            return 0 if all(r.passed for r in results) else EXIT_NUMERIC
        rows, meta = args.func(args)
        text = render(rows, args.format, meta)
        if args.out:
            path = write_atomic(args.out, text)
            print(f"wrote {len(rows)} rows to {path}", file=sys.stderr)
        else:
            sys.stdout.write(text)
    except (BoundError, QuadratureError, ArithmeticError) as exc:
        print(f"guessbound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"guessbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())

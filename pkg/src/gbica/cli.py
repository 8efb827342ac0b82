"""Command-line front end: ``gbica <command> [<subcommand>] [flags]``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bica_exact, bica_linear, bica_relax, entropy_coding, experiments, universal, vq
from .probability import (
    gen_markov,
    gen_uniform_simplex,
    gen_zipf,
    read_distribution,
    read_samples,
    sample,
    write_distribution,
    write_samples,
)
from .transforms import (
    PermutationTransform,
    block_order_permutation,
    cost,
    encode_descriptor,
    linear_transform,
    order_permutation,
)


def _out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_bytes(path, data: bytes) -> None:
    if not path:
        raise ValueError("--out is required for binary output")
    with open(path, "wb") as fh:
        fh.write(data)


def _m(args) -> int:
    if args.m is not None:
        return args.m
    if args.d is not None:
        return 1 << args.d
    raise ValueError("give --m or --d")


def _floats(text: str):
    return [float(v) for v in text.split(",") if v]


def _save_transform(args, t: PermutationTransform) -> None:
    if getattr(args, "descriptor", None):
        with open(args.descriptor, "wb") as fh:
            fh.write(encode_descriptor(t))


# -- handlers ------------------------------------------------------------------

def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    if args.kind == "zipf":
        dist = gen_zipf(_m(args), args.s)
    elif args.kind == "simplex":
        dist = gen_uniform_simplex(_m(args), rng)
    else:
        dist = gen_markov(args.d, args.alpha)
    if args.n:
        write_samples(args.out or "/dev/stdout", sample(dist, args.n, rng))
    else:
        write_distribution(args.out or "/dev/stdout", dist)


def cmd_transform(args):
    dist = read_distribution(args.input)
    if args.kind == "order":
        t = order_permutation(dist)
    elif args.kind == "block-order":
        t = block_order_permutation(dist, args.b)
    else:
        t = PermutationTransform.identity(dist.m)
    _save_transform(args, t)
    _out(args, f"kind,cost\n{t.kind},{cost(dist, t)!r}\n")


def cmd_bica(args):
    dist = read_distribution(args.input)
    extra = ""
    if args.method == "exact":
        pi, t = bica_exact.recover_independent_components(dist)
        extra = ";".join(repr(float(v)) for v in pi)
        c = cost(dist, t)
    elif args.method == "bnb":
        t, c = bica_exact.branch_and_bound_optimal(dist, limit=args.limit)
    elif args.method == "relax":
        t, c, _ = bica_relax.relaxed_bica_binary(dist, k=args.k)
    elif args.method == "descent":
        t, c = bica_relax.objective_descent_qary(dist, q=args.q, k=args.k, n_init=args.inits,
                                                 rng=args.seed)
    elif args.bound:
        c = bica_linear.linear_lower_bound(dist) - dist.entropy()
        _out(args, f"method,cost,detail\nlinear-bound,{c!r},\n")
        return
    else:
        rows, c = bica_linear.greedy_linear_bica(dist)
        t = linear_transform(rows, dist.d)
        extra = ";".join(str(int(r)) for r in rows)
    _save_transform(args, t)
    _out(args, f"method,cost,detail\n{args.method},{c!r},{extra}\n")


def cmd_code(args):
    if args.decode:
        with open(args.input, "rb") as fh:
            data = fh.read()
        write_samples(args.out or "/dev/stdout", entropy_coding.decode_stream(data))
        return
    if args.coder == "canonical":
        dist = read_distribution(args.input)
        cb = entropy_coding.canonicalize(entropy_coding.huffman_build(dist.probs))
        lines = ["symbol,length,code"]
        lines += [f"{s},{cb.lengths[s]},{cb.code_string(s)}" for s in sorted(cb.lengths)]
        _out(args, "\n".join(lines) + "\n")
        return
    x = read_samples(args.input)
    m = _m(args)
    coder = {"huffman": "huffman", "arith": "arith", "adaptive": "adaptive"}[args.coder]
    _write_bytes(args.out, entropy_coding.encode_stream(x, m, coder))


def cmd_universal(args):
    if args.action == "redundancy":
        if args.regime == "patterns":
            r = universal.patterns_bound(args.n, args.n0, _m(args), args.patterns_mode)
        else:
            r = universal.minimax_redundancy(_m(args), args.n, args.regime)
        _out(args, f"regime,m,n,bits\n{r.regime},{r.m},{r.n},{r.bits!r}\n")
        return
    if args.action == "pipeline":
        x = read_samples(args.input)
        st = universal.blockwise_pipeline(x, args.d, args.B, max_iters=args.iters, k=args.k,
                                          rng=args.seed)
        lines = ["iteration,sum_block_entropy,total_bits"]
        lines += [f"{i},{b!r},{t!r}" for i, (b, t) in enumerate(zip(st.block_trace, st.totals), 1)]
        _out(args, "\n".join(lines) + "\n")
        print(f"selected I0={st.I0} total_bits={st.total_bits:.1f}", file=sys.stderr)
        return
    if args.decode:
        with open(args.input, "rb") as fh:
            data = fh.read()
        if args.action == "window":
            x = universal.sliding_window_decode(data)
        else:
            ref = read_distribution(args.reference) if args.reference else None
            x = universal.permutation_coded_decode(data, reference=ref)
        write_samples(args.out or "/dev/stdout", x)
        return
    x = read_samples(args.input)
    m = _m(args)
    if args.action == "permcode":
        ref = read_distribution(args.reference) if args.reference else None
        data = universal.permutation_coded_encode(x, m, args.scheme, args.mode, reference=ref,
                                                  embed_reference=args.embed)
    else:
        data = universal.sliding_window_encode(x, m, args.l, args.mode)
    _write_bytes(args.out, data)


def cmd_vq(args):
    if args.input:
        x = np.loadtxt(args.input, delimiter=",", ndmin=2)
    else:
        x = experiments.mixture_2d(args.n, args.seed)
    rows = ["lambda_or_delta,distortion,rate_joint,rate_marginal_sum"]
    if args.method == "lattice":
        for delta in _floats(args.delta):
            r = vq.lattice_quantize(x, vq.LatticeSpec(args.family, delta))
            joint, marg = vq.marginal_joint_gap(r.counts)
            d = x.shape[1]
            rows.append(f"{delta!r},{r.distortion!r},{joint / d!r},{marg / d!r}")
    else:
        rng = np.random.default_rng(args.seed)
        init = x[rng.choice(x.shape[0], args.m, replace=False)]
        for lam in _floats(args.lam):
            a = vq.ecvq(x, args.m, lam, max_iters=args.iters, init=init)
            if args.method == "ecvq":
                rows.append(f"{lam!r},{a.distortion(x)!r},{a.rate()!r},")
            else:
                b = vq.bica_ecvq(x, args.m, lam, k=args.k, max_iters=args.iters, init=init)
                rows.append(f"{lam!r},{b.distortion(x)!r},{a.rate()!r},{b.rate()!r}")
    _out(args, "\n".join(rows) + "\n")


def cmd_experiment(args):
    params = {}
    for key in ("m", "d", "n", "s", "k", "iters"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if args.B is not None:
        params["B_list"] = [args.B]
    rep = experiments.run_experiment(args.id, params, args.seed)
    _out(args, rep.to_csv())


def cmd_ingest(args):
    dist, words = experiments.ingest_word_frequencies(args.input, args.d)
    write_distribution(args.out, dist)
    experiments.write_symbol_map(args.out + ".map", words)


# -- parser ---------------------------------------------------------------------

def _common(p, *names):
    spec = {
        "m": dict(type=int, help="alphabet size"),
        "d": dict(type=int, help="number of bits (m = 2^d)"),
        "b": dict(type=int, default=2, help="bits per block"),
        "B": dict(type=int, help="number of blocks"),
        "s": dict(type=float, default=1.0, help="Zipf exponent"),
        "k": dict(type=int, default=8, help="pieces of the linear bound"),
        "n": dict(type=int, help="number of samples"),
        "iters": dict(type=int, default=50, help="iteration cap"),
        "seed": dict(type=int, default=0, help="random seed"),
        "out": dict(help="output path (stdout if omitted)"),
    }
    for name in names:
        p.add_argument(f"--{name}", **spec[name])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gbica", description="Large-alphabet coding via binary decompositions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a distribution or samples")
    p.add_argument("--kind", choices=["zipf", "simplex", "markov"], default="zipf")
    p.add_argument("--alpha", type=float, default=0.1, help="flip probability of the Markov chain")
    _common(p, "m", "d", "s", "n", "seed", "out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("transform", help="apply a fixed relabeling and report its cost")
    p.add_argument("input")
    p.add_argument("--kind", choices=["order", "block-order", "identity"], default="order")
    p.add_argument("--descriptor", help="write the transform descriptor here")
    _common(p, "b", "out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("bica", help="search for a low-cost relabeling")
    bsub = p.add_subparsers(dest="method", required=True)
    for name in ("exact", "bnb", "relax", "descent", "linear"):
        q = bsub.add_parser(name)
        q.add_argument("input")
        q.add_argument("--descriptor", help="write the transform descriptor here")
        q.add_argument("--limit", type=int, default=bica_exact.DEFAULT_BNB_LIMIT)
        q.add_argument("--q", type=int, default=2, help="component alphabet size (descent)")
        q.add_argument("--inits", type=int, default=20, help="random restarts (descent)")
        q.add_argument("--greedy", action="store_true", help="greedy linear fit (default)")
        q.add_argument("--bound", action="store_true", help="linear lower bound only")
        _common(q, "k", "seed", "out")
        q.set_defaults(func=cmd_bica)

    p = sub.add_parser("code", help="entropy-code samples")
    csub = p.add_subparsers(dest="coder", required=True)
    for name in ("huffman", "canonical", "arith", "adaptive"):
        q = csub.add_parser(name)
        q.add_argument("input")
        q.add_argument("--decode", action="store_true")
        _common(q, "m", "d", "out")
        q.set_defaults(func=cmd_code)

    p = sub.add_parser("universal", help="redundancy, block pipeline and permutation coders")
    usub = p.add_subparsers(dest="action", required=True)
    q = usub.add_parser("redundancy")
    q.add_argument("--regime", default="auto",
                   choices=["auto", "m=o(n)", "n=o(m)", "m=theta(n)", "small", "large", "theta", "patterns"])
    q.add_argument("--n0", type=int, default=0)
    q.add_argument("--patterns-mode", default="default", choices=["default", "paper-example"])
    _common(q, "m", "d", "n", "out")
    q.set_defaults(func=cmd_universal, n=None)
    q = usub.add_parser("pipeline")
    q.add_argument("input")
    _common(q, "d", "B", "k", "iters", "seed", "out")
    q.set_defaults(func=cmd_universal)
    for name in ("permcode", "window"):
        q = usub.add_parser(name)
        q.add_argument("input")
        q.add_argument("--mode", choices=["marginal", "block"], default="block")
        q.add_argument("--decode", action="store_true")
        if name == "permcode":
            q.add_argument("--scheme", choices=["fixed", "adaptive"], default="adaptive")
            q.add_argument("--reference", help="distribution file giving the shared order")
            q.add_argument("--embed", action="store_true", help="store the reference in the stream")
        else:
            q.add_argument("--l", type=int, default=100, help="window length")
        _common(q, "m", "d", "out")
        q.set_defaults(func=cmd_universal)

    p = sub.add_parser("vq", help="vector quantization sweeps (CSV)")
    vsub = p.add_subparsers(dest="method", required=True)
    for name in ("ecvq", "bica-ecvq", "lattice"):
        q = vsub.add_parser(name)
        q.add_argument("--input", help="CSV of real vectors (default: 2D Gaussian mixture)")
        q.add_argument("--lambda", dest="lam", default="0.1,0.5,1,2")
        q.add_argument("--delta", default="0.1,0.5,1,2")
        q.add_argument("--family", choices=["Z", "D"], default="Z")
        q.add_argument("--m", type=int, default=16, help="number of clusters")
        q.add_argument("--k", type=int, default=None, help="relaxed relabeling pieces")
        _common(q, "n", "iters", "seed", "out")
        q.set_defaults(func=cmd_vq, n=1000)

    p = sub.add_parser("experiment", help="run a named experiment and write CSV")
    p.add_argument("id", choices=sorted(experiments.EXPERIMENTS))
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--B", type=int)
    p.add_argument("--iters", type=int)
    _common(p, "seed", "out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ingest", help="word<TAB>count list to a d-bit distribution")
    p.add_argument("input")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"gbica: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

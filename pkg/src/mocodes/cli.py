"""Command line: design codes, sweep alpha, compress and compare.

Exit codes: 0 ok, 1 bad input, 2 solver did not converge, 3 corrupt container.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import container
from .codebook import huffman_baseline, integer_lengths
from .design import (
    PAYOFFS,
    all_payoffs,
    avg_redundancy,
    byte_histogram,
    design,
    load_model,
    max_redundancy,
    needs_t,
    real_lengths,
)
from .distributions import SourceModel, check_alpha, model_from_counts, shannon_lengths
from .errors import AlphabetTooSmall, ContainerError, InputError, KraftViolation, NoConvergence
from .merge_weights import breakpoints

EXIT_INPUT, EXIT_CONVERGENCE, EXIT_CONTAINER = 1, 2, 3


def fmt(x) -> str:
    if x is None:
        return "n/a"
    return format(float(x), ".12g")


def fmt_vec(xs) -> str:
    return " ".join(fmt(x) for x in xs)


def design_document(m: SourceModel, payoff: str, alpha: float, t: float | None) -> str:
    d = design(m, payoff, alpha, t)
    table = breakpoints(m)
    cb = d.codebook()
    doc = configparser.ConfigParser(interpolation=None)
    doc.optionxform = str
    doc["model"] = {
        "D": str(m.D),
        "symbols": " ".join(map(str, m.perm)),
        "probabilities": fmt_vec(m.probs),
    }
    doc["breakpoints"] = {
        "alphas": fmt_vec(table.alphas),
        "slopes": fmt_vec(table.slopes),
    }
    doc["design"] = {
        "payoff": payoff,
        "alpha": fmt(d.alpha),
        "t": fmt(d.t),
        "segment": str(table.segment(d.alpha)),
    }
    doc["weights"] = {"weights": fmt_vec(d.weights)}
    doc["lengths"] = {
        "real": fmt_vec(d.real.lengths),
        "integer": " ".join(map(str, d.integer.lengths.tolist())),
        "kraft_real": fmt(d.real.kraft),
        "kraft_integer": fmt(d.integer.kraft),
    }
    doc["codes"] = {str(sym): cb.bitstring(sym) for sym in m.perm}
    real_pay = all_payoffs(d.real, m, d.alpha, d.t)
    int_pay = all_payoffs(d.integer, m, d.alpha, d.t)
    doc["payoffs"] = {
        **{f"{k}.real": fmt(v) for k, v in real_pay.items()},
        **{f"{k}.integer": fmt(v) for k, v in int_pay.items()},
    }
    buf = io.StringIO()
    doc.write(buf)
    return buf.getvalue()


def sweep_alphas(m: SourceModel, step: float) -> list[float]:
    """Regular grid on [0, 1] plus every breakpoint, strictly increasing."""
    if not 0 < step <= 0.5:
        raise InputError(f"step must lie in (0, 0.5], got {step}")
    n = int(math.floor(1 / step + 1e-9))
    grid = [i * step for i in range(n + 1)] + [1.0] + breakpoints(m).alphas.tolist()
    out: list[float] = []
    for a in sorted(min(max(a, 0.0), 1.0) for a in grid):
        if not out or a - out[-1] > 1e-12:
            out.append(a)
    return out


def sweep_csv(m: SourceModel, payoff: str, step: float, ts: list[float] | None = None) -> str:
    """CSV of weights and real-length statistics along the alpha grid.

    For the exponential pay-offs one block of rows is written per t.
    """
    alphas = sweep_alphas(m, step)
    with_t = needs_t(payoff)
    if with_t and not ts:
        ts = [1.0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["alpha"] + (["t"] if with_t else []) + [f"w_{s}" for s in m.perm] + ["max_length", "avg_length"]
    w.writerow(header)
    for t in ts if with_t else [None]:
        for a in alphas:
            l, wts = real_lengths(m, payoff, a, t)
            row = [fmt(a)] + ([fmt(t)] if with_t else [])
            row += [fmt(x) for x in wts]
            row += [fmt(l.lengths.max()), fmt(np.dot(l.lengths, m.probs))]
            w.writerow(row)
    return buf.getvalue()


def compare_rows(m: SourceModel, alphas: list[float], ts: list[float]) -> list[dict]:
    rows = []

    def add(name, alpha, t, real, integer):
        rows.append({
            "design": name,
            "alpha": fmt(alpha) if alpha is not None else "",
            "t": fmt(t) if t is not None else "",
            "max_length": fmt(np.max(real)),
            "avg_length": fmt(np.dot(real, m.probs)),
            "max_redundancy": fmt(max_redundancy(real, m)),
            "avg_redundancy": fmt(avg_redundancy(real, m)),
            "int_max_length": str(int(np.max(integer))),
            "int_avg_length": fmt(np.dot(integer, m.probs)),
            "lengths": " ".join(map(str, np.asarray(integer).tolist())),
        })

    for t in ts or [None]:
        payoff = "max-avg" if t is None else "exp-avg"
        for a in sorted(check_alpha(a) for a in alphas):
            real, _ = real_lengths(m, payoff, a, t)
            add(payoff, a, t, real.lengths, integer_lengths(real).lengths)
    huff = huffman_baseline(m).lengths
    add("huffman", None, None, huff.astype(float), huff)
    sh = shannon_lengths(m)
    add("shannon", None, None, sh, integer_lengths(sh).lengths)
    return rows


def compare_report(m: SourceModel, alphas: list[float], ts: list[float]) -> str:
    rows = compare_rows(m, alphas, ts)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def compress_bytes(data: bytes, payoff: str = "max-avg", alpha: float = 0.0, t: float | None = None) -> bytes:
    if not data:
        raise InputError("cannot compress an empty input")
    check_alpha(alpha)
    if needs_t(payoff):
        t = 1.0 if t is None else t
    else:
        t = None
    counts = byte_histogram(data)
    try:
        table = design(model_from_counts(counts), payoff, alpha, t).byte_table()
    except AlphabetTooSmall:
        # a single distinct byte still needs a 1-bit codeword
        table = {int(np.flatnonzero(counts)[0]): 1}
    if max(table.values()) > 255:
        raise InputError("code lengths above 255 bits cannot be stored")
    return container.write_container(data, table, alpha, t, payoff)


def decompress_bytes(blob: bytes) -> bytes:
    try:
        return container.read_container(blob)
    except KraftViolation as exc:
        raise ContainerError(str(exc)) from None


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    path = Path(out)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text)


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mocodes", description="Prefix codes trading off maximum against average length.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p):
        p.add_argument("input", help="raw file (byte histogram) or, with --counts, a text frequency file")
        p.add_argument("--counts", action="store_true", help="input is whitespace-separated counts, index = symbol id")

    def design_args(p):
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--t", type=float, default=None)
        p.add_argument("--payoff", choices=PAYOFFS, default="max-avg")

    p = sub.add_parser("design", help="print the code table for one design")
    model_args(p)
    design_args(p)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="CSV of weights across alpha")
    model_args(p)
    p.add_argument("--payoff", choices=PAYOFFS, default="max-avg")
    p.add_argument("--step", type=float, default=1 / 32)
    p.add_argument("--t", type=_floats, default=None, help="t values, comma separated")
    p.add_argument("--out")

    p = sub.add_parser("compress", help="write a GCC1 container")
    p.add_argument("input")
    design_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("decompress", help="restore a GCC1 container")
    p.add_argument("input")
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="length/redundancy report against Huffman and Shannon")
    model_args(p)
    p.add_argument("--alpha", type=_floats, default=[0.0, 0.25, 0.5, 0.75, 1.0], help="alpha values, comma separated")
    p.add_argument("--t", type=_floats, default=[], help="t values, comma separated")
    p.add_argument("--out")
    return parser


def run(args: argparse.Namespace) -> None:
    if args.command == "design":
        m = load_model(args.input, args.counts)
        _emit(design_document(m, args.payoff, args.alpha, args.t), args.out)
    elif args.command == "sweep":
        m = load_model(args.input, args.counts)
        _emit(sweep_csv(m, args.payoff, args.step, args.t), args.out)
    elif args.command == "compress":
        data = Path(args.input).read_bytes()
        _emit(compress_bytes(data, args.payoff, args.alpha, args.t), args.out)
    elif args.command == "decompress":
        _emit(decompress_bytes(Path(args.input).read_bytes()), args.out)
    elif args.command == "compare":
        m = load_model(args.input, args.counts)
        _emit(compare_report(m, args.alpha, args.t), args.out)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTAINER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``certify`` one pair or ``scan`` a range to JSONL."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Optional

from .bounds import CERTIFIED, FLAGGED, INCONCLUSIVE, NOT_APPLICABLE, certify_pair, condition_check
from .heights import PrecisionPolicy
from .ntutil import is_prime, primes_between

log = logging.getLogger("mwbasis")

EXIT_CODES = {CERTIFIED: 0, INCONCLUSIVE: 2, NOT_APPLICABLE: 3, FLAGGED: 4}
EXIT_USAGE = 1
WORKERS_ENV = "MWBASIS_WORKERS"

_num = {"type": "number"}
_opt_num = {"type": ["number", "null"]}
_int = {"type": "integer"}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": [
        "p", "q", "condition", "delta", "delta_prime", "delta_prime_squarefree",
        "minimal", "torsion_order", "h_p1", "h_p2", "h_sum", "regulator",
        "ub1", "ub2", "lb", "v_bound", "v_bound_sharp", "two_div",
        "searched_min_height", "verdict",
    ],
    "properties": {
        "p": _int,
        "q": _int,
        "condition": {"type": "boolean"},
        "delta": _int,
        "delta_prime": _int,
        "delta_prime_squarefree": {"type": ["boolean", "null"]},
        "minimal": {"type": ["boolean", "null"]},
        "torsion_order": {"type": ["integer", "null"]},
        "h_p1": _opt_num,
        "h_p2": _opt_num,
        "h_sum": _opt_num,
        "regulator": _opt_num,
        "H": _int,
        "ub1": _num,
        "ub2": _num,
        "lb": _num,
        "v_bound": _num,
        "v_bound_sharp": _opt_num,
        "two_div": {
            "type": ["object", "null"],
            "required": ["p1", "p2", "sum"],
            "properties": {k: {"type": "boolean"} for k in ("p1", "p2", "sum")},
        },
        "searched_points": {"type": ["integer", "null"]},
        "searched_min_height": _opt_num,
        "flags": {"type": "array", "items": {"type": "string"}},
        "verdict": {"enum": list(EXIT_CODES)},
    },
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["summary"],
    "properties": {
        "summary": {
            "type": "object",
            "required": ["pairs", *EXIT_CODES],
            "properties": {k: _int for k in ["pairs", *EXIT_CODES]},
        }
    },
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ScanConfig:
    p_min: int
    p_max: int
    q_min: int
    q_max: int
    require_condition: bool = True
    precision: float = 1e-9
    search_bound: int = 10_000
    out: Optional[str] = None
    workers: int = 1

    def validate(self) -> None:
        if min(self.p_min, self.q_min) < 7:
            raise UsageError("range bounds must be >= 7")
        if self.p_min > self.p_max or self.q_min > self.q_max:
            raise UsageError("empty or inverted range: min > max")
        if self.precision <= 0 or self.search_bound < 1 or self.workers < 1:
            raise UsageError("precision, search bound and workers must be positive")

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        for p in primes_between(self.p_min, self.p_max):
            for q in primes_between(self.q_min, self.q_max):
                if not self.require_condition or condition_check(p, q):
                    out.append((p, q))
        return out


def dumps(cert_dict: dict) -> str:
    return json.dumps(cert_dict, separators=(",", ":"))


def _certify_line(pair: tuple[int, int], precision: float, search_bound: int) -> str:
    cert = certify_pair(*pair, pp=PrecisionPolicy(precision), search_bound=search_bound)
    return dumps(cert.to_dict())


def scan_lines(cfg: ScanConfig) -> Iterable[str]:
    """Certificate lines in (p, q) order, then one summary line."""
    pairs = cfg.pairs()
    job = partial(_certify_line, precision=cfg.precision, search_bound=cfg.search_bound)
    counts = Counter({k: 0 for k in EXIT_CODES})
    if cfg.workers > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            # map yields in submission order, which is the sorted pair order
            results = pool.map(job, pairs, chunksize=4)
            for line in results:
                counts[json.loads(line)["verdict"]] += 1
                yield line
    else:
        for pair in pairs:
            line = job(pair)
            counts[json.loads(line)["verdict"]] += 1
            log.info("%s", line[:60])
            yield line
    yield dumps({"summary": {"pairs": len(pairs), **counts}})


def _check_prime(name: str, v: int) -> None:
    if v <= 5 or not is_prime(v):
        raise UsageError(f"{name}={v} must be a prime greater than 5")


def run_certify(p: int, q: int, precision: float = 1e-9, search_bound: int = 10_000, stream=None) -> int:
    stream = stream or sys.stdout
    _check_prime("p", p)
    _check_prime("q", q)
    cert = certify_pair(p, q, pp=PrecisionPolicy(precision), search_bound=search_bound)
    stream.write(dumps(cert.to_dict()) + "\n")
    return EXIT_CODES[cert.verdict]


def run_scan(cfg: ScanConfig, stream=None) -> int:
    cfg.validate()
    flagged = False
    fh = open(cfg.out, "w") if cfg.out else (stream or sys.stdout)
    try:
        for line in scan_lines(cfg):
            fh.write(line + "\n")
            fh.flush()
            if '"verdict":"flagged"' in line:
                flagged = True
    finally:
        if cfg.out:
            fh.close()
    return EXIT_CODES[FLAGGED] if flagged else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwbasis", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--precision", type=float, default=1e-9, help="height error budget")
        sp.add_argument("--search-bound", type=int, default=10_000, help="max |numerator| in point search")

    cert = sub.add_parser("certify", help="certify one pair (p, q)")
    cert.add_argument("p", type=int)
    cert.add_argument("q", type=int)
    common(cert)

    scan = sub.add_parser("scan", help="certify every prime pair in a range, as JSONL")
    scan.add_argument("--p-min", type=int, required=True)
    scan.add_argument("--p-max", type=int, required=True)
    scan.add_argument("--q-min", type=int, required=True)
    scan.add_argument("--q-max", type=int, required=True)
    scan.add_argument("--no-require-condition", dest="require_condition", action="store_false")
    scan.add_argument("--workers", type=int, default=None, help=f"default: ${WORKERS_ENV} or 1")
    scan.add_argument("--out", default=None, help="write JSONL here instead of stdout")
    common(scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "certify":
            return run_certify(args.p, args.q, args.precision, args.search_bound)
        workers = args.workers
        if workers is None:
            workers = int(os.environ.get(WORKERS_ENV, "1"))
        cfg = ScanConfig(
            args.p_min, args.p_max, args.q_min, args.q_max,
            require_condition=args.require_condition,
            precision=args.precision,
            search_bound=args.search_bound,
            out=args.out,
            workers=workers,
        )
        return run_scan(cfg)
    except UsageError as exc:
        print(f"mwbasis: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mwbasis: I/O error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())

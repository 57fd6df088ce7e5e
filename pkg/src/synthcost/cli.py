"""Command-line front end; a thin client over the service handlers.

Every subcommand builds the same request model the HTTP endpoint accepts and
dispatches in-process, so CLI and service cannot drift apart.  Exit codes:
0 success, 1 bad input, 2 computational failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from .errors import ComputationError, InputError, InvalidParams
from .service import handlers
from .service import models as m

_JSON_KW = dict(indent=2)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as InputError (exit code 1)."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        raise InvalidParams(message)


def build_parser() -> _Parser:
    p = _Parser(prog="synthcost", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def out_flags(sp: argparse.ArgumentParser, csv_ok: bool = True) -> None:
        sp.add_argument("-o", "--output", metavar="PATH", help="write result to a file")
        if csv_ok:
            sp.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")

    sp = sub.add_parser("capacity", help="growth rate and capacity of the constraint")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    out_flags(sp)

    sp = sub.add_parser("eigenvector", help="dominant right (and left) eigenvector")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--left", action="store_true", help="include the left eigenvector")
    out_flags(sp)

    sp = sub.add_parser("sample", help="sample strands from the max-entropy chain")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True, help="strand length")
    sp.add_argument("--m", type=int, required=True, help="number of strands")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--format", choices=["digits", "acgt"], default="digits")
    sp.add_argument("--threads", type=int, default=None)
    out_flags(sp, csv_ok=False)

    sp = sub.add_parser("cost", help="greedy synthesis cost of a strand file")
    sp.add_argument("--batch", required=True, metavar="PATH", help="one strand per line")
    sp.add_argument("--reference", required=True,
                    help="'canonical', 'periodic:<word>' or 'finite:<word>'")
    sp.add_argument("--format", choices=["digits", "acgt"], default="digits")
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--no-tau", action="store_true", help="omit per-strand positions")
    sp.add_argument("--allow-incomplete-reference", action="store_true")
    out_flags(sp)

    sp = sub.add_parser("scs", help="exact shortest common supersequence (small batches)")
    sp.add_argument("--batch", required=True, metavar="PATH")
    sp.add_argument("--format", choices=["digits", "acgt"], default="digits")
    sp.add_argument("--max-strands", type=int, default=4)
    out_flags(sp)

    sp = sub.add_parser("experiment", help="run a reproducible experiment")
    sp.add_argument("kind", choices=["theorem1", "dominance"])
    sp.add_argument("--config", required=True, metavar="PATH", help="JSON config file")
    sp.add_argument("--threads", type=int, default=None)
    out_flags(sp)

    sp = sub.add_parser("graph", help="export transfer-graph adjacency triples as CSV")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    out_flags(sp, csv_ok=False)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(model) -> str:
    return json.dumps(model.model_dump(by_alias=True), **_JSON_KW) + "\n"


def _csv_rows(header: list[str] | None, rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_lines(path: str) -> list[str]:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise InvalidParams(f"cannot read {path}: {exc}") from exc
    return [line for line in raw.splitlines() if line.strip()]


def _dispatch(args: argparse.Namespace) -> int:
    cmd = args.command

    if cmd == "capacity":
        resp = handlers.capacity(m.CapacityRequest(r=args.r, k=args.k, tol=args.tol))
        if args.csv:
            text = _csv_rows(
                ["r", "k", "lambda", "capacity"],
                [[resp.r, resp.k, repr(resp.growth_rate), repr(resp.capacity)]],
            )
        else:
            text = _json(resp)
        _emit(text, args.output)
        return 0

    if cmd == "eigenvector":
        resp = handlers.eigenvector(
            m.EigenvectorRequest(r=args.r, k=args.k, include_left=args.left)
        )
        if args.csv:
            if resp.xi is None:
                rows = [[i, repr(v)] for i, v in enumerate(resp.phi)]
                text = _csv_rows(["state", "phi"], rows)
            else:
                rows = [[i, repr(v), repr(x)] for i, (v, x) in enumerate(zip(resp.phi, resp.xi))]
                text = _csv_rows(["state", "phi", "xi"], rows)
        else:
            text = _json(resp)
        _emit(text, args.output)
        return 0

    if cmd == "sample":
        resp = handlers.sample(
            m.SampleRequest(
                r=args.r, k=args.k, n=args.n, m=args.m, seed=args.seed,
                format=args.format, threads=args.threads,
            )
        )
        _emit("\n".join(resp.strands) + "\n", args.output)
        return 0

    if cmd == "cost":
        resp = handlers.cost(
            m.CostRequest(
                strands=_read_lines(args.batch),
                reference=args.reference,
                format=args.format,
                r=args.r,
                include_tau=not args.no_tau,
                allow_incomplete_reference=args.allow_incomplete_reference,
            )
        )
        if args.csv:
            taus = resp.per_strand_tau or []
            rows = [[i, step + 1, tau] for i, ts in enumerate(taus) for step, tau in enumerate(ts)]
            text = _csv_rows(["strand", "step", "tau"], rows)
        else:
            text = _json(resp)
        _emit(text, args.output)
        return 0

    if cmd == "scs":
        resp = handlers.scs(
            m.ScsRequest(
                strands=_read_lines(args.batch),
                format=args.format,
                max_strands=args.max_strands,
            )
        )
        if args.csv:
            text = _csv_rows(["scs_length", "witness"], [[resp.scs_length, resp.witness]])
        else:
            text = _json(resp)
        _emit(text, args.output)
        return 0

    if cmd == "experiment":
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise InvalidParams(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"config is not valid JSON: {exc}") from exc
        resp = handlers.experiment(
            m.ExperimentRequest(kind=args.kind, config=raw, threads=args.threads)
        )
        if args.csv:
            rows = [[v.name, v.passed, v.detail] for v in resp.verdicts]
            text = _csv_rows(["verdict", "passed", "detail"], rows)
        else:
            text = _json(resp)
        _emit(text, args.output)
        return 0

    if cmd == "graph":
        resp = handlers.graph(m.GraphRequest(r=args.r, k=args.k))
        text = _csv_rows(None, [list(t) for t in resp.triples])
        _emit(text, args.output)
        return 0

    if cmd == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    raise InvalidParams(f"unknown command {cmd!r}")


def run(argv: list[str]) -> int:
    """Parse argv (no program name) and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(x) for x in first["loc"])
        print(f"error: {loc}: {first['msg']}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``adiafactor {encode,resources,factor,spectrum,sweep}``.

Exit codes: 0 on success, 1 for invalid input, 2 when an internal
invariant check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from importlib import resources as pkg_resources

import jsonschema

from . import __version__
from .analysis import spectrum_report
from .compiler import emit_qasm, resource_counts, synthesize_layer
from .hamiltonians import Model, build_F, problem_diagonal, problem_polynomial, to_pauli
from .instances import TABLE_NUMBERS, Instance, InstanceError, bitstring
from .qaoa import RunRecord, depth_sweep
from .simulator import PATTERNS, MixerSpec, default_pattern

log = logging.getLogger("adiafactor")

SCHEMA_ID = "adiafactor/run/1"
ENCODE_COLUMNS = ["N", "n", "p(p')", "q(q')", "n_p", "n_q", "p_bits", "q_bits", "solutions"]
RESOURCE_COLUMNS = [
    "N", "n", "cnots_qubo", "cnots_pubo", "rz_count_qubo", "rz_count_pubo",
    "rx_count_qubo", "rx_count_pubo",
]
SPECTRUM_COLUMNS = ["index", "bitstring", "energy", "abs_normalized_energy", "sorted_rank", "is_solution"]
SWEEP_COLUMNS = [
    "N", "n", "model", "seed", "layers", "c_min", "c_ratio_first", "fidelity",
    "confidence", "solution_rank",
]


class InvariantError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_schema() -> dict:
    text = pkg_resources.files("adiafactor").joinpath("data/run.schema.json").read_text()
    return json.loads(text)


def golden_table() -> str:
    return pkg_resources.files("adiafactor").joinpath("data/golden_instances.tsv").read_text()


def _write_rows(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def encode_row(inst: Instance) -> list:
    sols = inst.sorted_solutions()
    p, q = inst.decode(sols[0])
    pp, qq = (p - 1) // 2, (q - 1) // 2
    return [
        inst.N, inst.n, f"{p}({pp})", f"{q}({qq})", inst.n_p, inst.n_q,
        format(pp, f"0{inst.n_p}b"), format(qq, f"0{inst.n_q}b"),
        ",".join(bitstring(b, inst.n) for b in sols),
    ]


def resources_row(inst: Instance) -> list:
    counts = {m: resource_counts(to_pauli(problem_polynomial(inst, m))) for m in Model}
    return [
        inst.N, inst.n,
        counts[Model.QUBO]["cx"], counts[Model.PUBO]["cx"],
        counts[Model.QUBO]["rz"], counts[Model.PUBO]["rz"],
        counts[Model.QUBO]["rx"], counts[Model.PUBO]["rx"],
    ]


def run_document(inst: Instance, rec: RunRecord, layers: int) -> dict:
    return {
        "schema": SCHEMA_ID,
        "tool": {"name": "adiafactor", "version": __version__},
        "instance": {
            "N": inst.N,
            "n_p": inst.n_p,
            "n_q": inst.n_q,
            "solutions": [bitstring(b, inst.n) for b in inst.sorted_solutions()],
        },
        "config": {
            "model": rec.model,
            "layers": layers,
            "restarts": rec.restarts,
            "seed": rec.seed,
            "init": rec.pattern,
            "omega": rec.omega,
        },
        "n": rec.n,
        "model": rec.model,
        "depths": [asdict(d) for d in rec.depths],
    }


def validate_document(doc: dict) -> None:
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        raise InvariantError(f"result document violates schema: {exc.message}") from exc
    c = [d["c_min"] for d in doc["depths"]]
    if any(b > a for a, b in zip(c, c[1:])):
        raise InvariantError("C_min increased with depth")


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- subcommands ------------------------------------------------------------


def _instances(args) -> list[Instance]:
    if getattr(args, "all", False):
        return [Instance.from_number(N) for N in TABLE_NUMBERS]
    numbers = args.N if isinstance(args.N, list) else [args.N]
    if not numbers or numbers == [None]:
        raise InstanceError("give N or --all")
    return [Instance.from_number(N) for N in numbers]


def cmd_encode(args) -> int:
    rows = [encode_row(inst) for inst in _instances(args)]
    sys.stdout.write(_write_rows(ENCODE_COLUMNS, rows))
    return 0


def cmd_resources(args) -> int:
    insts = _instances(args)
    sys.stdout.write(_write_rows(RESOURCE_COLUMNS, [resources_row(i) for i in insts]))
    if args.emit_qasm:
        if len(insts) != 1:
            raise InstanceError("--emit-qasm needs a single N")
        model = Model(args.model)
        pauli = to_pauli(problem_polynomial(insts[0], model))
        circ = synthesize_layer(pauli, args.gamma, args.beta, model=model.value)
        _emit(emit_qasm(circ), args.emit_qasm)
    return 0


def cmd_factor(args) -> int:
    inst = Instance.from_number(args.N)
    model = Model(args.model)
    pattern = args.init or default_pattern(model)
    rec = depth_sweep(inst, model, args.layers, args.seed, args.restarts, pattern,
                      MixerSpec(args.omega), args.workers, args.top_k)
    doc = run_document(inst, rec, args.layers)
    validate_document(doc)
    if args.out:
        _emit(dump_document(doc), args.out)
    final = rec.final
    print(f"N={inst.N} model={model} layers={args.layers} C_min={final.c_min:.6g} "
          f"fidelity={final.fidelity:.6f} confidence={final.confidence:.6f}")
    for p in final.populations:
        mark = " *" if p["is_solution"] else ""
        print(f"  {p['bitstring']:>{inst.n}}  {p['probability']:.6f}{mark}")
    verdict = "yes" if final.solution_rank == 1 else f"no (rank {final.solution_rank})"
    print(f"solution ranked first: {verdict}")
    return 0


def cmd_spectrum(args) -> int:
    inst = Instance.from_number(args.N)
    d = problem_diagonal(inst, Model(args.model))
    rep = spectrum_report(d, inst)
    rows = [
        (b, s, f"{e:.17g}", f"{a:.17g}", r, int(sol)) for b, s, e, a, r, sol in rep.rows()
    ]
    _emit(_csv(SPECTRUM_COLUMNS, rows), args.out)
    return 0


def _sweep_row(job) -> list:
    N, model, seed, layers, restarts = job
    inst = Instance.from_number(N)
    rec = depth_sweep(inst, model, layers, seed, restarts)
    f = rec.final
    if f.c_min < 0 or not 0 <= f.confidence <= 1:
        raise InvariantError(f"metric out of range for N={N} {model} seed={seed}")
    return [N, inst.n, model, seed, layers, repr(f.c_min),
            "" if f.c_ratio_first is None else repr(f.c_ratio_first),
            repr(f.fidelity), repr(f.confidence), f.solution_rank]


def cmd_sweep(args) -> int:
    insts = _instances(args)
    jobs = [
        (inst.N, model.value, seed, args.layers, args.restarts)
        for inst in insts
        for model in sorted(Model, key=lambda m: m.value)
        for seed in range(args.seeds)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    _emit(_csv(SWEEP_COLUMNS, rows), args.out)
    return 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adiafactor", description="Digitized adiabatic factorization workbench.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="qubit encoding and solutions of N")
    p.add_argument("N", type=int, nargs="?")
    p.add_argument("--all", action="store_true", help="every tabulated instance")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("resources", help="per-layer gate counts for both models")
    p.add_argument("N", type=int, nargs="?")
    p.add_argument("--all", action="store_true")
    p.add_argument("--emit-qasm", metavar="PATH", help="write one layer as OpenQASM 2.0 ('-' for stdout)")
    p.add_argument("--model", choices=[m.value for m in Model], default="qubo")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.1)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("factor", help="QAOA depth sweep for one N")
    p.add_argument("N", type=int)
    p.add_argument("--model", choices=[m.value for m in Model], default="qubo")
    p.add_argument("--layers", type=_positive, default=10)
    p.add_argument("--restarts", type=_positive, default=10)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--init", choices=PATTERNS, default=None,
                   help="initial state (default: alternating for qubo, plus for pubo)")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--top-k", type=_positive, default=10)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", metavar="PATH", help="write the JSON result document")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("spectrum", help="normalized spectrum as CSV")
    p.add_argument("N", type=int)
    p.add_argument("--model", choices=[m.value for m in Model], default="qubo")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="final-depth metrics per (N, model, seed) as CSV")
    p.add_argument("N", type=int, nargs="*")
    p.add_argument("--all", action="store_true")
    p.add_argument("--layers", type=_positive, default=10)
    p.add_argument("--seeds", type=_positive, default=1, help="number of seeds, 0..K-1")
    p.add_argument("--restarts", type=_positive, default=10)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, ValueError) as exc:
        print(f"adiafactor: error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"adiafactor: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

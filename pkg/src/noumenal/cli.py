"""``noumenal`` command line: check, build and demo.

Exit codes: 0 success, 1 demo assertion failed, 2 axiom failure or refused
build, 3 the spec could not be loaded, 64 bad usage.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .construction import build_local_model
from .core import SamplingBudget
from .demo import DemoError, render_transcript, run_demo
from .errors import ConstructionRefused, NoumenalError, TheoryLoadError
from .quantum import QuantumTheory
from .speclang import LoadedTheory, load_file, resolve_spec_path
from .verify import MODEL_CHECKS, VerificationReport, verify_construction, verify_theory
from .verify.runner import CheckResult

EXIT_OK, EXIT_DEMO, EXIT_FAIL, EXIT_LOAD, EXIT_USAGE = 0, 1, 2, 3, 64
FORCED_WATERMARK = "FORCED BUILD: the theory failed verification; this output is not a sound model"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="noumenal", description="Verify no-signalling theories and build their local-realistic models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run the axiom catalogue against a spec")
    c.add_argument("spec", help="path to a .theory file or the name of a bundled spec")
    c.add_argument("--seed", type=int)
    c.add_argument("--samples", type=int)
    c.add_argument("--tolerance", type=float)
    c.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    c.add_argument("--table", action="store_true", help="also print a summary table to stderr")

    b = sub.add_parser("build", help="verify a spec and export its noumenal model")
    b.add_argument("spec")
    b.add_argument("--out", type=Path)
    b.add_argument("--force", action="store_true", help="build even if verification fails (output is watermarked)")
    b.add_argument("--seed", type=int)
    b.add_argument("--samples", type=int)

    d = sub.add_parser("demo", help="run a demo scenario from a spec")
    d.add_argument("spec")
    d.add_argument("scenario")
    d.add_argument("--out", type=Path, help="also write the transcript as JSON")
    d.add_argument("--seed", type=int)
    return p


def _env_seed() -> int | None:
    raw = os.environ.get("NOUMENAL_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise TheoryLoadError(f"NOUMENAL_SEED must be an integer, got {raw!r}") from None


def _load(args) -> LoadedTheory:
    seed = args.seed if args.seed is not None else _env_seed()
    return load_file(resolve_spec_path(args.spec), seed=seed, samples=getattr(args, "samples", None),
                     tolerance=getattr(args, "tolerance", None))


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def full_report(loaded: LoadedTheory, budget: SamplingBudget) -> VerificationReport:
    """Theory checks, then construction checks when the theory passed."""
    theory_report = verify_theory(loaded.theory, budget)
    if theory_report.passed:
        model = loaded.model_cls(loaded.theory, report=theory_report)
        return theory_report.merged(verify_construction(model, budget))
    reason = "construction refused: theory checks failed"
    skipped = [CheckResult(c.id, c.statement, "skipped", "none", seed=budget.seed, tolerance=budget.tolerance,
                           reason=reason) for c in MODEL_CHECKS]
    return theory_report.merged(VerificationReport("", skipped))


def cmd_check(args) -> int:
    loaded = _load(args)
    report = full_report(loaded, loaded.budget)
    report.subject = loaded.theory.name
    _emit(report.to_json(), args.out)
    if args.table:
        print(report.table(), file=sys.stderr)
    if not report.passed:
        for r in report.failures:
            print(f"FAIL {r.id}: {r.reason}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def quantum_manifest(model) -> dict:
    t = model.theory
    u = t.universe
    spot = []
    if u.site_count >= 2:
        first, second = u.labels[0], u.labels[1]
        z = t.embed(t.gate("Z", 0))
        cnot = t.embed(t.gate("CNOT", 0, 1))
        ident = t.identity(u.full)
        spot = [
            {"claim": f"[Z on {first}] ~_{second} [I]", "result": model.equivalent(z, ident, u.system(1))},
            {"claim": f"[CNOT {first}->{second}] ~_{first} [I]", "result": model.equivalent(cnot, ident, u.system(0))},
        ]
    return {
        "theory": t.name,
        "kind": "quantum",
        "sites": list(u.labels),
        "noumenal_states": "lazy handles (system, representative unitary)",
        "equivalence_oracle": {
            "test": "W1 W2^-1 = I^A x V up to global phase",
            "method": "partial trace over A, rescaled, then phase-aligned residual",
            "tolerance": t.tolerance,
        },
        "join": "common representative via leading operator-Schmidt factor on A",
        "spot_checks": spot,
    }


def cmd_build(args) -> int:
    loaded = _load(args)
    try:
        model = build_local_model(loaded.theory, loaded.budget, force=args.force, model_cls=loaded.model_cls)
    except ConstructionRefused as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_FAIL
    if isinstance(loaded.theory, QuantumTheory):
        out = quantum_manifest(model)
        out["forced"] = model.forced
    else:
        out = model.coset_table()
    if model.forced:
        out["watermark"] = FORCED_WATERMARK
        out["failing_checks"] = [r.id for r in model.report.failures]
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_demo(args) -> int:
    loaded = _load(args)
    result = run_demo(loaded, args.scenario)
    print(render_transcript(result))
    if args.out:
        _emit(_dump(result.to_dict()), args.out)
    if not result.passed:
        bad = result.first_failure
        print(f"assertion failed at line {bad['line']}: {bad['assertion']}", file=sys.stderr)
        return EXIT_DEMO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"check": cmd_check, "build": cmd_build, "demo": cmd_demo}[args.command]
    try:
        return handler(args)
    except TheoryLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LOAD
    except DemoError as e:
        print(f"demo error: {e}", file=sys.stderr)
        return EXIT_DEMO
    except NoumenalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

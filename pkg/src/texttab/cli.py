"""Command-line interface: extract, import, match, eval, serve, synth."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import synth as synth_mod
from .corpus import CorpusError, load_documents, split_sentences
from .embedding import EmbeddingError, SignalWeights
from .evaluation import (EvaluationError, load_ground_truth, oracle_feedback,
                         report_records, report_text, score_table)
from .extraction import (ExtractionError, export_interchange, extract_builtin,
                         import_interchange)
from .matching import (CONFIRM, REJECT, ExtractedTable, MatchingError,
                       SessionConfig, build_table, run_matching)
from .pipeline import PipelineError, build_context, make_sessions


class CliError(Exception):
    pass


def _add_match_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--docs", required=True)
    parser.add_argument("--nuggets", required=True)
    parser.add_argument("--vectors", required=True)
    parser.add_argument("--labelmap")
    parser.add_argument("--attributes", required=True,
                        help="comma-separated attribute names")
    defaults = SessionConfig()
    parser.add_argument("--budget", type=int, default=defaults.budget)
    parser.add_argument("--threshold", type=int, default=defaults.confirm_threshold)
    parser.add_argument("--k", type=int, default=defaults.k)
    parser.add_argument("--q0", type=float, default=defaults.q0)
    parser.add_argument("--tau", type=float, default=math.inf)
    parser.add_argument("--seed", type=int, default=defaults.seed)
    parser.add_argument("--w-label", type=float, default=1.0)
    parser.add_argument("--w-mention", type=float, default=1.0)
    parser.add_argument("--w-context", type=float, default=1.0)
    parser.add_argument("--w-position", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texttab",
        description="Turn a topic-focused document collection into a "
                    "user-defined table via interactive nugget matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the built-in rule extractors")
    p.add_argument("--docs", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("import", help="validate an interchange file and "
                                      "re-emit it with contexts filled")
    p.add_argument("--docs", required=True)
    p.add_argument("--nuggets", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("match", help="run interactive matching")
    _add_match_flags(p)
    p.add_argument("--feedback", choices=["oracle", "tty"], required=True)
    p.add_argument("--gt", help="ground truth (required for oracle feedback)")
    p.add_argument("--out", required=True, help="table output path")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--sessions-out", help="write final session states here")

    p = sub.add_parser("eval", help="score a table against ground truth")
    p.add_argument("--table", required=True, help="table in JSON format")
    p.add_argument("--gt", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--out", help="machine-readable score records path")

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8741)
    p.add_argument("--store", default=".texttab-sessions")

    p = sub.add_parser("synth", help="generate the planted-cluster benchmark")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--documents", type=int, default=200)

    return parser


def _cmd_extract(args) -> int:
    collection = load_documents(args.docs)
    nuggets = []
    for doc in collection:
        nuggets.extend(extract_builtin(doc, split_sentences(doc.text)))
    export_interchange(nuggets, args.out)
    print(f"wrote {len(nuggets)} nuggets to {args.out}")
    return 0


def _cmd_import(args) -> int:
    collection = load_documents(args.docs)
    nuggets = import_interchange(args.nuggets, collection)
    export_interchange(nuggets, args.out)
    print(f"validated {len(nuggets)} nuggets, wrote {args.out}")
    return 0


def _session_config(args) -> SessionConfig:
    return SessionConfig(k=args.k, confirm_threshold=args.threshold,
                         budget=args.budget, q0=args.q0, tau=args.tau,
                         seed=args.seed)


def _tty_feedback(ctx):
    def ask(candidate):
        nugget = ctx.nugget(candidate.nugget_id)
        print(f"\n[{nugget.document_id}] {nugget.mention!r} "
              f"(label {nugget.label}, distance {candidate.distance:.4f})")
        print(f"  context: {nugget.context_sentence}")
        while True:
            answer = input("  match? [y/n] ").strip().lower()
            if answer in ("y", "yes"):
                return CONFIRM
            if answer in ("n", "no"):
                return REJECT
    return ask


def _cmd_match(args) -> int:
    weights = SignalWeights(w_label=args.w_label, w_mention=args.w_mention,
                            w_context=args.w_context, w_position=args.w_position)
    attributes = [a for a in args.attributes.split(",") if a]
    ctx = build_context(args.docs, args.nuggets, args.vectors, attributes,
                        _session_config(args), weights,
                        labelmap_path=args.labelmap)
    if ctx.skipped_oov:
        print(f"note: {ctx.skipped_oov} nuggets skipped (all signals out of "
              f"vocabulary)", file=sys.stderr)
    sessions = make_sessions(ctx)
    for attr_name, session in sessions.items():
        if args.feedback == "oracle":
            if not args.gt:
                raise CliError("--feedback oracle requires --gt")
            gt = load_ground_truth(args.gt)
            feedback = lambda cand, a=attr_name: oracle_feedback(
                gt, a, ctx.nugget(cand.nugget_id))
        else:
            feedback = _tty_feedback(ctx)
        run_matching(session, feedback)
        print(f"{attr_name}: {session.confirmed_count} confirmed, "
              f"{session.interactions_used} interactions ({session.done_reason})")
    table = build_table(ctx.collection, ctx.nuggets, ctx.embeddings, sessions)
    out = Path(args.out)
    if args.format == "csv":
        out.write_text(table.to_csv(), encoding="utf-8")
    else:
        out.write_text(table.to_json(), encoding="utf-8")
    if args.sessions_out:
        payload = {name: session.to_dict() for name, session in sessions.items()}
        Path(args.sessions_out).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote table to {out}")
    return 0


def _cmd_eval(args) -> int:
    table = ExtractedTable.from_json(Path(args.table).read_text(encoding="utf-8"))
    gt = load_ground_truth(args.gt)
    collection = load_documents(args.docs)
    scores, macro_f1 = score_table(table, gt, collection)
    sys.stdout.write(report_text(scores, macro_f1))
    if args.out:
        Path(args.out).write_text(report_records(scores, macro_f1), encoding="utf-8")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(args.store), host=args.host, port=args.port)
    return 0


def _cmd_synth(args) -> int:
    bench = synth_mod.generate(args.seed, n_documents=args.documents)
    paths = synth_mod.write_benchmark(bench, args.out)
    print(f"benchmark written to {args.out} "
          f"({len(bench.collection)} documents, {len(bench.nuggets)} nuggets, "
          f"margin {bench.margin:.3f})")
    print(f"attributes: {','.join(bench.attributes)}")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


_COMMANDS = {
    "extract": _cmd_extract,
    "import": _cmd_import,
    "match": _cmd_match,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
    "synth": _cmd_synth,
}


def run_command(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CliError, CorpusError, ExtractionError, EmbeddingError,
            MatchingError, EvaluationError, PipelineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()

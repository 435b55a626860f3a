"""Command-line entry point wiring the toolkit modules into pipelines.

Exit codes: 0 success, 1 validation/domain failure, 2 I/O or usage error.
Every command is deterministic given its inputs and flags (bench's
wall-clock fields excepted); ``--jobs`` never changes output order.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from types import SimpleNamespace

from docsimp.align import align_texts, reconstruct_source
from docsimp.clean import clean_corpus
from docsimp.core import AnnotationRecord, EditCategory, OpTag, TaggedOperations
from docsimp.corpus import (
    annotation_to_dict,
    read_annotations,
    read_candidates,
    read_labels,
    read_pairs,
    read_revisions,
    read_scores,
    read_sequences,
    write_jsonl,
    write_matches,
    write_pairs,
    write_revisions,
    write_sequences,
)
from docsimp.identify import (
    PIPELINES,
    CategoryModeTable,
    derive_category_modes,
    load_predictions,
    run_pipeline,
)
from docsimp.ingest import (
    CachingTransport,
    IngestionConfig,
    default_transport,
    fetch_paired_titles,
    fetch_revisions,
)
from docsimp.markup import parse_markup, serialize_markup
from docsimp.match import (
    MatcherConfig,
    calibrate_threshold,
    evaluate_at_threshold,
    match_revisions,
    resolve_scorer,
    score_pairs,
)
from docsimp.metrics import (
    build_agreement_report,
    build_generation_report,
    build_identification_report,
    corpus_stats,
)
from docsimp.report import FORMATS, render_report
from docsimp.synth import make_pair_corpus

logger = logging.getLogger("docsimp.cli")


# ---------------------------------------------------------------------------
# small shared helpers

def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_report(report, args, stem: str) -> None:
    _emit(render_report(report, args.format), args.out)
    figures_dir = getattr(args, "figures", None)
    if figures_dir:
        from docsimp.plots import render_figures  # matplotlib import is slow

        for path in render_figures(report, Path(figures_dir), stem=stem):
            print(f"wrote {path}", file=sys.stderr)


def _pmap(fn, items, jobs: int):
    """Order-preserving map, optionally across processes."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _groups_by_pair(records) -> dict[str, list]:
    """Last record per pair wins, mirroring the agreement module's reader."""
    latest: dict[str, AnnotationRecord] = {}
    for rec in records:
        latest[rec.pair_id] = rec
    return {pid: list(rec.groups) for pid, rec in latest.items()}


def _tags_to_rows(tags: TaggedOperations) -> list[dict]:
    rows = []
    for op_index in tags.tagged_indices():
        for tag in tags.tags[op_index]:
            rows.append(
                {
                    "op_index": op_index,
                    "category": tag.category.value,
                    "flag": tag.flag,
                    "p_b": tag.p_b,
                    "p_i": tag.p_i,
                }
            )
    return rows


def _tags_from_rows(pair_id: str, rows: list[dict]) -> TaggedOperations:
    staged: dict[int, list[OpTag]] = {}
    for row in rows:
        staged.setdefault(row["op_index"], []).append(
            OpTag(
                category=EditCategory(row["category"]),
                flag=row["flag"],
                p_b=row["p_b"],
                p_i=row["p_i"],
            )
        )
    return TaggedOperations(pair_id=pair_id, tags={k: tuple(v) for k, v in staged.items()})


# ---------------------------------------------------------------------------
# process-pool workers (top level so they pickle)

def _align_worker(item: tuple[str, str, str]) -> dict:
    pair_id, complex_text, simple_text = item
    seq = align_texts(complex_text, simple_text, pair_id=pair_id)
    return {"pair_id": pair_id, "markup": serialize_markup(seq)}


def _identify_worker(item: tuple[str, str, str, dict | None, list | None]) -> dict:
    pair_id, markup, pipeline, modes_json, tag_rows = item
    seq = parse_markup(markup, pair_id=pair_id)
    modes = CategoryModeTable.from_json(modes_json) if modes_json is not None else None
    predictions = None
    if tag_rows is not None:
        predictions = {pair_id: _tags_from_rows(pair_id, tag_rows)}
    _, groups = run_pipeline(pipeline, seq, predictions=predictions, modes=modes)
    record = AnnotationRecord(pair_id=pair_id, annotator_id=pipeline, groups=tuple(groups))
    return annotation_to_dict(record)


# ---------------------------------------------------------------------------
# subcommands

def cmd_align(args) -> int:
    pairs = read_pairs(args.pairs)
    items = [(p.pair_id, p.complex.text, p.simple.text) for p in pairs]
    rows = _pmap(_align_worker, items, args.jobs)
    write_jsonl(args.out, rows)
    print(f"aligned {len(rows)} pairs -> {args.out}", file=sys.stderr)
    return 0


def cmd_match(args) -> int:
    sew = read_revisions(args.sew)
    ew = read_revisions(args.ew)
    external = read_scores(args.external) if args.external else None
    config = MatcherConfig(
        scorer_id=args.scorer,
        threshold=args.threshold,
        dedup_similarity_max=args.dedup_max,
    )
    scorer = resolve_scorer(args.scorer, external)
    matched = match_revisions(sew, ew, config, scorer=scorer)
    write_matches(args.out, matched)
    print(
        f"matched {len(matched)} of {len(sew)} simple revisions -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_calibrate(args) -> int:
    if args.scores:
        if args.sew or args.ew:
            raise ValueError("--scores and --sew/--ew are mutually exclusive")
        scores = read_scores(args.scores)
        labels = read_labels(args.labels)
        shared = [k for k in scores if k in labels]
        if not shared:
            raise ValueError("no pair_id appears in both scores and labels")
        scored = [SimpleNamespace(score=scores[k], label=labels[k]) for k in shared]
        scorer_id = args.scorer or "external"
    else:
        if not (args.sew and args.ew):
            raise ValueError("calibrate needs either --scores or both --sew and --ew")
        external = read_scores(args.external) if args.external else None
        scored = score_pairs(
            read_revisions(args.sew),
            read_revisions(args.ew),
            args.scorer or "levenshtein",
            labels=read_labels(args.labels),
            external=external,
        )
        scored = [s for s in scored if s.label is not None]
        scorer_id = args.scorer or "levenshtein"
    threshold = calibrate_threshold(scored)
    precision, recall, f1 = evaluate_at_threshold(scored, threshold)
    report = {
        "scorer_id": scorer_id,
        "threshold": threshold,
        "n_labeled": len(scored),
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }
    _emit(render_report(report, args.format), args.out)
    return 0


def _resolve_modes(args, seqs) -> dict | None:
    """Mode table as plain JSON (worker payloads stay picklable primitives)."""
    if args.modes:
        import json

        with open(args.modes, "r", encoding="utf-8") as fh:
            return CategoryModeTable.from_json(json.load(fh)).to_json()
    if args.annotations:
        annotations = read_annotations(args.annotations)
        return derive_category_modes(annotations, seqs).to_json()
    return None


def cmd_identify(args) -> int:
    seqs = read_sequences(args.pairs)
    predictions = None
    if args.pred:
        predictions = load_predictions(args.pred, seqs)
    elif not args.pipeline.startswith("op-majority"):
        raise ValueError(f"pipeline {args.pipeline!r} needs --pred")
    modes_json = None
    if args.pipeline.endswith("+rules"):
        modes_json = _resolve_modes(args, seqs)
        if modes_json is None:
            raise ValueError("rules grouping needs --modes or --annotations")
    items = []
    for pair_id, seq in seqs.items():
        tag_rows = None
        if predictions is not None:
            tags = predictions.get(pair_id)
            tag_rows = _tags_to_rows(tags) if tags is not None else []
        items.append(
            (pair_id, serialize_markup(seq), args.pipeline, modes_json, tag_rows)
        )
    rows = _pmap(_identify_worker, items, args.jobs)
    write_jsonl(args.out, rows)
    print(
        f"identified groups for {len(rows)} pairs with {args.pipeline} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_evaluate(args) -> int:
    pred = _groups_by_pair(read_annotations(args.pred))
    ref = _groups_by_pair(read_annotations(args.ref))
    report = build_identification_report(pred, ref)
    _emit_report(report, args, stem="evaluate")
    return 0


def cmd_agreement(args) -> int:
    annotations = read_annotations(args.annotations)
    seqs = read_sequences(args.pairs) if args.pairs else None
    report = build_agreement_report(annotations, seqs=seqs, unit=args.unit)
    _emit_report(report, args, stem="agreement")
    return 0


def cmd_stats(args) -> int:
    annotations = read_annotations(args.annotations)
    seqs = read_sequences(args.pairs)
    report = corpus_stats(annotations, seqs)
    _emit_report(report, args, stem="stats")
    return 0


def cmd_clean(args) -> int:
    seqs = read_sequences(args.pairs)
    groups = _groups_by_pair(read_annotations(args.annotations))
    cleaned_texts, stats = clean_corpus(seqs.values(), groups)
    cleaned_seqs = [
        align_texts(reconstruct_source(seq), cleaned_texts[pair_id], pair_id=pair_id)
        for pair_id, seq in seqs.items()
    ]
    write_sequences(args.out, cleaned_seqs)
    _emit(render_report(stats, args.format), None)
    print(f"cleaned corpus -> {args.out}", file=sys.stderr)
    return 0


def cmd_genmetrics(args) -> int:
    pairs = read_pairs(args.pairs)
    candidates = read_candidates(args.candidates) if args.candidates else None
    docs = []
    for p in pairs:
        if candidates is None:
            candidate = p.simple.text
        else:
            if p.pair_id not in candidates:
                raise ValueError(f"no candidate text for pair {p.pair_id!r}")
            candidate = candidates[p.pair_id]
        docs.append((p.complex.text, candidate, [p.simple.text]))
    category_counts = None
    if args.annotations:
        category_counts = {}
        for rec in read_annotations(args.annotations):
            for group in rec.groups:
                category_counts[group.category] = category_counts.get(group.category, 0) + 1
    report = build_generation_report(docs, category_counts=category_counts)
    _emit_report(report, args, stem="genmetrics")
    return 0


def cmd_bench(args) -> int:
    seqs = read_sequences(args.pairs)
    predictions = load_predictions(args.pred, seqs) if args.pred else None
    modes = None
    if args.pipeline.endswith("+rules"):
        modes_json = _resolve_modes(args, seqs)
        if modes_json is None:
            raise ValueError("rules grouping needs --modes or --annotations")
        modes = CategoryModeTable.from_json(modes_json)
    start = time.perf_counter()
    for _ in range(args.repeat):
        for seq in seqs.values():
            run_pipeline(args.pipeline, seq, predictions=predictions, modes=modes)
    elapsed = time.perf_counter() - start
    n_docs = len(seqs) * args.repeat
    report = {
        "pipeline": args.pipeline,
        "n_docs": n_docs,
        "seconds": elapsed,
        "docs_per_second": (n_docs / elapsed) if elapsed > 0 else float("inf"),
    }
    _emit(render_report(report, args.format), args.out)
    return 0


def cmd_fetch(args) -> int:
    config = IngestionConfig(
        api_base_url=args.api_url,
        sitelink_api_url=args.sitelink_url,
        request_rate_limit=args.rate_limit,
        cache_dir=Path(args.cache) if args.cache else None,
    )
    if args.offline:
        if not args.cache:
            raise ValueError("--offline needs --cache")
        transport = CachingTransport(Path(args.cache), inner=None)
    else:
        transport = default_transport(config)
    if args.title:
        revisions = []
        for title in args.title:
            revisions.extend(
                fetch_revisions(
                    title, config, source_wiki=args.source_wiki, transport=transport
                )
            )
        write_revisions(args.out, revisions)
        print(
            f"fetched {len(revisions)} revisions for {len(args.title)} titles -> {args.out}",
            file=sys.stderr,
        )
        return 0
    if args.entity_ids or args.category:
        entity_ids = args.entity_ids.split(",") if args.entity_ids else None
        titles = fetch_paired_titles(
            config, entity_ids=entity_ids, category=args.category, transport=transport
        )
        write_jsonl(
            args.out,
            ({"complex_title": c, "simple_title": s} for c, s in titles),
        )
        print(f"found {len(titles)} paired titles -> {args.out}", file=sys.stderr)
        return 0
    raise ValueError("fetch needs --title, --entity-ids, or --category")


def cmd_serve(args) -> int:
    import uvicorn

    from docsimp.service import AnnotationStore, create_app

    seqs = read_sequences(args.pairs)
    store = AnnotationStore(seqs, log_path=args.log)
    app = create_app(store, annotator_token=args.token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_synth(args) -> int:
    pairs = make_pair_corpus(args.n, seed=args.seed)
    write_pairs(args.out, pairs)
    seqs = None
    if args.sequences or args.annotations:
        seqs = [
            align_texts(p.complex.text, p.simple.text, pair_id=p.pair_id) for p in pairs
        ]
    if args.sequences:
        write_sequences(args.sequences, seqs)
    if args.annotations:
        rng = random.Random(args.seed + 1)
        categories = list(EditCategory)
        records = []
        for seq in seqs:
            _, groups = run_pipeline("op-majority+adjacent", seq)
            records.append(
                AnnotationRecord(
                    pair_id=seq.pair_id, annotator_id="ann-a", groups=tuple(groups)
                )
            )
            noisy = [
                g
                if rng.random() > 0.25
                else type(g)(category=rng.choice(categories), op_indices=g.op_indices)
                for g in groups
            ]
            records.append(
                AnnotationRecord(
                    pair_id=seq.pair_id, annotator_id="ann-b", groups=tuple(noisy)
                )
            )
        write_jsonl(args.annotations, (annotation_to_dict(r) for r in records))
    print(f"generated {len(pairs)} synthetic pairs -> {args.out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="json", help="report format")
    p.add_argument("--out", default=None, help="write report here instead of stdout")
    p.add_argument("--figures", default=None, metavar="DIR", help="also render PNG figures into DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docsimp",
        description="Document-level simplification editing toolkit.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("align", help="align complex/simple pairs into edit sequences")
    p.add_argument("--pairs", required=True, help="document pairs (JSONL)")
    p.add_argument("--out", required=True, help="alignment sequences output (JSONL)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("match", help="match simple revisions to complex revisions")
    p.add_argument("--sew", required=True, help="simple-wiki revisions (JSONL)")
    p.add_argument("--ew", required=True, help="complex-wiki revisions (JSONL)")
    p.add_argument("--scorer", default="levenshtein", help="scorer id")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--dedup-max", type=float, default=0.3, help="max char similarity between accepted simple texts")
    p.add_argument("--external", default=None, help="external scores (JSONL) for scorer=external")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("calibrate", help="pick the F1-optimal alignment threshold")
    p.add_argument("--scores", default=None, help="pre-scored pairs (JSONL)")
    p.add_argument("--labels", required=True, help="gold aligned/unaligned labels (JSONL)")
    p.add_argument("--sew", default=None, help="simple revisions, to score in-process")
    p.add_argument("--ew", default=None, help="complex revisions, to score in-process")
    p.add_argument("--scorer", default=None)
    p.add_argument("--external", default=None)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("identify", help="tag and group edit operations")
    p.add_argument("--pairs", required=True, help="alignment sequences (JSONL)")
    p.add_argument("--pipeline", required=True, choices=PIPELINES)
    p.add_argument("--pred", default=None, help="per-op category predictions (JSONL)")
    p.add_argument("--modes", default=None, help="category mode table (JSON)")
    p.add_argument("--annotations", default=None, help="annotations to derive modes from")
    p.add_argument("--out", required=True, help="predicted groups output (JSONL)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("evaluate", help="score predicted groups against references")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    _add_report_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("agreement", help="inter-annotator agreement report")
    p.add_argument("--annotations", required=True)
    p.add_argument("--pairs", default=None, help="sequences (needed for unit=operation)")
    p.add_argument("--unit", choices=("document", "operation"), default="document")
    _add_report_flags(p)
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("stats", help="corpus-level annotation statistics")
    p.add_argument("--annotations", required=True)
    p.add_argument("--pairs", required=True)
    _add_report_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("clean", help="revert non-simplification edits")
    p.add_argument("--pairs", required=True, help="alignment sequences (JSONL)")
    p.add_argument("--annotations", required=True, help="edit groups per pair (JSONL)")
    p.add_argument("--out", required=True, help="cleaned alignment sequences (JSONL)")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("genmetrics", help="SARI/FKGL/compression over documents")
    p.add_argument("--pairs", required=True, help="document pairs (JSONL)")
    p.add_argument("--candidates", default=None, help="system outputs (JSONL), defaults to the simple side")
    p.add_argument("--annotations", default=None, help="groups for the category profile")
    _add_report_flags(p)
    p.set_defaults(func=cmd_genmetrics)

    p = sub.add_parser("bench", help="identification pipeline throughput (docs/s)")
    p.add_argument("--pairs", required=True, help="alignment sequences (JSONL)")
    p.add_argument("--pipeline", required=True, choices=PIPELINES)
    p.add_argument("--pred", default=None)
    p.add_argument("--modes", default=None)
    p.add_argument("--annotations", default=None)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("fetch", help="fetch revisions or paired titles from the wiki APIs")
    p.add_argument("--title", action="append", default=None, help="page title (repeatable)")
    p.add_argument("--source-wiki", choices=("complex", "simple"), default="complex")
    p.add_argument("--entity-ids", default=None, help="comma-separated entity ids")
    p.add_argument("--category", default=None, help="complex-wiki category name")
    defaults = IngestionConfig()
    p.add_argument("--api-url", default=defaults.api_base_url)
    p.add_argument("--sitelink-url", default=defaults.sitelink_api_url)
    p.add_argument("--rate-limit", type=float, default=1.0, help="requests per second")
    p.add_argument("--cache", default=None, help="response cache directory")
    p.add_argument("--offline", action="store_true", help="serve everything from the cache")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--pairs", required=True, help="alignment sequences (JSONL)")
    p.add_argument("--log", default=None, help="append-only event log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8702)
    p.add_argument("--token", default=None, help="require this X-Annotator-Token header on writes")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="document pairs output (JSONL)")
    p.add_argument("--sequences", default=None, help="also write aligned sequences here")
    p.add_argument("--annotations", default=None, help="also write two-annotator silver annotations here")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed usage/help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except OSError as exc:
        print(f"docsimp: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"docsimp: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

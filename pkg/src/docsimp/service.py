"""HTTP annotation service.

Serves alignment sequences to annotators, persists their edit-group
annotations, and reports progress and agreement.  State lives in an
append-only JSONL event log; replaying the log reproduces the store
exactly, so the file doubles as the audit trail.  Mutations are
serialized through a single writer lock and guarded by per-pair
optimistic versioning (stale ``if_version`` -> 409).
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from fastapi import Body, FastAPI, Header, HTTPException, Query

from docsimp.core import (
    AlignmentSequence,
    AnnotationRecord,
    PairMismatchError,
    TAXONOMY,
    validate_annotation,
)
from docsimp.corpus import (
    SchemaError,
    annotation_from_dict,
    annotation_to_dict,
    dumps_canonical,
    read_jsonl,
)
from docsimp.markup import serialize_markup
from docsimp.metrics import build_agreement_report

STATUSES = ("unassigned", "in_progress", "complete", "flagged_unaligned")


class VersionConflictError(Exception):
    def __init__(self, current_version: int):
        super().__init__(f"stale if_version; current version is {current_version}")
        self.current_version = current_version


class AnnotationInvalidError(Exception):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True, slots=True)
class PairState:
    """Snapshot of one pair's assignment/annotation state."""

    seq: AlignmentSequence
    version: int = 0
    assigned_to: tuple[str, ...] = ()
    flagged_by: frozenset[str] = frozenset()
    annotations: Mapping[str, AnnotationRecord] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.flagged_by or any(r.unaligned_flag for r in self.annotations.values()):
            return "flagged_unaligned"
        if self.annotations:
            return "complete"
        if self.assigned_to:
            return "in_progress"
        return "unassigned"

    def to_summary(self) -> dict:
        return {
            "pair_id": self.seq.pair_id,
            "status": self.status,
            "assigned_to": list(self.assigned_to),
            "annotators_done": sorted(self.annotations),
            "version": self.version,
        }


class AnnotationStore:
    """Event-sourced annotation state over a fixed set of alignment sequences.

    Every accepted mutation appends one event line to ``log_path`` (when
    given) and bumps the pair's version.  Construction replays an existing
    log so restarts lose nothing.
    """

    def __init__(
        self,
        seqs: Iterable[AlignmentSequence] | Mapping[str, AlignmentSequence],
        log_path: str | Path | None = None,
    ):
        if isinstance(seqs, Mapping):
            seqs = seqs.values()
        self._pairs: dict[str, PairState] = {}
        for seq in seqs:
            if seq.pair_id in self._pairs:
                raise ValueError(f"duplicate pair_id {seq.pair_id!r}")
            self._pairs[seq.pair_id] = PairState(seq=seq)
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path is not None else None
        if self._log_path is not None and self._log_path.exists():
            for lineno, event in read_jsonl(self._log_path):
                try:
                    self._apply(event)
                except (KeyError, SchemaError) as exc:
                    raise SchemaError(f"event log line {lineno}: {exc}") from exc

    # -- reads ------------------------------------------------------------

    def pair_ids(self) -> list[str]:
        return list(self._pairs)

    def get(self, pair_id: str) -> PairState | None:
        return self._pairs.get(pair_id)

    def states(self) -> list[PairState]:
        return list(self._pairs.values())

    def records(self) -> list[AnnotationRecord]:
        out: list[AnnotationRecord] = []
        for state in self._pairs.values():
            out.extend(state.annotations.values())
        return out

    def sequences(self) -> dict[str, AlignmentSequence]:
        return {pid: st.seq for pid, st in self._pairs.items()}

    # -- event machinery --------------------------------------------------

    def _apply(self, event: dict) -> PairState:
        kind = event.get("event")
        pair_id = event.get("pair_id")
        if not isinstance(pair_id, str) or pair_id not in self._pairs:
            raise KeyError(f"unknown pair {pair_id!r}")
        state = self._pairs[pair_id]
        if kind == "annotation":
            record = annotation_from_dict(event["record"])
            annotations = dict(state.annotations)
            annotations[record.annotator_id] = record
            state = replace(state, annotations=annotations, version=state.version + 1)
        elif kind == "flag":
            flagged = state.flagged_by | {str(event["annotator_id"])}
            state = replace(state, flagged_by=flagged, version=state.version + 1)
        elif kind == "assign":
            assigned = state.assigned_to + (str(event["annotator_id"]),)
            state = replace(state, assigned_to=assigned, version=state.version + 1)
        else:
            raise SchemaError(f"unknown event type {kind!r}")
        self._pairs[pair_id] = state
        return state

    def _commit(self, event: dict) -> PairState:
        """Append to the log, then apply. Caller must hold the lock."""
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(dumps_canonical(event) + "\n")
        return self._apply(event)

    # -- mutations ---------------------------------------------------------

    def submit_annotation(
        self, pair_id: str, record: AnnotationRecord, if_version: int | None = None
    ) -> PairState:
        with self._lock:
            state = self._pairs.get(pair_id)
            if state is None:
                raise KeyError(pair_id)
            if if_version is not None and if_version != state.version:
                raise VersionConflictError(state.version)
            violations = validate_annotation(record, state.seq)
            if violations:
                raise AnnotationInvalidError(violations)
            event = {
                "event": "annotation",
                "pair_id": pair_id,
                "record": annotation_to_dict(record),
            }
            return self._commit(event)

    def flag_unaligned(
        self, pair_id: str, annotator_id: str, if_version: int | None = None
    ) -> PairState:
        with self._lock:
            state = self._pairs.get(pair_id)
            if state is None:
                raise KeyError(pair_id)
            if annotator_id in state.flagged_by:  # idempotent
                return state
            if if_version is not None and if_version != state.version:
                raise VersionConflictError(state.version)
            event = {"event": "flag", "pair_id": pair_id, "annotator_id": annotator_id}
            return self._commit(event)

    def assign(
        self,
        annotators: list[str],
        overlap_fraction: float = 0.25,
        seed: int | None = None,
    ) -> dict:
        """Randomly hand out unassigned pairs round-robin.

        A ``overlap_fraction`` share of them also gets a second annotator so
        agreement can be measured.
        """
        if not annotators or len(set(annotators)) != len(annotators):
            raise ValueError("annotators must be a non-empty list without duplicates")
        if not 0.0 <= overlap_fraction <= 1.0:
            raise ValueError("overlap_fraction must be in [0, 1]")
        with self._lock:
            todo = [pid for pid, st in self._pairs.items() if not st.assigned_to]
            rng = random.Random(seed)
            rng.shuffle(todo)
            n_overlap = (
                math.ceil(len(todo) * overlap_fraction) if len(annotators) > 1 else 0
            )
            for i, pair_id in enumerate(todo):
                first = annotators[i % len(annotators)]
                self._commit(
                    {"event": "assign", "pair_id": pair_id, "annotator_id": first}
                )
                if i < n_overlap:
                    second = annotators[(i + 1) % len(annotators)]
                    self._commit(
                        {"event": "assign", "pair_id": pair_id, "annotator_id": second}
                    )
            return {"assigned": len(todo), "double_assigned": n_overlap}


def _pair_detail(state: PairState) -> dict:
    seq = state.seq
    detail = state.to_summary()
    detail["markup"] = serialize_markup(seq)
    detail["operations"] = [
        {"index": op.index, "kind": op.kind, "tokens": list(op.tokens)}
        for op in seq.operations
    ]
    detail["annotations"] = [
        annotation_to_dict(state.annotations[a]) for a in sorted(state.annotations)
    ]
    return detail


def create_app(store: AnnotationStore, annotator_token: str | None = None) -> FastAPI:
    """Build the FastAPI app around a store.

    When ``annotator_token`` is set, mutating endpoints require the
    ``X-Annotator-Token`` header to match it.
    """
    app = FastAPI(title="docsimp annotation service", version="0.1.0")

    def check_token(token: str | None) -> None:
        if annotator_token is not None and token != annotator_token:
            raise HTTPException(status_code=401, detail="missing or bad annotator token")

    def get_state_or_404(pair_id: str) -> PairState:
        state = store.get(pair_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown pair {pair_id!r}")
        return state

    @app.get("/api/taxonomy")
    def taxonomy() -> list[dict]:
        return [
            {
                "category": info.category.value,
                "edit_class": info.edit_class.value,
                "definition": info.definition,
                "example": info.example,
            }
            for info in TAXONOMY
        ]

    @app.get("/api/pairs")
    def list_pairs(
        status: str | None = Query(default=None),
        annotator: str | None = Query(default=None),
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
    ) -> dict:
        if status is not None and status not in STATUSES:
            raise HTTPException(
                status_code=422, detail=f"unknown status {status!r}; expected {STATUSES}"
            )
        states = store.states()
        if status is not None:
            states = [s for s in states if s.status == status]
        if annotator is not None:
            states = [s for s in states if annotator in s.assigned_to]
        page = states[offset : offset + limit]
        return {
            "total": len(states),
            "offset": offset,
            "limit": limit,
            "items": [s.to_summary() for s in page],
        }

    @app.get("/api/pairs/{pair_id}")
    def get_pair(pair_id: str) -> dict:
        return _pair_detail(get_state_or_404(pair_id))

    @app.post("/api/pairs/{pair_id}/annotation")
    def post_annotation(
        pair_id: str,
        payload: dict = Body(...),
        x_annotator_token: str | None = Header(default=None),
    ) -> dict:
        check_token(x_annotator_token)
        state = get_state_or_404(pair_id)
        if_version = payload.pop("if_version", None)
        if if_version is not None and not isinstance(if_version, int):
            raise HTTPException(status_code=422, detail="if_version must be an integer")
        payload.setdefault("pair_id", pair_id)
        try:
            record = annotation_from_dict(payload)
        except SchemaError as exc:
            raise HTTPException(
                status_code=422, detail={"message": "bad record", "violations": [str(exc)]}
            ) from exc
        try:
            new_state = store.submit_annotation(pair_id, record, if_version=if_version)
        except PairMismatchError as exc:
            raise HTTPException(
                status_code=422, detail={"message": "bad record", "violations": [str(exc)]}
            ) from exc
        except AnnotationInvalidError as exc:
            raise HTTPException(
                status_code=422,
                detail={"message": "annotation rejected", "violations": exc.violations},
            ) from exc
        except VersionConflictError as exc:
            raise HTTPException(
                status_code=409,
                detail={
                    "message": str(exc),
                    "current_version": exc.current_version,
                },
            ) from exc
        return {
            "pair_id": pair_id,
            "version": new_state.version,
            "status": new_state.status,
            "record": annotation_to_dict(record),
        }

    @app.post("/api/pairs/{pair_id}/flag")
    def post_flag(
        pair_id: str,
        payload: dict = Body(...),
        x_annotator_token: str | None = Header(default=None),
    ) -> dict:
        check_token(x_annotator_token)
        get_state_or_404(pair_id)
        annotator_id = payload.get("annotator_id")
        if not isinstance(annotator_id, str) or not annotator_id:
            raise HTTPException(status_code=422, detail="annotator_id is required")
        if_version = payload.get("if_version")
        if if_version is not None and not isinstance(if_version, int):
            raise HTTPException(status_code=422, detail="if_version must be an integer")
        try:
            state = store.flag_unaligned(pair_id, annotator_id, if_version=if_version)
        except VersionConflictError as exc:
            raise HTTPException(
                status_code=409,
                detail={"message": str(exc), "current_version": exc.current_version},
            ) from exc
        return state.to_summary()

    @app.get("/api/agreement")
    def agreement(unit: str = Query(default="document")) -> dict:
        if unit not in ("document", "operation"):
            raise HTTPException(status_code=422, detail=f"unknown unit {unit!r}")
        report = build_agreement_report(
            store.records(), seqs=store.sequences(), unit=unit
        )
        return report.to_dict()

    @app.post("/api/assign")
    def post_assign(
        payload: dict = Body(...),
        x_annotator_token: str | None = Header(default=None),
    ) -> dict:
        check_token(x_annotator_token)
        annotators = payload.get("annotators")
        if not isinstance(annotators, list) or not all(
            isinstance(a, str) and a for a in annotators
        ):
            raise HTTPException(
                status_code=422, detail="annotators must be a list of non-empty strings"
            )
        overlap = payload.get("overlap_fraction", 0.25)
        seed = payload.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise HTTPException(status_code=422, detail="seed must be an integer")
        try:
            return store.assign(
                annotators, overlap_fraction=float(overlap), seed=seed
            )
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    return app

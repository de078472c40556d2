"""Arrange scored samples into training-stage manifests.

The main arrangement is an annealing schedule with k+1 stages: samples are
sorted by ascending difficulty, cut into k non-overlapping subsets, each
subset is cut the same way into k parts, and stage i (i <= k) concatenates
part i of every subset - so every stage mixes strata from easiest to
hardest while difficulty still rises stage over stage.  The final stage
replays the full set.  Every stage is shuffled with the package PRNG
seeded by (seed, stage index), which keeps manifests byte-identical across
runs and platforms.

Ablation arrangements: ``sorted_only`` (one stage, ascending difficulty,
no shuffle), ``random_stages`` (random balanced stages plus the full-set
stage), and ``shuffled_baseline`` (one shuffled stage, i.e. conventional
training).

Balanced splits put the remainder up front: splitting n into k parts gives
the first n mod k parts one extra element, and the same rule recurses into
the inner split.  Score ties are broken by sample ID, so arrangement is a
pure function of (records, k, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .difficulty import DifficultyRecord
from .errors import EmptyInput, KTooLarge, MalformedManifest
from .rng import shuffled

ARRANGEMENTS = ("annealing", "sorted_only", "random_stages", "shuffled_baseline")


@dataclass(frozen=True)
class CurriculumManifest:
    policy: str
    k: int
    seed: int
    stages: tuple[tuple[str, ...], ...]  # training order; stage 1 first
    source_corpus: str = ""

    def all_ids(self) -> set[str]:
        return {i for stage in self.stages for i in stage}


def balanced_split(items: list, k: int) -> list[list]:
    """Split into k contiguous parts, sizes as equal as possible, extras first."""
    n = len(items)
    base, extra = divmod(n, k)
    parts = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        parts.append(items[start:start + size])
        start += size
    return parts


def _sorted_ids(records: list[DifficultyRecord]) -> list[str]:
    return [r.sample_id for r in sorted(records, key=lambda r: (r.score, r.sample_id))]


def arrange_annealing(records: list[DifficultyRecord], k: int, seed: int,
                      source_corpus: str = "") -> CurriculumManifest:
    """The k+1-stage annealing arrangement described above."""
    n = len(records)
    if n == 0:
        raise EmptyInput("cannot arrange an empty record list")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of samples ({n})")

    ordered = _sorted_ids(records)
    subsets = balanced_split(ordered, k)
    parts = [balanced_split(subset, k) for subset in subsets]

    stages = []
    for i in range(k):
        stage = [sid for subset_parts in parts for sid in subset_parts[i]]
        stages.append(tuple(shuffled(stage, seed, stream=i + 1)))
    stages.append(tuple(shuffled(ordered, seed, stream=k + 1)))
    return CurriculumManifest(
        policy="annealing", k=k, seed=seed, stages=tuple(stages),
        source_corpus=source_corpus,
    )


def arrange_sorted_only(records: list[DifficultyRecord], seed: int,
                        source_corpus: str = "") -> CurriculumManifest:
    """Single stage in ascending difficulty order; no shuffling."""
    if not records:
        raise EmptyInput("cannot arrange an empty record list")
    return CurriculumManifest(
        policy="sorted_only", k=1, seed=seed,
        stages=(tuple(_sorted_ids(records)),), source_corpus=source_corpus,
    )


def arrange_random_stages(ids: list[str], k: int, seed: int,
                          source_corpus: str = "") -> CurriculumManifest:
    """Random balanced stages (difficulty ignored) plus the full-set stage."""
    n = len(ids)
    if n == 0:
        raise EmptyInput("cannot arrange an empty id list")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of samples ({n})")
    pool = shuffled(list(ids), seed, stream=0)
    stages = [tuple(part) for part in balanced_split(pool, k)]
    stages.append(tuple(shuffled(list(ids), seed, stream=k + 1)))
    return CurriculumManifest(
        policy="random_stages", k=k, seed=seed, stages=tuple(stages),
        source_corpus=source_corpus,
    )


def arrange_shuffled_baseline(ids: list[str], seed: int,
                              source_corpus: str = "") -> CurriculumManifest:
    """One full-set shuffled stage: the conventional-training control."""
    if not ids:
        raise EmptyInput("cannot arrange an empty id list")
    return CurriculumManifest(
        policy="shuffled_baseline", k=1, seed=seed,
        stages=(tuple(shuffled(list(ids), seed, stream=0)),),
        source_corpus=source_corpus,
    )


# --- manifest file (JSON lines) ----------------------------------------------

def manifest_to_jsonl(manifest: CurriculumManifest) -> str:
    """Line 1: metadata object; then one {"stage": i, "ids": [...]} per stage."""
    meta = {
        "policy": manifest.policy,
        "k": manifest.k,
        "seed": manifest.seed,
        "corpus": manifest.source_corpus,
        "n": len(manifest.all_ids()),
    }
    lines = [json.dumps(meta, ensure_ascii=False)]
    for i, stage in enumerate(manifest.stages, start=1):
        lines.append(json.dumps({"stage": i, "ids": list(stage)}, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> CurriculumManifest:
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise MalformedManifest("empty manifest document")
    try:
        meta = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"line 1: {exc}")
    for key in ("policy", "k", "seed", "corpus"):
        if key not in meta:
            raise MalformedManifest(f"metadata missing {key!r}")
    if meta["policy"] not in ARRANGEMENTS:
        raise MalformedManifest(f"unknown policy {meta['policy']!r}")

    stages = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedManifest(f"line {line_no}: {exc}")
        if "stage" not in obj or "ids" not in obj:
            raise MalformedManifest(f"line {line_no}: expected 'stage' and 'ids'")
        if obj["stage"] != len(stages) + 1:
            raise MalformedManifest(
                f"line {line_no}: expected stage {len(stages) + 1}, got {obj['stage']}"
            )
        ids = obj["ids"]
        if len(set(ids)) != len(ids):
            raise MalformedManifest(f"line {line_no}: duplicate ID within stage")
        stages.append(tuple(ids))
    if not stages:
        raise MalformedManifest("manifest has no stages")
    return CurriculumManifest(
        policy=meta["policy"], k=meta["k"], seed=meta["seed"],
        stages=tuple(stages), source_corpus=meta["corpus"],
    )


def load_manifest(path) -> CurriculumManifest:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read())


def save_manifest(manifest: CurriculumManifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest_to_jsonl(manifest))

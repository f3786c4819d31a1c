"""Four-metric RAG evaluation: faithfulness, answer relevancy, context
precision and context recall per sample, arithmetic means per metric, and
their harmonic mean as the aggregate score.

Samples that cannot be scored (an answer that decomposes into zero
statements, an empty context list) get an explicit undefined score and are
excluded from the means, with counts reported; silent zeros would bias the
aggregate. An auxiliary answer-vs-ground-truth similarity is reported
alongside but never enters the aggregate.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .messages import dumps_compact
from .providers import EmbeddingProvider, JudgeProvider

METRICS = ("faithfulness", "answer_relevancy", "context_precision", "context_recall")
LEVELS = ("L1", "L2", "L3")


@dataclass
class EvalSample:
    question: str
    contexts: list[str]
    answer: str
    ground_truth: str
    level: str = "L1"

    def __post_init__(self):
        if not (self.question and self.answer and self.ground_truth):
            raise ValueError("question, answer and ground_truth must be non-empty")
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "EvalSample":
        return EvalSample(question=obj["question"], contexts=list(obj.get("contexts", [])),
                          answer=obj["answer"], ground_truth=obj["ground_truth"],
                          level=obj.get("level", "L1"))


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _joined(contexts: list[str]) -> str:
    return "\n".join(contexts)


# --------------------------------------------------------------------------
# the four metrics

def faithfulness(sample: EvalSample, judge: JudgeProvider) -> float | None:
    """Fraction of the answer's statements supported by the retrieved
    context. Undefined when the answer decomposes into no statements."""
    statements = judge.judge("statement_decomposition", {"text": sample.answer}).payload
    if not statements:
        return None
    context = _joined(sample.contexts)
    supported = sum(
        1 for stmt in statements
        if judge.judge("statement_supported",
                       {"statement": stmt, "context": context}).payload)
    return supported / len(statements)


def answer_relevancy(sample: EvalSample, judge: JudgeProvider,
                     embedder: EmbeddingProvider, n_questions: int = 3) -> float | None:
    """Mean cosine similarity between the original question and questions
    regenerated from the answer, clamped to [0, 1]."""
    questions = judge.judge("question_generation",
                            {"answer": sample.answer, "n": n_questions}).payload
    if not questions:
        return None
    vectors = embedder.embed_texts([sample.question] + list(questions))
    original, generated = vectors[0], vectors[1:]
    mean = sum(_cosine(q, original) for q in generated) / len(generated)
    return min(1.0, max(0.0, mean))


def context_precision(sample: EvalSample, judge: JudgeProvider) -> float | None:
    """Rank-weighted precision of the retrieved contexts against the ground
    truth: sum of precision@i over relevant positions i, divided by the
    number of relevant contexts. Order matters."""
    if not sample.contexts:
        return None
    flags = [
        1 if judge.judge("chunk_relevant",
                         {"chunk": ctx, "ground_truth": sample.ground_truth}).payload
        else 0
        for ctx in sample.contexts
    ]
    relevant = sum(flags)
    if relevant == 0:
        return 0.0
    score = 0.0
    seen = 0
    for i, flag in enumerate(flags, start=1):
        seen += flag
        if flag:
            score += seen / i
    return score / relevant


def context_recall(sample: EvalSample, judge: JudgeProvider) -> float | None:
    """Fraction of ground-truth statements attributable to the retrieved
    contexts. Undefined when the ground truth decomposes into no statements;
    empty contexts support nothing and score 0."""
    statements = judge.judge("statement_decomposition",
                             {"text": sample.ground_truth}).payload
    if not statements:
        return None
    context = _joined(sample.contexts)
    supported = sum(
        1 for stmt in statements
        if judge.judge("statement_supported",
                       {"statement": stmt, "context": context}).payload)
    return supported / len(statements)


def ground_truth_similarity(sample: EvalSample, embedder: EmbeddingProvider) -> float:
    """Auxiliary: cosine of answer vs ground-truth embeddings, clamped to
    [0, 1]. Reported, but excluded from the aggregate score."""
    answer_vec, truth_vec = embedder.embed_texts([sample.answer, sample.ground_truth])
    return min(1.0, max(0.0, _cosine(answer_vec, truth_vec)))


def score_sample(sample: EvalSample, judge: JudgeProvider,
                 embedder: EmbeddingProvider, n_questions: int = 3) -> dict[str, float | None]:
    return {
        "faithfulness": faithfulness(sample, judge),
        "answer_relevancy": answer_relevancy(sample, judge, embedder, n_questions),
        "context_precision": context_precision(sample, judge),
        "context_recall": context_recall(sample, judge),
        "ground_truth_similarity": ground_truth_similarity(sample, embedder),
    }


# --------------------------------------------------------------------------
# aggregation

def ragas_score(means: dict[str, float]) -> float:
    """Harmonic mean of the four metric means; any zero mean forces 0."""
    values = [means[m] for m in METRICS]
    if any(v == 0.0 for v in values):
        return 0.0
    return 4.0 / sum(1.0 / v for v in values)


@dataclass
class MetricReport:
    means: dict[str, float | None]
    defined_counts: dict[str, int]
    undefined_counts: dict[str, int]
    ragas: float | None
    n_samples: int
    per_sample: list[dict[str, Any]] = field(default_factory=list)
    per_level: dict[str, dict[str, Any]] = field(default_factory=dict)
    failures: list[dict[str, Any]] = field(default_factory=list)
    ground_truth_similarity_mean: float | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "means": self.means,
            "ragas_score": self.ragas,
            "defined_counts": self.defined_counts,
            "undefined_counts": self.undefined_counts,
            "ground_truth_similarity_mean": self.ground_truth_similarity_mean,
            "per_level": self.per_level,
            "per_sample": self.per_sample,
            "failures": self.failures,
        }

    def summary_text(self) -> str:
        """Plain-text summary: one metric per line plus the aggregate."""
        names = {
            "faithfulness": "Faithfulness",
            "answer_relevancy": "Answer Relevancy",
            "context_precision": "Context Precision",
            "context_recall": "Context Recall",
        }
        lines = ["Evaluation Metric    Mean Value", "-" * 32]
        for metric in METRICS:
            mean = self.means[metric]
            shown = "undefined" if mean is None else f"{mean:.4f}"
            lines.append(f"{names[metric]:<20} {shown}")
        lines.append("-" * 32)
        shown = "undefined" if self.ragas is None else f"{self.ragas:.4f}"
        lines.append(f"{'RAGAS Score':<20} {shown}")
        return "\n".join(lines) + "\n"


def _mean_over_defined(rows: list[dict[str, Any]], key: str) -> tuple[float | None, int]:
    defined = [r[key] for r in rows if r.get(key) is not None]
    if not defined:
        return None, 0
    return sum(defined) / len(defined), len(defined)


def aggregate(per_sample: list[dict[str, Any]],
              failures: list[dict[str, Any]] | None = None) -> MetricReport:
    """Reduce per-sample scores to the report: arithmetic mean per metric
    over defined samples, harmonic-mean aggregate, per-level breakdown."""
    means: dict[str, float | None] = {}
    defined_counts: dict[str, int] = {}
    undefined_counts: dict[str, int] = {}
    for metric in METRICS:
        mean, n_defined = _mean_over_defined(per_sample, metric)
        means[metric] = mean
        defined_counts[metric] = n_defined
        undefined_counts[metric] = len(per_sample) - n_defined

    if any(means[m] is None for m in METRICS):
        ragas = None
    else:
        ragas = ragas_score({m: means[m] for m in METRICS})  # type: ignore[misc]

    per_level: dict[str, dict[str, Any]] = {}
    for level in LEVELS:
        rows = [r for r in per_sample if r.get("level") == level]
        if not rows:
            continue
        level_means = {m: _mean_over_defined(rows, m)[0] for m in METRICS}
        per_level[level] = {"n_samples": len(rows), "means": level_means}

    gts_mean, _ = _mean_over_defined(per_sample, "ground_truth_similarity")
    return MetricReport(means=means, defined_counts=defined_counts,
                        undefined_counts=undefined_counts, ragas=ragas,
                        n_samples=len(per_sample), per_sample=per_sample,
                        per_level=per_level, failures=failures or [],
                        ground_truth_similarity_mean=gts_mean)


# --------------------------------------------------------------------------
# dataset + runner

def load_eval_dataset(path: str | Path) -> list[dict[str, Any]]:
    """Read a JSON Lines dataset. Lines may omit answer/contexts when a
    system under test will supply them."""
    samples = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                samples.append(json.loads(line))
    return samples


def contexts_from_turns(turns: list[dict[str, Any]]) -> list[str]:
    """Retrieved contexts for scoring, pulled from a transcript's tool
    results: each document-search snippet is one context (in hit order);
    any other successful tool result contributes its payload as one context."""
    contexts: list[str] = []
    for turn in turns:
        result = turn.get("tool_result")
        if turn.get("role") != "tool" or not result:
            continue
        payload = result.get("payload", {})
        if "error" in payload:
            continue
        if result.get("name") == "search_documents":
            contexts.extend(sn["text"] for sn in payload.get("snippets", []))
        else:
            slim = {k: v for k, v in payload.items()
                    if k not in ("source_refs", "table")}
            contexts.append(dumps_compact(slim))
    return contexts


SutFn = Callable[[str], dict[str, Any]]  # question -> {"answer": str, "contexts": [str]}


def orchestrator_sut(orchestrator, store) -> SutFn:
    """Drive the in-process agent: one fresh session per question."""
    def run(question: str) -> dict[str, Any]:
        session_id = store.create()
        answer = orchestrator.run_turn(session_id, question)
        turns = [t.to_json() for t in answer.new_turns]
        return {"answer": answer.text, "contexts": contexts_from_turns(turns)}
    return run


def http_sut(base_url: str, client=None) -> SutFn:
    """Drive a running gateway over HTTP."""
    import httpx

    http = client or httpx.Client(base_url=base_url, timeout=60.0)

    def run(question: str) -> dict[str, Any]:
        session = http.post("/sessions")
        session.raise_for_status()
        session_id = session.json()["session_id"]
        msg = http.post(f"/sessions/{session_id}/messages", json={"text": question})
        msg.raise_for_status()
        transcript = http.get(f"/sessions/{session_id}/transcript")
        transcript.raise_for_status()
        return {"answer": msg.json()["text"],
                "contexts": contexts_from_turns(transcript.json()["turns"])}
    return run


def run_evaluation(dataset_path: str | Path, judge: JudgeProvider,
                   embedder: EmbeddingProvider, sut: SutFn | None = None,
                   n_questions: int = 3) -> MetricReport:
    """Score a dataset. With a SUT, each question is run through it and the
    captured answer + contexts replace whatever the file carried. Per-sample
    failures are recorded and excluded, never fatal."""
    rows: list[dict[str, Any]] = []
    failures: list[dict[str, Any]] = []
    for idx, raw in enumerate(load_eval_dataset(dataset_path)):
        try:
            if sut is not None:
                observed = sut(raw["question"])
                raw = {**raw, "answer": observed["answer"],
                       "contexts": observed["contexts"]}
            sample = EvalSample.from_json(raw)
            scores = score_sample(sample, judge, embedder, n_questions)
            rows.append({"index": idx, "level": sample.level,
                         "question": sample.question, **scores})
        except Exception as exc:
            failures.append({"index": idx, "error": str(exc)})
    return aggregate(rows, failures)


def report_csv(report: MetricReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "level", "question", *METRICS, "ground_truth_similarity"])
    for row in report.per_sample:
        writer.writerow([
            row["index"], row["level"], row["question"],
            *("" if row[m] is None else repr(row[m]) for m in METRICS),
            "" if row["ground_truth_similarity"] is None
            else repr(row["ground_truth_similarity"]),
        ])
    return buf.getvalue()


def write_report(report: MetricReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, report.csv and report.txt; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / "report.json",
        "csv": out / "report.csv",
        "txt": out / "report.txt",
    }
    paths["json"].write_text(json.dumps(report.to_json(), ensure_ascii=False, indent=2) + "\n",
                             encoding="utf-8")
    paths["csv"].write_text(report_csv(report), encoding="utf-8")
    paths["txt"].write_text(report.summary_text(), encoding="utf-8")
    return paths

"""JSON documents: knot packages, stratum lists, pages and reports.

Every document carries ``schema_version: "1"``.  Rationals are written as
strings (``"1/4"``) so they survive a round trip exactly.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .homalg import Differential, Group, Page
from .repvar import RepPoint, RepStratum, SolverConfig, StrataResult

SCHEMA_VERSION = "1"

BUILTIN_PACKAGES = {
    "unknot": "unknot.json",
    "trefoil": "trefoil.json",
    "figure-eight": "figure_eight.json",
    "figure_eight": "figure_eight.json",
}


class DocumentError(ValueError):
    """Unreadable or structurally wrong JSON document."""


def read_document(spec: str) -> dict:
    """Load a JSON document from a path, or a shipped package by name."""
    path = Path(spec)
    try:
        if path.exists():
            text = path.read_text()
        elif spec in BUILTIN_PACKAGES:
            text = resources.files("knotfloer.data").joinpath(BUILTIN_PACKAGES[spec]).read_text()
        else:
            raise DocumentError(f"no such file or shipped package: {spec}")
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{spec}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise DocumentError(f"{spec}: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError(f"{spec}: top level must be an object")
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------- pages


def page_to_json(p: Page) -> dict:
    table = [
        {"p": b[0], "q": b[1], "free_rank": g.free_rank, "torsion": list(g.torsion)}
        for b, g in sorted(p.table.items()) if not g.is_zero()
    ]
    diffs = [
        {"source": list(b), "target": list(d.target), "matrix": d.matrix}
        for b, d in sorted(p.differentials.items()) if not d.is_zero()
    ]
    return {"r": p.r, "table": table, "differentials": diffs}


def page_from_json(doc: dict) -> Page:
    table = {(e["p"], e["q"]): Group(e["free_rank"], tuple(e["torsion"])) for e in doc["table"]}
    diffs = {tuple(e["source"]): Differential(tuple(e["target"]), e["matrix"])
             for e in doc["differentials"]}
    return Page(doc["r"], table, diffs)


# ---------------------------------------------------------------- strata


def _point_to_json(p: RepPoint) -> dict:
    return {
        "vectors": np.asarray(p.vectors).tolist(),
        "residual": float(p.residual),
        "fingerprint": list(p.fingerprint),
    }


def stratum_to_json(s: RepStratum) -> dict:
    return {
        "kind": s.kind,
        "tangent_dim": s.tangent_dim,
        "fingerprint": list(s.fingerprint),
        "sample_count": len(s.samples),
        "samples": [_point_to_json(p) for p in s.samples],
    }


def stratum_from_json(doc: dict) -> RepStratum:
    pts = [RepPoint(np.array(p["vectors"]), p["residual"], tuple(p["fingerprint"]))
           for p in doc["samples"]]
    return RepStratum(doc["kind"], pts, doc["tangent_dim"])


def strata_document(braid_text: str, result: StrataResult, max_samples: int | None = None) -> dict:
    cfg = result.config
    strata = []
    for s in result.strata:
        d = stratum_to_json(s)
        if max_samples is not None:
            d["samples"] = d["samples"][:max_samples]
        strata.append(d)
    return {
        "schema_version": SCHEMA_VERSION,
        "braid": braid_text,
        "stable": result.stable,
        "batch_counts": result.batch_counts,
        "counts": result.counts(),
        "strata": strata,
        "provenance": {
            "seed": cfg.seed,
            "restarts": cfg.restarts,
            "batches": cfg.batches,
            "tol": cfg.tol,
            "rank_tol": cfg.rank_tol,
            "converged_points": result.converged,
        },
    }


def strata_from_document(doc: dict) -> tuple[list[RepStratum], SolverConfig]:
    prov = doc["provenance"]
    cfg = SolverConfig(restarts=prov["restarts"], seed=prov["seed"], tol=prov["tol"],
                       rank_tol=prov["rank_tol"], batches=prov["batches"])
    return [stratum_from_json(s) for s in doc["strata"]], cfg

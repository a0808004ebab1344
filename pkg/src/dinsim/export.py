"""Self-contained run exports: schema, canonical serialization, loading.

One run produces one JSON document holding the run metadata, the observable
series and every DIN window. Serialization is canonical (fixed key order,
compact separators, shortest round-trip floats) so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .influence import DinWindow
from .model import Model
from .simulate import SimResult

TOOL_VERSION = "0.1.0"


class ExportFormatError(ValueError):
    """Input file is not a valid export document."""


def build_document(model: Model, result: SimResult, model_name: str) -> dict:
    cfg = result.config
    windows = result.din[cfg.din_kind]
    meta = {
        "model": model_name,
        "version": TOOL_VERSION,
        "din": cfg.din_kind,
        "tau": cfg.tau,
        "t_end": cfg.t_end,
        "seed": cfg.seed,
        "obs_sample": cfg.obs_period,
        "status": result.event_stats["status"],
        "rules": [{"id": i, "name": r.name} for i, r in enumerate(model.rules)],
    }
    obs = result.observables
    wins = []
    for w in windows:
        wins.append(
            {
                "t_start": w.t_start,
                "t_end": w.t_end,
                "partial": w.partial,
                "nodes": [{"rule": i, "hits": h} for i, h in enumerate(w.hits)],
                "links": [
                    {"src": r, "dst": s, "value": v} for (r, s), v in sorted(w.matrix.items())
                ],
            }
        )
    return {
        "meta": meta,
        "observables": {"names": list(obs.names), "times": list(obs.times), "values": [list(r) for r in obs.values]},
        "windows": wins,
    }


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"), allow_nan=False) + "\n"


def write_document(doc: dict, path: str | Path) -> None:
    Path(path).write_text(dumps_document(doc), encoding="utf-8")


def load_document(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ExportFormatError(f"{path}: not valid JSON ({e})") from e
    validate_document(doc, str(path))
    return doc


def validate_document(doc, where: str = "document") -> None:
    if not isinstance(doc, dict):
        raise ExportFormatError(f"{where}: expected a JSON object")
    for key in ("meta", "observables", "windows"):
        if key not in doc:
            raise ExportFormatError(f"{where}: missing {key!r}")
    meta = doc["meta"]
    for key in ("model", "din", "tau", "t_end", "seed", "rules"):
        if key not in meta:
            raise ExportFormatError(f"{where}: missing meta.{key}")
    ids = [r.get("id") for r in meta["rules"]]
    if ids != list(range(len(ids))):
        raise ExportFormatError(f"{where}: rule ids must be dense 0..N-1")
    n = len(ids)
    for k, w in enumerate(doc["windows"]):
        for key in ("t_start", "t_end", "partial", "nodes", "links"):
            if key not in w:
                raise ExportFormatError(f"{where}: window {k} missing {key!r}")
        for link in w["links"]:
            if not (0 <= link["src"] < n and 0 <= link["dst"] < n):
                raise ExportFormatError(f"{where}: window {k} link references unknown rule")


def windows_from_document(doc: dict) -> list[DinWindow]:
    """Rebuild analysis-layer windows from a loaded export document."""
    n = len(doc["meta"]["rules"])
    kind = doc["meta"]["din"]
    out = []
    for w in doc["windows"]:
        hits = [0] * n
        for node in w["nodes"]:
            hits[node["rule"]] = node["hits"]
        matrix = {(lk["src"], lk["dst"]): lk["value"] for lk in w["links"]}
        out.append(DinWindow(w["t_start"], w["t_end"], kind, w["partial"], tuple(hits), matrix))
    return out

"""Dataset file formats.

users.jsonl       one JSON object per line: id, profile, image, text (lists of reals)
edges.csv         header ``src,dst,day``
instances.csv     header ``src,dst,label,day,<pair feature names>``
interactions.csv  header ``src,dst,count`` (optional)
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .features import PAIR_FEATURE_NAMES, InteractionLog
from .graph import FriendshipGraph
from .records import Dataset, PairSet, UserRecord

USERS_FILE = "users.jsonl"
EDGES_FILE = "edges.csv"
INSTANCES_FILE = "instances.csv"
INTERACTIONS_FILE = "interactions.csv"


class DatasetFormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def _fmt(x: float) -> str:
    return repr(float(x))


def write_dataset(dataset: Dataset, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = dataset.external_ids or [str(u) for u in range(dataset.n)]
    paths = {
        "users": out / USERS_FILE,
        "edges": out / EDGES_FILE,
        "instances": out / INSTANCES_FILE,
        "interactions": out / INTERACTIONS_FILE,
    }
    with open(paths["users"], "w", encoding="utf-8", newline="\n") as f:
        for r in dataset.records:
            row = {"id": ext[r.user_id], "profile": [float(x) for x in r.profile]}
            if r.image is not None:
                row["image"] = [float(x) for x in r.image]
            if r.text is not None:
                row["text"] = [float(x) for x in r.text]
            f.write(json.dumps(row) + "\n")
    with open(paths["edges"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["src", "dst", "day"])
        for u, v, d in dataset.graph.edges():
            w.writerow([ext[u], ext[v], d])
    with open(paths["instances"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        n_feats = dataset.instances.feats.shape[1]
        names = list(PAIR_FEATURE_NAMES) if n_feats == len(PAIR_FEATURE_NAMES) else [f"f{i}" for i in range(n_feats)]
        w.writerow(["src", "dst", "label", "day", *names])
        inst = dataset.instances
        for i in range(len(inst)):
            w.writerow([ext[inst.src[i]], ext[inst.dst[i]], inst.label[i], inst.day[i], *map(_fmt, inst.feats[i])])
    with open(paths["interactions"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["src", "dst", "count"])
        for u, v, c in dataset.interactions.entries():
            w.writerow([ext[u], ext[v], _fmt(c)])
    return paths


def _reals(path, line, value, field) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise DatasetFormatError(path, line, f"field {field!r} must be a non-empty list of reals")
    try:
        arr = np.array([float(x) for x in value], dtype=np.float64)
    except (TypeError, ValueError):
        raise DatasetFormatError(path, line, f"field {field!r} holds a non-numeric value") from None
    if not np.all(np.isfinite(arr)):
        raise DatasetFormatError(path, line, f"field {field!r} holds a non-finite value")
    return arr


def _read_users(path):
    ext_ids, records, dims = [], [], {}
    index: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetFormatError(path, line_no, f"malformed JSON ({e.msg})") from None
            if not isinstance(obj, dict) or "id" not in obj or "profile" not in obj:
                raise DatasetFormatError(path, line_no, "record needs 'id' and 'profile'")
            uid = str(obj["id"])
            if uid in index:
                raise DatasetFormatError(path, line_no, f"duplicate user id {uid!r}")
            vecs = {}
            for field in ("profile", "image", "text"):
                if field not in obj:
                    vecs[field] = None
                    continue
                arr = _reals(path, line_no, obj[field], field)
                expected = dims.setdefault(field, len(arr))
                if len(arr) != expected:
                    raise DatasetFormatError(
                        path, line_no, f"dimension mismatch for {field!r}: {len(arr)} != {expected}"
                    )
                vecs[field] = arr
            index[uid] = len(ext_ids)
            ext_ids.append(uid)
            records.append(UserRecord(index[uid], vecs["profile"], vecs["image"], vecs["text"]))
    for field in ("image", "text"):
        present = [r for r in records if getattr(r, field) is not None]
        if present and len(present) != len(records):
            raise DatasetFormatError(path, 0, f"field {field!r} present for some users but not all")
    return ext_ids, index, records


def _rows(path, expected_header):
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[: len(expected_header)]] != expected_header:
            raise DatasetFormatError(path, 1, f"header must start with {','.join(expected_header)}")
        yield header
        for line_no, row in enumerate(reader, start=2):
            if row:
                yield line_no, row


def _user(path, line, index, uid):
    try:
        return index[uid]
    except KeyError:
        raise DatasetFormatError(path, line, f"unknown user id {uid!r}") from None


def _int(path, line, value, field):
    try:
        return int(value)
    except ValueError:
        raise DatasetFormatError(path, line, f"field {field!r} is not an integer: {value!r}") from None


def _float(path, line, value, field):
    try:
        x = float(value)
    except ValueError:
        raise DatasetFormatError(path, line, f"field {field!r} is not a real: {value!r}") from None
    if not math.isfinite(x):
        raise DatasetFormatError(path, line, f"field {field!r} is not finite")
    return x


def load_dataset(user_file, edge_file, instance_file, interaction_file=None) -> Dataset:
    """Read the dataset files, re-index ids densely and check referential integrity."""
    ext_ids, index, records = _read_users(user_file)
    n = len(records)
    if n == 0:
        raise DatasetFormatError(user_file, 0, "no users")

    edges, seen_edges = [], 0
    rows = _rows(edge_file, ["src", "dst", "day"])
    next(rows)
    for line_no, row in rows:
        if len(row) != 3:
            raise DatasetFormatError(edge_file, line_no, f"expected 3 fields, got {len(row)}")
        u = _user(edge_file, line_no, index, row[0])
        v = _user(edge_file, line_no, index, row[1])
        if u == v:
            raise DatasetFormatError(edge_file, line_no, "self-loop")
        edges.append((u, v, _int(edge_file, line_no, row[2], "day")))
        seen_edges += 1
    graph, dupes = FriendshipGraph.from_edges(n, edges)

    rows = _rows(instance_file, ["src", "dst", "label", "day"])
    header = next(rows)
    n_feats = len(header) - 4
    src, dst, label, day, feats = [], [], [], [], []
    for line_no, row in rows:
        if len(row) != len(header):
            raise DatasetFormatError(instance_file, line_no, f"expected {len(header)} fields, got {len(row)}")
        u = _user(instance_file, line_no, index, row[0])
        v = _user(instance_file, line_no, index, row[1])
        if u == v:
            raise DatasetFormatError(instance_file, line_no, "src equals dst")
        y = _int(instance_file, line_no, row[2], "label")
        if y not in (0, 1):
            raise DatasetFormatError(instance_file, line_no, f"label must be 0 or 1, got {y}")
        src.append(u)
        dst.append(v)
        label.append(y)
        day.append(_int(instance_file, line_no, row[3], "day"))
        feats.append([_float(instance_file, line_no, x, header[4 + j]) for j, x in enumerate(row[4:])])
    instances = PairSet(src, dst, label, day, np.array(feats).reshape(len(src), n_feats))

    entries = []
    if interaction_file is not None and Path(interaction_file).exists():
        rows = _rows(interaction_file, ["src", "dst", "count"])
        next(rows)
        for line_no, row in rows:
            if len(row) != 3:
                raise DatasetFormatError(interaction_file, line_no, f"expected 3 fields, got {len(row)}")
            u = _user(interaction_file, line_no, index, row[0])
            v = _user(interaction_file, line_no, index, row[1])
            if u == v:
                raise DatasetFormatError(interaction_file, line_no, "interaction of a user with itself")
            entries.append((u, v, _float(interaction_file, line_no, row[2], "count")))
    log = InteractionLog(n, entries)

    report = {"users": n, "edge_rows": seen_edges, "edges": graph.num_edges, "duplicate_edges": dupes,
              "instances": len(instances), "interactions": len(log)}
    return Dataset(graph, records, instances, log, ext_ids, report)


def load_dataset_dir(path) -> Dataset:
    p = Path(path)
    return load_dataset(p / USERS_FILE, p / EDGES_FILE, p / INSTANCES_FILE, p / INTERACTIONS_FILE)

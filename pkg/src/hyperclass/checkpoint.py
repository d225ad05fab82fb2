"""Binary checkpoint container for both training stages.

Layout: magic `HYPC`, version u32 LE, then named sections, each
[name_len u16][name utf-8][payload_len u64][payload][crc32 u32], all
little-endian. Arrays are raw little-endian float64 with shapes carried
in the `meta` JSON section, so round trips are bitwise exact.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoder import EncoderModel, Vocabulary
from .errors import CheckpointError, StageError
from .hierarchy import LabelEmbeddings
from .loss import ClassifierHead

MAGIC = b"HYPC"
VERSION = 1

STAGE_LABELS = "labels"
STAGE_CLASSIFIER = "classifier"


@dataclass
class LabelsCheckpoint:
    stage = STAGE_LABELS
    emb: LabelEmbeddings
    class_map: list[tuple[str, str]]
    config: dict
    seed: int


@dataclass
class ClassifierCheckpoint:
    stage = STAGE_CLASSIFIER
    model: EncoderModel
    head: ClassifierHead
    class_names: list[str]
    config: dict
    seed: int


def _pack_sections(sections: list[tuple[str, bytes]]) -> bytes:
    out = [MAGIC, struct.pack("<I", VERSION)]
    for name, payload in sections:
        encoded = name.encode("utf-8")
        out.append(struct.pack("<H", len(encoded)))
        out.append(encoded)
        out.append(struct.pack("<Q", len(payload)))
        out.append(payload)
        out.append(struct.pack("<I", zlib.crc32(payload)))
    return b"".join(out)


def _unpack_sections(blob: bytes, path) -> dict[str, bytes]:
    if blob[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    if len(blob) < 8:
        raise CheckpointError(f"{path}: truncated header")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    sections: dict[str, bytes] = {}
    offset = 8
    while offset < len(blob):
        try:
            (name_len,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            name = blob[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (payload_len,) = struct.unpack_from("<Q", blob, offset)
            offset += 8
            payload = blob[offset : offset + payload_len]
            if len(payload) != payload_len:
                raise CheckpointError(f"{path}: truncated section {name!r}")
            offset += payload_len
            (crc,) = struct.unpack_from("<I", blob, offset)
            offset += 4
        except struct.error as exc:
            raise CheckpointError(f"{path}: truncated checkpoint") from exc
        if zlib.crc32(payload) != crc:
            raise CheckpointError(f"{path}: checksum mismatch in section {name!r}")
        sections[name] = payload
    return sections


def _array_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _array_from(payload: bytes, shape) -> np.ndarray:
    return np.frombuffer(payload, dtype="<f8").reshape(shape).astype(float)


def _atomic_write(path, blob: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(blob)
    os.replace(tmp, path)


def _meta_json(meta: dict) -> bytes:
    return json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_labels_checkpoint(
    path, emb: LabelEmbeddings, class_map: list[tuple[str, str]], config: dict, seed: int
) -> None:
    meta = {
        "stage": STAGE_LABELS,
        "seed": seed,
        "config": config,
        "nodes": list(emb.nodes),
        "class_map": [[label, node] for label, node in class_map],
        "shapes": {"labels.vectors": list(emb.vectors.shape)},
    }
    sections = [("meta", _meta_json(meta)), ("labels.vectors", _array_bytes(emb.vectors))]
    _atomic_write(path, _pack_sections(sections))


def save_classifier_checkpoint(
    path,
    model: EncoderModel,
    head: ClassifierHead,
    class_names: list[str],
    config: dict,
    seed: int,
) -> None:
    arrays = {
        "enc.embedding": model.embedding,
        "enc.w1": model.w1,
        "enc.b1": model.b1,
        "head.w_c": head.w_c,
        "head.b_c": head.b_c,
        "head.w_p": head.w_p,
        "head.b_p": head.b_p,
    }
    meta = {
        "stage": STAGE_CLASSIFIER,
        "seed": seed,
        "config": config,
        "class_names": list(class_names),
        "vocab": model.vocab.token_to_index,
        "shapes": {name: list(arr.shape) for name, arr in arrays.items()},
    }
    sections = [("meta", _meta_json(meta))]
    sections += [(name, _array_bytes(arr)) for name, arr in sorted(arrays.items())]
    _atomic_write(path, _pack_sections(sections))


def load_checkpoint(path, expect_stage: str | None = None):
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"{path}: cannot read checkpoint: {exc}") from exc
    sections = _unpack_sections(blob, path)
    if "meta" not in sections:
        raise CheckpointError(f"{path}: missing meta section")
    try:
        meta = json.loads(sections["meta"].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable meta section: {exc}") from exc
    stage = meta.get("stage")
    if expect_stage is not None and stage != expect_stage:
        raise StageError(f"{path}: stage is {stage!r}, expected {expect_stage!r}")

    def grab(name: str) -> np.ndarray:
        if name not in sections:
            raise CheckpointError(f"{path}: missing section {name!r}")
        return _array_from(sections[name], meta["shapes"][name])

    if stage == STAGE_LABELS:
        emb = LabelEmbeddings(nodes=list(meta["nodes"]), vectors=grab("labels.vectors"))
        class_map = [(label, node) for label, node in meta["class_map"]]
        return LabelsCheckpoint(emb, class_map, meta["config"], int(meta["seed"]))
    if stage == STAGE_CLASSIFIER:
        vocab = Vocabulary({str(k): int(v) for k, v in meta["vocab"].items()})
        model = EncoderModel(
            vocab=vocab,
            embedding=grab("enc.embedding"),
            w1=grab("enc.w1"),
            b1=grab("enc.b1"),
        )
        head = ClassifierHead(
            w_c=grab("head.w_c"),
            b_c=grab("head.b_c"),
            w_p=grab("head.w_p"),
            b_p=grab("head.b_p"),
        )
        return ClassifierCheckpoint(
            model, head, list(meta["class_names"]), meta["config"], int(meta["seed"])
        )
    raise CheckpointError(f"{path}: unknown stage tag {stage!r}")

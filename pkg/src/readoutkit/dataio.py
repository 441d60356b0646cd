"""On-disk formats: binary shot datasets, JSON sidecars, CSV export.

Dataset layout (little-endian):

    bytes 0..11   magic ``RKIT-DATASET``
    bytes 12..15  u32 format version (currently 1)
    u64           shot count
    u32           samples per shot
    f64           sample rate (samples per ns)
    per shot      u8 label, u8 herald flag, f32 samples

A ``<name>.json`` sidecar written next to the file records the generating
config and seed so ground-truth paths can be regenerated on load.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import DataError, FileFormatError
from .sim import Dataset, RawShot, SimConfig, regenerate_paths

DATASET_MAGIC = b"RKIT-DATASET"
DATASET_VERSION = 1
_HEADER = struct.Struct("<12sI")
_COUNTS = struct.Struct("<QId")


def canonical_json(obj) -> str:
    """Key-sorted, whitespace-free JSON; the hashing and sidecar format."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    """sha256 over the canonical JSON form of a config-like dict."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(Path(path).suffix + ".json")


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write the binary shot file and its JSON sidecar."""
    path = Path(path)
    shots = dataset.shots
    if not shots:
        raise DataError("refusing to write an empty dataset")
    n_samples = len(shots[0].samples)
    rate = shots[0].sample_rate
    for s in shots:
        if len(s.samples) != n_samples or s.sample_rate != rate:
            raise DataError("all shots in a dataset must share length and rate")

    with open(path, "wb") as f:
        f.write(_HEADER.pack(DATASET_MAGIC, DATASET_VERSION))
        f.write(_COUNTS.pack(len(shots), n_samples, rate))
        for s in shots:
            f.write(struct.pack("<BB", s.label, 1 if s.herald_pass else 0))
            f.write(np.asarray(s.samples, dtype="<f4").tobytes())

    meta = {"format_version": DATASET_VERSION, "shot_count": len(shots)}
    if dataset.config is not None:
        cfg = dataset.config.to_dict()
        meta["config"] = cfg
        meta["config_sha256"] = config_hash(cfg)
    sidecar_path(path).write_text(canonical_json(meta) + "\n")


def load_dataset(path: str | Path, regenerate: bool = False) -> Dataset:
    """Read a binary shot file; optionally rebuild ground-truth paths.

    ``regenerate=True`` requires the sidecar, replays the generator's path
    draws from the stored config, and attaches the true path to each shot.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise FileFormatError(f"cannot read dataset: {e}") from e
    if len(raw) < _HEADER.size + _COUNTS.size:
        raise FileFormatError(f"{path} is too short to be a dataset file")
    magic, version = _HEADER.unpack_from(raw, 0)
    if magic != DATASET_MAGIC:
        raise FileFormatError(f"{path} is not a dataset file (bad magic)")
    if version != DATASET_VERSION:
        raise FileFormatError(f"unsupported dataset version {version}")
    count, n_samples, rate = _COUNTS.unpack_from(raw, _HEADER.size)

    shot_bytes = 2 + 4 * n_samples
    offset = _HEADER.size + _COUNTS.size
    if len(raw) != offset + count * shot_bytes:
        raise FileFormatError(f"{path} is truncated or padded")

    config = None
    sc = sidecar_path(path)
    if sc.exists():
        meta = json.loads(sc.read_text())
        if "config" in meta:
            config = SimConfig.from_dict(meta["config"])

    shots = []
    for i in range(count):
        base = offset + i * shot_bytes
        label, herald = struct.unpack_from("<BB", raw, base)
        samples = np.frombuffer(raw, dtype="<f4", count=n_samples, offset=base + 2)
        shots.append(
            RawShot(
                samples=samples.copy(),
                label=int(label),
                herald_pass=bool(herald),
                true_path=None,
                shot_id=i,
                sample_rate=rate,
            )
        )

    if regenerate:
        if config is None:
            raise DataError("path regeneration needs the JSON sidecar with a config")
        if count % 3 != 0:
            raise DataError("regeneration expects a balanced dataset")
        paths = regenerate_paths(config, count // 3)
        for shot, p in zip(shots, paths):
            if p.initial_state != shot.label:
                raise DataError("sidecar config does not reproduce this dataset")
            shot.true_path = p

    return Dataset(shots=shots, config=config)


def export_csv(dataset: Dataset, path: str | Path, max_shots: int | None = None) -> int:
    """Flatten shots to CSV (shot_id, label, herald, s0..sN).  Returns rows."""
    path = Path(path)
    shots = dataset.shots[:max_shots] if max_shots else dataset.shots
    if not shots:
        raise DataError("no shots to export")
    n = len(shots[0].samples)
    header = "shot_id,label,herald," + ",".join(f"s{i}" for i in range(n))
    with open(path, "w") as f:
        f.write(header + "\n")
        for s in shots:
            vals = ",".join(repr(float(v)) for v in s.samples)
            f.write(f"{s.shot_id},{s.label},{int(s.herald_pass)},{vals}\n")
    return len(shots)

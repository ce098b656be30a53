"""Content-addressed artifact persistence.

Every artifact (dataset, projection, model, report) is serialized to
canonical JSON and stored at DATA_DIR/{kind}/{sha256(content)}.json, so
identical content always maps to the same id and re-submitting is a
no-op. Sessions are the one mutable artifact kind: a per-dataset append
log of explanation activity, keyed by the dataset id.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from datetime import datetime, timezone
from pathlib import Path

from .canonical import canonical_bytes, content_id
from .errors import NotFoundError

ARTIFACT_KINDS = ("datasets", "projections", "models", "reports", "sessions")


class ArtifactStore:
    """Flat-directory JSON artifact store rooted at ``root``."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        # Session files are the only mutable artifacts; appends must not
        # interleave under concurrent requests.
        self._session_lock = threading.Lock()

    def _path(self, kind: str, artifact_id: str) -> Path:
        if kind not in ARTIFACT_KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        return self.root / kind / f"{artifact_id}.json"

    def _write(self, path: Path, payload: bytes):
        path.parent.mkdir(parents=True, exist_ok=True)
        # Atomic publish: readers never observe a half-written artifact.
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def put(self, kind: str, doc: dict) -> str:
        """Store a document under its content id; idempotent."""
        payload = canonical_bytes(doc)
        artifact_id = content_id(doc)
        path = self._path(kind, artifact_id)
        if not path.exists():
            self._write(path, payload)
        return artifact_id

    def get_bytes(self, kind: str, artifact_id: str) -> bytes:
        path = self._path(kind, artifact_id)
        if not path.exists():
            raise NotFoundError(f"no {kind[:-1]} with id {artifact_id}")
        return path.read_bytes()

    def get(self, kind: str, artifact_id: str) -> dict:
        return json.loads(self.get_bytes(kind, artifact_id))

    def exists(self, kind: str, artifact_id: str) -> bool:
        return self._path(kind, artifact_id).exists()

    # -- sessions ---------------------------------------------------------
    # One session per dataset, created on first use. Mutable, so keyed by
    # dataset id rather than content.

    def session_id_for(self, dataset_id: str) -> str:
        return f"session-{dataset_id[:16]}"

    def ensure_session(self, dataset_id: str) -> str:
        session_id = self.session_id_for(dataset_id)
        path = self._path("sessions", session_id)
        with self._session_lock:
            if not path.exists():
                doc = {
                    "session_id": session_id,
                    "dataset_id": dataset_id,
                    "projection_id": None,
                    "history": [],
                }
                self._write(path, canonical_bytes(doc))
        return session_id

    def _mutate_session(self, dataset_id: str, mutate) -> str:
        session_id = self.ensure_session(dataset_id)
        path = self._path("sessions", session_id)
        with self._session_lock:
            doc = json.loads(path.read_bytes())
            mutate(doc)
            self._write(path, canonical_bytes(doc))
        return session_id

    def append_history(self, dataset_id: str, event: dict) -> str:
        """Append one event (with a UTC timestamp) to the dataset's session."""
        stamped = dict(event)
        stamped["at"] = datetime.now(timezone.utc).isoformat()
        return self._mutate_session(dataset_id, lambda doc: doc["history"].append(stamped))

    def set_session_projection(self, dataset_id: str, projection_id: str) -> str:
        return self._mutate_session(
            dataset_id, lambda doc: doc.__setitem__("projection_id", projection_id)
        )

    def get_session(self, session_id: str) -> dict:
        path = self._path("sessions", session_id)
        if not path.exists():
            raise NotFoundError(f"no session with id {session_id}")
        return json.loads(path.read_bytes())

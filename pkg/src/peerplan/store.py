"""Local roster persistence: one JSON document per roster plus result documents.

Writes go through write-to-temp-then-rename so a crash mid-write leaves the
previous version intact. Mutations are serialized by an in-process lock; the
store is single-tenant and local-first, so cross-process locking is out of
scope.
"""

from __future__ import annotations

import errno
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .model import PeerplanError, SocialNetwork, validate_network
from .solvers import SolveConstraints, SolveResult
from . import fileio


class NotFound(PeerplanError):
    """No roster or result under that id."""


class ConflictingUpdate(PeerplanError):
    """The roster changed since the version the caller read."""


class StorageFull(PeerplanError):
    """The data directory is at its size budget."""


@dataclass(frozen=True)
class HistoryEntry:
    result_id: str
    algorithm: str
    constraints: SolveConstraints


@dataclass(frozen=True)
class Roster:
    id: str
    name: str
    network: SocialNetwork
    created_at: str
    updated_at: str
    version: int
    history: tuple[HistoryEntry, ...] = ()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RosterStore:
    def __init__(self, data_dir: str | Path, max_bytes: int | None = None):
        self.data_dir = Path(data_dir)
        self.max_bytes = max_bytes
        self._lock = threading.RLock()
        (self.data_dir / "rosters").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "results").mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------------

    def _roster_path(self, roster_id: str) -> Path:
        return self.data_dir / "rosters" / f"{roster_id}.json"

    def _result_path(self, roster_id: str, result_id: str) -> Path:
        return self.data_dir / "results" / roster_id / f"{result_id}.json"

    # -- serialization -------------------------------------------------------

    @staticmethod
    def _roster_to_obj(roster: Roster) -> dict:
        return {
            "id": roster.id,
            "name": roster.name,
            "created_at": roster.created_at,
            "updated_at": roster.updated_at,
            "version": roster.version,
            "network": fileio.network_to_obj(roster.network),
            "history": [
                {
                    "result_id": entry.result_id,
                    "algorithm": entry.algorithm,
                    "constraints": fileio.constraints_to_obj(entry.constraints),
                }
                for entry in roster.history
            ],
        }

    @staticmethod
    def _roster_from_obj(obj: dict) -> Roster:
        history = tuple(
            HistoryEntry(
                result_id=entry["result_id"],
                algorithm=entry["algorithm"],
                constraints=fileio.constraints_from_obj(entry["constraints"]),
            )
            for entry in obj["history"]
        )
        return Roster(
            id=obj["id"],
            name=obj["name"],
            network=fileio.network_from_obj(obj["network"], validate=False),
            created_at=obj["created_at"],
            updated_at=obj["updated_at"],
            version=obj["version"],
            history=history,
        )

    # -- durability ----------------------------------------------------------

    def _write_doc(self, path: Path, obj: dict) -> None:
        payload = fileio.dump_json(obj).encode()
        with self._lock:
            if self.max_bytes is not None:
                used = sum(
                    p.stat().st_size for p in self.data_dir.rglob("*") if p.is_file()
                )
                existing = path.stat().st_size if path.exists() else 0
                if used - existing + len(payload) > self.max_bytes:
                    raise StorageFull(
                        f"store would exceed {self.max_bytes} bytes")
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            try:
                with open(tmp, "wb") as handle:
                    handle.write(payload)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp, path)
            except OSError as exc:
                tmp.unlink(missing_ok=True)
                if exc.errno == errno.ENOSPC:
                    raise StorageFull(str(exc)) from exc
                raise

    def _load(self, roster_id: str) -> Roster:
        path = self._roster_path(roster_id)
        if not path.exists():
            raise NotFound(f"no roster {roster_id!r}")
        return self._roster_from_obj(fileio.read_json(path))

    # -- CRUD ----------------------------------------------------------------

    def create(self, name: str, network: SocialNetwork) -> Roster:
        violations = validate_network(network)
        if violations:
            raise ValueError(f"invalid network: {violations}")
        with self._lock:
            roster_id = uuid.uuid4().hex[:12]
            while self._roster_path(roster_id).exists():
                roster_id = uuid.uuid4().hex[:12]
            now = _now()
            roster = Roster(id=roster_id, name=name, network=network,
                            created_at=now, updated_at=now, version=1)
            self._write_doc(self._roster_path(roster_id), self._roster_to_obj(roster))
            return roster

    def get(self, roster_id: str) -> Roster:
        with self._lock:
            return self._load(roster_id)

    def list_rosters(self) -> list[dict]:
        with self._lock:
            summaries = []
            for path in sorted((self.data_dir / "rosters").glob("*.json")):
                roster = self._roster_from_obj(fileio.read_json(path))
                summaries.append({
                    "id": roster.id,
                    "name": roster.name,
                    "nodes": len(roster.network.nodes),
                    "users": roster.network.user_count(),
                    "version": roster.version,
                    "updated_at": roster.updated_at,
                })
            return summaries

    def update(self, roster_id: str, expected_version: int,
               name: str | None = None,
               network: SocialNetwork | None = None) -> Roster:
        with self._lock:
            roster = self._load(roster_id)
            if roster.version != expected_version:
                raise ConflictingUpdate(
                    f"roster {roster_id!r} is at version {roster.version}, "
                    f"caller expected {expected_version}")
            if network is not None:
                violations = validate_network(network)
                if violations:
                    raise ValueError(f"invalid network: {violations}")
            updated = Roster(
                id=roster.id,
                name=name if name is not None else roster.name,
                network=network if network is not None else roster.network,
                created_at=roster.created_at,
                updated_at=_now(),
                version=roster.version + 1,
                history=roster.history,
            )
            self._write_doc(self._roster_path(roster_id), self._roster_to_obj(updated))
            return updated

    def delete(self, roster_id: str) -> None:
        with self._lock:
            path = self._roster_path(roster_id)
            if not path.exists():
                raise NotFound(f"no roster {roster_id!r}")
            path.unlink()
            results_dir = self.data_dir / "results" / roster_id
            if results_dir.exists():
                for result in results_dir.glob("*.json"):
                    result.unlink()
                results_dir.rmdir()

    # -- results -------------------------------------------------------------

    def add_result(self, roster_id: str, result: SolveResult,
                   constraints: SolveConstraints) -> tuple[Roster, str]:
        """Persist a solve outcome and append it to the roster history.

        The result document lands before the roster document references it, so
        a crash in between leaves a readable store (at worst an orphan file).
        """
        with self._lock:
            roster = self._load(roster_id)
            result_id = "r" + uuid.uuid4().hex[:12]
            while self._result_path(roster_id, result_id).exists():
                result_id = "r" + uuid.uuid4().hex[:12]
            doc = {
                "roster_id": roster_id,
                "result_id": result_id,
                "result": fileio.solve_result_to_obj(result),
                "constraints": fileio.constraints_to_obj(constraints),
            }
            self._write_doc(self._result_path(roster_id, result_id), doc)
            entry = HistoryEntry(result_id=result_id, algorithm=result.algorithm,
                                 constraints=constraints)
            updated = Roster(
                id=roster.id, name=roster.name, network=roster.network,
                created_at=roster.created_at, updated_at=_now(),
                version=roster.version + 1,
                history=roster.history + (entry,),
            )
            self._write_doc(self._roster_path(roster_id), self._roster_to_obj(updated))
            return updated, result_id

    def get_result(self, roster_id: str, result_id: str) -> dict:
        with self._lock:
            if not self._roster_path(roster_id).exists():
                raise NotFound(f"no roster {roster_id!r}")
            path = self._result_path(roster_id, result_id)
            if not path.exists():
                raise NotFound(f"no result {result_id!r} for roster {roster_id!r}")
            return fileio.read_json(path)

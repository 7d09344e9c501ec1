"""
Enregistrement JSON versionné d'une exécution (jeu, réduction ou vérification)
"""

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, Optional, Tuple, TYPE_CHECKING

from ..core.constants import APP_INFO, SCHEMA_VERSION
from ..utils.file_utils import FileUtils

if TYPE_CHECKING:
    from ..games.models import GameResult

REQUIRED_FIELDS = ("schema_version", "kind", "spec", "result", "verdict", "run_info")


@dataclass
class ResultRecord:
    """
    Document écrit par --out

    Le bloc run_info (horodatage, durée, workers) est le seul à varier
    entre deux exécutions de même graine.
    """
    kind: str
    spec: Dict[str, Any]
    result: Optional[Dict[str, Any]] = None
    verdict: Optional[Dict[str, Any]] = None
    run_info: Dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    artifact_version: str = APP_INFO["version"]

    @classmethod
    def create(cls, kind: str, spec: Dict[str, Any], elapsed: float, workers: Optional[int] = None,
               result: Optional[Dict[str, Any]] = None,
               verdict: Optional[Dict[str, Any]] = None) -> "ResultRecord":
        run_info = {
            "timestamp": datetime.now().isoformat(timespec="seconds"),
            "elapsed": round(elapsed, 6),
        }
        if workers is not None:
            run_info["workers"] = workers
        return cls(kind=kind, spec=spec, result=result, verdict=verdict, run_info=run_info)

    @classmethod
    def for_game(cls, kind: str, spec: Dict[str, Any], result: "GameResult", workers: Optional[int] = None,
                 verdict: Optional[Dict[str, Any]] = None) -> "ResultRecord":
        """La durée mesurée par run_game passe dans run_info"""
        return cls.create(kind, spec, result.elapsed, workers, result=result.to_dict(), verdict=verdict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ResultRecord":
        """
        Reconstruit un enregistrement

        Raises:
            KeyError: champ obligatoire absent
        """
        missing = [key for key in REQUIRED_FIELDS if key not in data]
        if missing:
            raise KeyError(", ".join(missing))
        return cls(
            kind=data["kind"],
            spec=data["spec"],
            result=data["result"],
            verdict=data["verdict"],
            run_info=dict(data["run_info"]),
            schema_version=data["schema_version"],
            artifact_version=data.get("artifact_version", APP_INFO["version"]),
        )

    @classmethod
    def load(cls, filepath: str) -> Tuple[Optional["ResultRecord"], Optional[str]]:
        """Relit un document écrit par save()"""
        data, error = FileUtils.read_json(filepath)
        if error:
            return None, error
        if not isinstance(data, dict):
            return None, "Le document n'est pas un objet JSON"
        if data.get("schema_version") != SCHEMA_VERSION:
            return None, f"Version de schéma non supportée: {data.get('schema_version')}"
        try:
            return cls.from_dict(data), None
        except KeyError as e:
            return None, f"Champs manquants: {e.args[0]}"

    @property
    def passed(self) -> bool:
        """Vrai sans verdict (simple mesure) ou si le verdict est positif"""
        return self.verdict is None or bool(self.verdict.get("passed"))

    def deterministic_part(self) -> Dict[str, Any]:
        data = self.to_dict()
        data.pop("run_info")
        return data

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "artifact_version": self.artifact_version,
            "kind": self.kind,
            "spec": self.spec,
            "result": self.result,
            "verdict": self.verdict,
            "run_info": self.run_info,
        }

    def save(self, filepath: str) -> Tuple[bool, Optional[str]]:
        return FileUtils.write_json(self.to_dict(), filepath)

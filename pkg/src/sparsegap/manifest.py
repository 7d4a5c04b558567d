"""Run provenance embedded in every emitted report.

The digest covers everything that determines the numbers (command line,
config, dictionary provenance, master seed, tool version) and excludes
the timestamp, so re-running a manifest reproduces the digest exactly.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, asdict
from typing import Optional


@dataclass(frozen=True)
class RunManifest:
    command_line: str
    config_digest: str
    dictionary_provenance: dict
    master_seed: Optional[int]
    tool_version: str
    timestamp: str

    def to_dict(self) -> dict:
        return asdict(self)


def config_digest(command_line: str, config: dict, provenance: dict,
                  master_seed, tool_version: str) -> str:
    payload = json.dumps(
        {"command_line": command_line, "config": config, "provenance": provenance,
         "master_seed": master_seed, "tool_version": tool_version},
        sort_keys=True, default=str,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def build_manifest(command_line: str, config: dict, provenance: dict,
                   master_seed, tool_version: str) -> RunManifest:
    return RunManifest(
        command_line=command_line,
        config_digest=config_digest(command_line, config, provenance, master_seed, tool_version),
        dictionary_provenance=provenance,
        master_seed=master_seed,
        tool_version=tool_version,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )

import json
import math
import os
import threading
import pandas as pd
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from abresolvent.report import REFINEMENT_SLACK, BoundCheckReport


LEDGER_ENV = 'AB_RESOLVENT_LEDGER'
LEDGER_NAME = 'constants_ledger.jsonl'
LEDGER_VERSION = 1


class MissingClaimError(KeyError):
    def __init__(self,
                 claim_id: str,
                 path: str):
        super().__init__(f"claim '{claim_id}' is not recorded in ledger {path}")
        self.claim_id = claim_id
        self.path = path
# ----------------------------------------------------------------------------------------------------------------------


def ledger_path(path: Optional[str] = None,
                output: Optional[str] = None) -> Path:
    """
    ledger_path(path, output)

        Ledger location: AB_RESOLVENT_LEDGER if set, else the explicit path, else LEDGER_NAME inside
        the output directory (or the working directory)
    """
    env = os.environ.get(LEDGER_ENV)
    if env:
        return Path(env)
    if path is not None:
        return Path(path)
    return Path(output if output is not None else '.') / LEDGER_NAME
# ----------------------------------------------------------------------------------------------------------------------


class ConstantsLedger:
    """
    ConstantsLedger(path)

        Append-only record of empirically observed constants, one JSON object per line:
        {"version", "claim_id", "constant", "samples", "verdict", "config_hash"}.
        Reading a claim returns its latest entry. Writes are serialized by a lock

        Parameters
        ----------
        path: str, optional
            resolved with ledger_path

        Examples
        --------
            ledger = ConstantsLedger('results/constants_ledger.jsonl')
            ledger.write('appendix_1', 2.5, config_hash)
            ledger.read('appendix_1')

    """
    _lock = threading.Lock()

    def __init__(self,
                 path: Optional[str] = None):
        self.path = ledger_path(path)
    # ------------------------------------------------------------------------------------------------------------------

    def exists(self) -> bool:
        return self.path.exists()
    # ------------------------------------------------------------------------------------------------------------------

    def entries(self) -> List[Dict]:
        if not self.exists():
            raise FileNotFoundError(f"Ledger file {self.path} does not exist")
        rows = []
        with open(self.path, 'r') as file:
            for line in file:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
        return rows
    # ------------------------------------------------------------------------------------------------------------------

    def write(self,
              claim_id: str,
              constant: float,
              config_hash: str,
              samples: int = 0,
              verdict: Optional[bool] = None) -> Dict:
        if not isinstance(claim_id, str) or not claim_id:
            raise ValueError("claim_id must be a non-empty string")
        constant = float(constant)
        entry = {"version": LEDGER_VERSION,
                 "claim_id": claim_id,
                 "constant": constant if math.isfinite(constant) else str(constant),
                 "samples": int(samples),
                 "verdict": None if verdict is None else bool(verdict),
                 "config_hash": config_hash}
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, 'a') as file:
                file.write(json.dumps(entry, sort_keys=True) + '\n')
        return entry
    # ------------------------------------------------------------------------------------------------------------------

    def record(self,
               reports: Iterable[BoundCheckReport],
               config_hash: str) -> List[Dict]:
        return [self.write(r.claim_id, r.max_ratio, config_hash, r.sample_count, r.verdict) for r in reports]
    # ------------------------------------------------------------------------------------------------------------------

    def entry(self,
              claim_id: str) -> Dict:
        matches = [row for row in self.entries() if row['claim_id'] == claim_id]
        if not matches:
            raise MissingClaimError(claim_id, str(self.path))
        return matches[-1]
    # ------------------------------------------------------------------------------------------------------------------

    def read(self,
             claim_id: str) -> float:
        return float(self.entry(claim_id)['constant'])
    # ------------------------------------------------------------------------------------------------------------------

    def latest(self) -> pd.DataFrame:
        """One row per claim, its latest entry, in order of first appearance."""
        rows = {}
        for row in self.entries():
            rows.pop(row['claim_id'], None)
            rows[row['claim_id']] = row
        table = pd.DataFrame(list(rows.values()),
                             columns=['version', 'claim_id', 'constant', 'samples', 'verdict', 'config_hash'])
        return table.reset_index(drop=True)
    # ------------------------------------------------------------------------------------------------------------------

    def compare(self,
                other: 'ConstantsLedger',
                slack: float = REFINEMENT_SLACK) -> pd.DataFrame:
        """
        compare(other, slack)

            Relative change of the latest constant per claim present in both ledgers, e.g. runs at two
            grid densities; 'stable' is change < slack
        """
        mine = self.latest().set_index('claim_id')['constant'].astype(float)
        theirs = other.latest().set_index('claim_id')['constant'].astype(float)
        common = [claim for claim in mine.index if claim in theirs.index]
        rows = []
        for claim in common:
            a, b = mine[claim], theirs[claim]
            change = 0.0 if a == b else (abs(b - a) / abs(a) if a != 0 else math.inf)
            rows.append({"claim_id": claim, "constant": a, "other": b, "change": change, "stable": change < slack})
        return pd.DataFrame(rows, columns=['claim_id', 'constant', 'other', 'change', 'stable'])
# ----------------------------------------------------------------------------------------------------------------------


def constants_ledger(mode: str,
                     claim_id: str,
                     constant: Optional[float] = None,
                     config_hash: str = '',
                     path: Optional[str] = None) -> float:
    """
    constants_ledger(mode, claim_id, constant, config_hash, path)

        'write' appends the constant of claim_id and returns it; 'read' returns the recorded constant,
        raising FileNotFoundError without a ledger and MissingClaimError for an unknown claim
    """
    ledger = ConstantsLedger(path)
    if mode == 'write':
        if constant is None:
            raise ValueError("constant is required for write")
        ledger.write(claim_id, constant, config_hash)
        return float(constant)
    if mode == 'read':
        return ledger.read(claim_id)
    raise ValueError(f"mode must be 'read' or 'write', got '{mode}'")
# ----------------------------------------------------------------------------------------------------------------------

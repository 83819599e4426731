"""Reading and writing the distribution JSON and counts CSV formats.

JSON: {"labels": [...], "probs": [...]} or {"labels": [...], "counts": [...]}
(exactly one of probs/counts; extra keys such as "usage" are ignored).
CSV: two columns `label,count` with a header row.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import pandas as pd

from distributions.fairness import Budget
from distributions.pmf import Pmf, RawUsage, pmf_from_counts, pmf_from_probs
from utils.errors import DistributionFormatError

logger = logging.getLogger("distributions.io")

PathLike = Union[str, Path]


def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def parse_distribution(payload: dict) -> Tuple[Pmf, Optional[RawUsage]]:
    if not isinstance(payload, dict):
        raise DistributionFormatError("distribution JSON must be an object")
    if "labels" not in payload:
        raise DistributionFormatError("distribution JSON needs a 'labels' list")
    has_probs, has_counts = "probs" in payload, "counts" in payload
    if has_probs == has_counts:
        raise DistributionFormatError("give exactly one of 'probs' or 'counts'")

    labels = payload["labels"]
    values = payload["probs"] if has_probs else payload["counts"]
    if not isinstance(labels, list) or not isinstance(values, list):
        raise DistributionFormatError("'labels' and 'probs'/'counts' must be lists")

    if has_probs:
        return pmf_from_probs(labels, values), None
    return pmf_from_counts(labels, values)


def load_distribution(path: PathLike) -> Tuple[Pmf, Optional[RawUsage]]:
    """Load a distribution JSON file; counts are normalized on the way in."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            payload = json.load(f)
    except FileNotFoundError as e:
        raise DistributionFormatError(f"distribution file not found: {path}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise DistributionFormatError(f"malformed JSON in {path}: {e}") from e
    except OSError as e:
        raise DistributionFormatError(f"cannot read distribution file {path}: {e}") from e

    pmf, raw = parse_distribution(payload)
    logger.info(f"Loaded {len(pmf)}-symbol distribution from {path}")
    return pmf, raw


def read_counts_csv(path: PathLike) -> Tuple[Pmf, RawUsage]:
    """Read a `label,count` CSV (header required) into a Pmf plus its raw counts."""
    try:
        # labels such as NA or null are symbols, not missing values
        df = pd.read_csv(path, dtype={"label": str}, keep_default_na=False, na_values=[""],
                         encoding='utf-8')
    except FileNotFoundError as e:
        raise DistributionFormatError(f"counts file not found: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DistributionFormatError(f"malformed counts CSV {path}: {e}") from e
    except OSError as e:
        raise DistributionFormatError(f"cannot read counts file {path}: {e}") from e

    columns = [str(c).strip().lower() for c in df.columns]
    if columns != ["label", "count"]:
        raise DistributionFormatError(
            f"counts CSV header must be 'label,count', got {','.join(map(str, df.columns))}"
        )
    df.columns = columns
    if df.empty:
        raise DistributionFormatError(f"counts CSV {path} has no rows")
    if df["label"].isna().any():
        raise DistributionFormatError("counts CSV has blank labels")

    counts = pd.to_numeric(df["count"], errors="coerce")
    if counts.isna().any():
        raise DistributionFormatError("counts CSV has non-numeric counts")

    return pmf_from_counts(df["label"].tolist(), counts.tolist())


def distribution_to_json(pmf: Pmf, usage: Optional[RawUsage] = None,
                         budget: Optional[Budget] = None) -> str:
    payload = pmf.to_dict()
    if usage is not None:
        payload["usage"] = {"counts": list(usage.counts)}
        if budget is not None:
            payload["usage"].update({"beta": budget.beta, "alpha": budget.alpha})
    return json.dumps(payload, indent=2)

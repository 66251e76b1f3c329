"""Certificate serialization: JSON-lines records with a summary line, and CSV."""

import csv
import json
import math

from .certify import FIELDS, summarize


def _clean(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def fmt17(v):
    """Render a value for CSV output with 17 significant digits."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_certificates_jsonl(path, certs, extra_summary=None):
    summary = summarize(certs)
    if extra_summary:
        summary.update(extra_summary)
    with open(path, "w") as fh:
        for c in certs:
            fh.write(json.dumps({k: _clean(v) for k, v in c.record().items()}, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": {k: _clean(v) for k, v in summary.items()}}, sort_keys=True) + "\n")
    return summary


def certificate_rows(certs):
    for c in certs:
        rec = c.record()
        row = {}
        for k in FIELDS:
            v = rec[k]
            if k in ("probe", "point"):
                for i, x in enumerate(v):
                    row[f"{k}_{i}"] = fmt17(float(x))
            else:
                row[k] = fmt17(v)
        yield row


def write_certificates_csv(path, certs):
    rows = list(certificate_rows(certs))
    header = ["probe_0", "probe_1", "point_0", "point_1", "point_2"] + [k for k in FIELDS if k not in ("probe", "point")]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def read_certificates_jsonl(path):
    records, summary = [], None
    with open(path) as fh:
        for line in fh:
            obj = json.loads(line)
            if "summary" in obj:
                summary = obj["summary"]
            else:
                records.append(obj)
    return records, summary

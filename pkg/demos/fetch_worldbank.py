"""
Fetching the real exports indicator
===================================

Downloads goods-and-services exports (current US$) from the World Bank
API and writes the long ``country,year,value`` layout that the ingest step
accepts. Needs network access. The acceptance tests for real data look for
``data/exports.csv``, which is where this writes by default.
"""

import json
import sys
import urllib.request
from pathlib import Path

from exportcast.ingest import DEFAULT_INDICATOR, DEFAULT_SPAN, DEFAULT_COUNTRIES

out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/exports.csv")
codes = ";".join(DEFAULT_COUNTRIES)
url = (f"https://api.worldbank.org/v2/country/{codes}/indicator/{DEFAULT_INDICATOR}"
       f"?format=json&per_page=2000&date={DEFAULT_SPAN[0]}:{DEFAULT_SPAN[1]}")

with urllib.request.urlopen(url, timeout=60) as resp:
    _, rows = json.load(resp)

lines = ["country,year,value"]
for r in sorted(rows, key=lambda r: (r["countryiso3code"], r["date"])):
    if r["value"] is not None:
        lines.append(f"{r['countryiso3code']},{r['date']},{r['value']!r}")
out.parent.mkdir(parents=True, exist_ok=True)
out.write_text("\n".join(lines) + "\n", encoding="utf-8")
print(f"wrote {len(lines) - 1} rows to {out}")

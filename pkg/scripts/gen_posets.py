"""Regenerate the bundled table of posets up to isomorphism."""

import sys
import time
from pathlib import Path

from twinforge.posetdb import DATA_FILE, KNOWN_COUNTS, enumerate_posets, write_table

if __name__ == "__main__":
    nmax = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    out = Path(__file__).resolve().parents[1] / "src" / "twinforge" / "data" / DATA_FILE
    t = time.time()
    write_table(out, nmax)
    counts = [len(lv) for lv in enumerate_posets(min(nmax, 5))]
    print(f"wrote {out} in {time.time() - t:.1f}s; small counts {counts}, expected {KNOWN_COUNTS[:len(counts)]}")

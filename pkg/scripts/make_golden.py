"""Regenerate tests/golden/result.json after an intentional change to seeded behavior."""

from pathlib import Path

from bigreedy.config import load_config
from bigreedy.harness import run_experiment

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"

if __name__ == "__main__":
    text = run_experiment(load_config(GOLDEN / "golden.cfg")).to_json()
    (GOLDEN / "result.json").write_text(text)
    print(f"wrote {GOLDEN / 'result.json'} ({len(text)} bytes)")

import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).resolve().parents[1] / "demos").glob("*.py"))


@pytest.mark.parametrize("script", DEMOS, ids=lambda p: p.stem)
def test_demo_runs(script, tmp_path):
    proc = subprocess.run([sys.executable, str(script), str(tmp_path)], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip()
    for svg in tmp_path.glob("*.svg"):
        ET.parse(svg)


def test_demos_present():
    assert len(DEMOS) >= 5

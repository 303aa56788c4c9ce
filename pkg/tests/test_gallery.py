import runpy
from pathlib import Path

import pytest

GALLERY = Path(__file__).resolve().parents[1] / "gallery"


@pytest.mark.parametrize("script", sorted(p.name for p in GALLERY.glob("*.py")))
def test_gallery_script_runs(script, capsys):
    runpy.run_path(str(GALLERY / script), run_name="__main__")
    assert capsys.readouterr().out

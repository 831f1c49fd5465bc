"""Importable alias for run-abelian.py, used by the console-script entry point."""

import importlib.util
from pathlib import Path

_spec = importlib.util.spec_from_file_location(
    "_run_abelian_script", Path(__file__).with_name("run-abelian.py")
)
_mod = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(_mod)
main = _mod.main

"""Build the isodrum_rs extension module with cargo and place it next to
this file so scripts in this directory can import it.

No Python build backend is required: the extension is an ordinary cdylib
produced by `cargo build -p isodrum-py`, renamed to the import name.
"""

from __future__ import annotations

import shutil
import subprocess
import sys
import sysconfig
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
PACKAGE_DIR = Path(__file__).resolve().parent


def _built_library(release: bool) -> Path:
    profile = "release" if release else "debug"
    stem = "isodrum_rs"
    if sys.platform.startswith("win"):
        name = f"{stem}.dll"
    elif sys.platform == "darwin":
        name = f"lib{stem}.dylib"
    else:
        name = f"lib{stem}.so"
    return REPO_ROOT / "target" / profile / name


def _extension_target() -> Path:
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    return PACKAGE_DIR / f"isodrum_rs{suffix}"


def ensure(release: bool = True) -> Path:
    """Compile (if needed) and copy the extension; returns its path."""
    target = _extension_target()
    cmd = ["cargo", "build", "-p", "isodrum-py"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=REPO_ROOT, check=True)
    built = _built_library(release)
    if not built.exists():
        raise FileNotFoundError(f"cargo did not produce {built}")
    if not target.exists() or built.stat().st_mtime > target.stat().st_mtime:
        shutil.copy2(built, target)
    return target


if __name__ == "__main__":
    print(ensure(release="--debug" not in sys.argv[1:]))

import re
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).parent

_VERSION_FILES = [HERE.joinpath("tomodesign", "__init__.py")]
_VERSION_PATTERN = re.compile(r"^(__version__\s*=\s*\")[^\"]*(\")", re.M)


def _poetry_version(*args: str) -> str:
    result = subprocess.run(["poetry", "version", *args], shell=False, check=True, capture_output=True)
    return result.stdout.decode().strip()


def update_version(version: str):
    """Bump the poetry version and mirror it into every ``__version__`` string."""
    _poetry_version(version)
    new_version = _poetry_version("--short")
    for path in _VERSION_FILES:
        content = path.read_text(encoding="utf-8")
        path.write_text(_VERSION_PATTERN.sub(rf"\g<1>{new_version}\g<2>", content), encoding="utf-8")
    print(f"tomodesign version is now {new_version}")


def task_update_version():
    update_version(sys.argv[1])

import json
import sys

from lfzeros.cli import execute
from lfzeros.config import from_dict


def run(d: dict, check: bool = True) -> dict:
    code, path = execute(from_dict(d), check=check)
    art = json.loads(path.read_text())
    print(f"[{d['kind']}] exit {code} -> {path}", file=sys.stderr)
    return art

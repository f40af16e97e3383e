import sys
from pathlib import Path

FIXTURES = str(Path(__file__).parent / "fixtures")
if FIXTURES not in sys.path:
    sys.path.insert(0, FIXTURES)

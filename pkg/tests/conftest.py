import sys
from pathlib import Path

# make tests importable as plain modules (helpers, oracles)
sys.path.insert(0, str(Path(__file__).parent))

import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

# allow `import helpers` from any test module
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "patchrank",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("patchrank")

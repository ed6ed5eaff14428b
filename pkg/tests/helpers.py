import os

LPMULT_SLOW = os.environ.get("LPMULT_SLOW", "0") not in ("", "0")
"""Whether the long refinement sweeps run; set in the environment or in `.env`."""

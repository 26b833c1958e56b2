# Copyright (c) 2025 The planbench developers
# All rights reserved.
#
#   Redistribution and use in source and binary forms, with or
#   without modification, are permitted provided that the following
#   conditions are met:
#
#    1. Redistributions of source code must retain the above copyright
#       notice, this list of conditions and the following disclaimer.
#    2. Redistributions in binary form must reproduce the above
#       copyright notice, this list of conditions and the following
#       disclaimer in the documentation and/or other materials provided
#       with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE
# COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT,
# INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING,
# BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES;
# LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER
# CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT
# LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN
# ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE
# POSSIBILITY OF SUCH DAMAGE.

from . import __version__ as planbench_version
from .logging_setup import log_sys_info
from plankit.terrain import geotiff_available

from datetime import datetime, timezone
from typing import Dict
import numpy as np
import matplotlib
import scipy
import platform
import sys
import os


def get_fingerprint() -> Dict[str, str]:
    """Machine description stored with every benchmark report."""
    return {
        "planbench": planbench_version,
        "python": platform.python_version(),
        "implementation": platform.python_implementation(),
        "platform": sys.platform,
        "machine": platform.machine(),
        "processor": platform.processor() or "unknown",
        "node": platform.node(),
        "cpu_count": str(os.cpu_count()),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "matplotlib": matplotlib.__version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def backend_info():
    lines = ["Raster backends:"]
    lines.append("\tESRI ASCII grid: builtin")
    lines.append("\tCSV: builtin")
    if geotiff_available():
        import rasterio

        lines.append(f"\tGeoTIFF: rasterio {rasterio.__version__}")
    else:
        lines.append("\tGeoTIFF: not available (install the geotiff extra)")
    lines.append("")
    return lines


def get_diagnostics():
    lines = []
    lines.append(f"planbench: {planbench_version}")
    log_sys_info(lines.append)
    lines.append("")

    lines.append("Fingerprint:")
    for k, v in get_fingerprint().items():
        lines.append(f"\t{k}: {v}")
    lines.append("")

    lines.extend(backend_info())
    lines.append("End of diagnostics")

    return "\n".join(lines)

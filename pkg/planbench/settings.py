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

"""Run configuration files.

A config file is TOML or JSON. Top-level scalar keys apply to every
subcommand, tables named after a subcommand apply to that one only:

    seed = 7

    [bench]
    planners = "dijkstra,astar"
    budget-s = 10

Keys use the long option names, with dashes or underscores. The result is
handed to click as a default map, so command line flags and environment
variables still win.
"""

from plankit.core import FormatError

from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import sys
import logging

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


SUBCOMMANDS = ("ingest", "sample-tasks", "plan", "bench", "report")


def _key(name: str) -> str:
    return name.strip().replace("-", "_")


class RunConfig(dict):
    """Settings read from a config file, keyed by option name."""

    def __init__(self, fname: Optional[Union[str, Path]] = None):
        super().__init__()
        self.fname = Path(fname).expanduser() if fname else None
        if self.fname is not None:
            self.update(self._load(self.fname))

    @staticmethod
    def _load(fname: Path) -> Dict[str, Any]:
        try:
            text = fname.read_text()
        except OSError as e:
            raise FormatError(f"Unable to read config: {e.strerror}", fname)
        try:
            if fname.suffix.lower() == ".json":
                data = json.loads(text)
            else:
                data = tomllib.loads(text)
        except ValueError as e:
            raise FormatError(f"Invalid config file: {e}", fname)
        if not isinstance(data, dict):
            raise FormatError("Config file must contain a table of settings", fname)
        unknown = [
            k for k, v in data.items() if isinstance(v, dict) and k not in SUBCOMMANDS
        ]
        if unknown:
            raise FormatError(f"Unknown config sections: {', '.join(unknown)}", fname)
        logger.debug("Loaded config %s", fname)
        return data

    @property
    def common(self) -> Dict[str, Any]:
        return {_key(k): v for k, v in self.items() if not isinstance(v, dict)}

    def for_command(self, name: str) -> Dict[str, Any]:
        """Defaults for one subcommand; its own table overrides common keys."""
        values = self.common
        values.update({_key(k): v for k, v in self.get(name, {}).items()})
        return values

    def default_map(self) -> Dict[str, Dict[str, Any]]:
        return {name: self.for_command(name) for name in SUBCOMMANDS}

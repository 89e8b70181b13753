# Copyright 2026 The qgse Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Ground-state energy estimation: QCELS phase estimation and QCM4 moments."""

from ._core import (
    InputError,
    ParseError,
    PauliSum,
    StateVector,
    TermCapExceeded,
    ansatz_spec,
    cumulants,
    evolve_exact,
    expectation,
    jordan_wigner_fcidump,
    qcels,
    qcm4,
    qcm4_energy,
    resolve_config,
    run_cli,
    std_error,
)

__all__ = [
    "InputError",
    "ParseError",
    "PauliSum",
    "StateVector",
    "TermCapExceeded",
    "ansatz_spec",
    "cumulants",
    "evolve_exact",
    "expectation",
    "jordan_wigner_fcidump",
    "qcels",
    "qcm4",
    "qcm4_energy",
    "resolve_config",
    "run_cli",
    "std_error",
]

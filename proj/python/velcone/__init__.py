# Copyright 2026 The velcone Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Accelerated first-order methods with velocity constraints."""

from ._velcone import (
    InfeasibleConeError,
    ProjectionResult,
    QuadraticProblem,
    VelocityCone,
    gen_compressed_sensing,
    illustrative_trajectory,
    power_approx,
    power_approx_grad,
    project,
    project_l1_ball,
    project_weighted_simplex,
    random_qp,
    run_compressed_sensing,
    solve_qp,
    stationarity_residual,
)

__all__ = [
    "InfeasibleConeError",
    "ProjectionResult",
    "QuadraticProblem",
    "VelocityCone",
    "gen_compressed_sensing",
    "illustrative_trajectory",
    "power_approx",
    "power_approx_grad",
    "project",
    "project_l1_ball",
    "project_weighted_simplex",
    "random_qp",
    "run_compressed_sensing",
    "solve_qp",
    "stationarity_residual",
]

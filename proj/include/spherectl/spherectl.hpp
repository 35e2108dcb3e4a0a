/*
 Copyright 2026 The spherectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SPHERECTL_SPHERECTL_HPP
#define SPHERECTL_SPHERECTL_HPP

#include "spherectl/errors.hpp"
#include "spherectl/geometry.hpp"
#include "spherectl/obstacle.hpp"
#include "spherectl/planner.hpp"
#include "spherectl/controller.hpp"
#include "spherectl/sim.hpp"
#include "spherectl/attitude.hpp"
#include "spherectl/analysis.hpp"
#include "spherectl/checks.hpp"
#include "spherectl/scenario.hpp"

#endif // SPHERECTL_SPHERECTL_HPP

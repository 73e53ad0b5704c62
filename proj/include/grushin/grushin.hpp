/*
 Copyright 2026 The grushin-mfg Authors

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

// Everything: geometry, dynamics, reachability, optimal control, mean field
// games, config parsing and artifact writers.

#ifndef GRUSHIN_GRUSHIN_HPP
#define GRUSHIN_GRUSHIN_HPP

#include "grushin/cli.hpp"
#include "grushin/config.hpp"
#include "grushin/core.hpp"
#include "grushin/dynamics.hpp"
#include "grushin/geometry.hpp"
#include "grushin/io.hpp"
#include "grushin/mfg.hpp"
#include "grushin/ocp.hpp"
#include "grushin/random.hpp"
#include "grushin/reachability.hpp"
#include "grushin/transport.hpp"

#endif // GRUSHIN_GRUSHIN_HPP

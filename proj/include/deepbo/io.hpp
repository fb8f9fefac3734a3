/*
 * Copyright 2026 The deepbo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPBO_IO_HPP_
#define DEEPBO_IO_HPP_

#include <json.hpp>

#include "deepbo/hpspace.hpp"

namespace deepbo {

// Parameter definition objects as they appear in table headers and config
// files: {"name": str, "kind": "continuous"|"discrete"|"categorical",
//         "range": [lo, hi] or [choice, ...], "scale": "linear"|"log"}.
ParamDef param_from_json(const nlohmann::json& j);
HyperparameterSpace space_from_json(const nlohmann::json& arr);
nlohmann::ordered_json space_to_json(const HyperparameterSpace& space);

}  // namespace deepbo

#endif  // DEEPBO_IO_HPP_

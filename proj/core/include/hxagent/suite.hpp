// Copyright 2026 The HxAgent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hxagent/json.hpp"
#include "hxagent/sim.hpp"

namespace hxagent {

struct TaskInstance {
    std::string id;
    std::string entry;
    std::string task;

    bool operator==(const TaskInstance&) const = default;
};

// One task family with disjoint training and evaluation instances.
struct TaskSpec {
    std::string task_id;
    std::vector<TaskInstance> training;
    std::vector<TaskInstance> evaluation;

    bool operator==(const TaskSpec&) const = default;
};

struct TaskSuite {
    std::vector<TaskSpec> tasks;

    bool operator==(const TaskSuite&) const = default;
};

Json to_json(const TaskSuite& suite);
// Throws Error("invalid-suite").
TaskSuite suite_from_json(const Json& j);
TaskSuite load_suite(const std::filesystem::path& path);

inline constexpr std::array<std::string_view, 5> kBuiltinFamilies = {"login-form", "search-engine", "tabbed-links",
                                                                     "checkbox-set", "form-wizard"};

// Training instances are numbered from here so they never coincide with
// evaluation instances.
inline constexpr int kTrainingInstanceBase = 100;

namespace sim {

// Builtin site `instance` of `family`. `filler` adds that many inert buttons
// to the first page. Throws Error("load-failure") for an unknown family.
//   login-form     username/password form, then a welcome page
//   search-engine  three results per page with prev/next links; instance 0
//                  reproduces the "8th result for Macie" page set
//   tabbed-links   nine tabs behind a three-wide strip with a scroller;
//                  instance 0 hides the target link in tab 7
//   checkbox-set   tick the named boxes and submit
//   form-wizard    two screens: names, then a country select
Site make_builtin_site(std::string_view family, int instance, std::size_t filler = 0);

}  // namespace sim

// The builtin families with `training` and `evaluation` instances each.
TaskSuite builtin_suite(std::size_t training, std::size_t evaluation);

}  // namespace hxagent

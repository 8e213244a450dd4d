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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/dom.hpp"
#include "hxagent/extractor.hpp"

namespace hxagent {

struct PageObservation {
    dom::Document document;
    RenderInfo render_info;
    std::string title;
    std::string url;
    std::optional<std::string> screenshot;
};

enum class ExecStatus { Ok, ElementNotFound, NotInteractable, NavigationTimeout };
std::string_view to_string(ExecStatus status);

struct ExecutionResult {
    ExecStatus status = ExecStatus::Ok;
    // Present exactly when status is Ok.
    std::optional<PageObservation> observation;
    std::string detail;

    bool ok() const noexcept { return status == ExecStatus::Ok; }
};

// Substrate the planner acts on. One instance per episode.
class Environment {
public:
    virtual ~Environment() = default;

    // Opens `entry` and observes the first page. Throws Error("load-failure").
    virtual PageObservation load(const std::string& entry) = 0;
    // Performs a click, input or select. The done pseudo-action and
    // input/select actions without content are rejected with
    // Error("not-executable").
    virtual ExecutionResult execute(const FeasibleAction& action) = 0;
    virtual PageObservation observe() = 0;
};

}  // namespace hxagent

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

#include <optional>
#include <string>
#include <vector>

#include "hxagent/environment.hpp"
#include "hxagent/extractor.hpp"
#include "hxagent/json.hpp"
#include "hxagent/memory.hpp"

namespace hxagent {

enum class Command { Open, Click, Type, Select, AssertTitle };
std::string_view to_string(Command command);
Command parse_command(std::string_view text);

struct ScriptStep {
    int ordinal = 0;
    Command command = Command::Click;
    // An xpath; empty for open and assert-title.
    std::string locator;
    // Text to type, option to select, url to open or title to expect.
    std::optional<std::string> argument;

    bool operator==(const ScriptStep&) const = default;
};

inline constexpr int kScriptSchemaVersion = 1;

struct TestScript {
    int schema_version = kScriptSchemaVersion;
    std::string task;
    std::string entry;
    std::vector<ScriptStep> steps;

    bool operator==(const TestScript&) const = default;
};

// click -> click, input -> type, select -> select.
// Throws Error("unmappable-action") for anything else.
ScriptStep emit_step(const FeasibleAction& action, int ordinal = 1);

// Open step for `entry` followed by one step per recorded action.
// Throws Error("incomplete-trace") unless the trace ended with done.
TestScript emit_script(const EpisodeTrace& trace, const std::string& entry);

// Throws Error("invalid-script") on structural problems.
void validate(const TestScript& script);

Json to_json(const TestScript& script);
TestScript script_from_json(const Json& j);

// Line-oriented replay form with a comment header.
std::string render_script_text(const TestScript& script);

// Runs the script; returns the final observation. Throws
// Error("replay-failed") when a step cannot be performed or an assertion
// does not hold.
PageObservation replay(const TestScript& script, Environment& env);

}  // namespace hxagent

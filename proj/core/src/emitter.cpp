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

#include "hxagent/emitter.hpp"

#include "hxagent/error.hpp"

namespace hxagent {

std::string_view to_string(Command command) {
    switch (command) {
        case Command::Open: return "open";
        case Command::Click: return "click";
        case Command::Type: return "type";
        case Command::Select: return "select";
        case Command::AssertTitle: return "assert-title";
    }
    return "click";
}

Command parse_command(std::string_view text) {
    for (auto c : {Command::Open, Command::Click, Command::Type, Command::Select, Command::AssertTitle}) {
        if (to_string(c) == text) return c;
    }
    throw Error("invalid-script", "unknown command " + std::string(text));
}

ScriptStep emit_step(const FeasibleAction& action, int ordinal) {
    ScriptStep step;
    step.ordinal = ordinal;
    step.locator = action.target.xpath;
    switch (action.operation) {
        case Operation::Click:
            step.command = Command::Click;
            return step;
        case Operation::Input:
        case Operation::Select:
            if (!action.input_content) throw Error("unmappable-action", "missing input content");
            step.command = action.operation == Operation::Input ? Command::Type : Command::Select;
            step.argument = action.input_content;
            return step;
        case Operation::Done:
            break;
    }
    throw Error("unmappable-action", std::string(to_string(action.operation)));
}

TestScript emit_script(const EpisodeTrace& trace, const std::string& entry) {
    if (trace.outcome != Outcome::Done) {
        throw Error("incomplete-trace", "episode ended with " + std::string(to_string(trace.outcome)));
    }
    TestScript script;
    script.task = trace.task;
    script.entry = entry;
    script.steps.push_back(ScriptStep{1, Command::Open, "", entry});
    for (const auto& pair : trace.pairs) {
        script.steps.push_back(emit_step(pair.action, static_cast<int>(script.steps.size()) + 1));
    }
    return script;
}

void validate(const TestScript& script) {
    if (script.schema_version != kScriptSchemaVersion) {
        throw Error("invalid-script", "unsupported schema version " + std::to_string(script.schema_version));
    }
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& s = script.steps[i];
        auto where = "step " + std::to_string(i + 1);
        if (s.ordinal != static_cast<int>(i) + 1) throw Error("invalid-script", where + " has ordinal " + std::to_string(s.ordinal));
        bool needs_argument = s.command != Command::Click;
        if (needs_argument && !s.argument) throw Error("invalid-script", where + " needs an argument");
        bool needs_locator = s.command == Command::Click || s.command == Command::Type || s.command == Command::Select;
        if (needs_locator && s.locator.empty()) throw Error("invalid-script", where + " needs a locator");
    }
}

Json to_json(const TestScript& script) {
    Json steps = Json::array();
    for (const auto& s : script.steps) {
        Json j;
        j["ordinal"] = s.ordinal;
        j["command"] = std::string(to_string(s.command));
        j["locator"] = s.locator;
        if (s.argument) j["argument"] = *s.argument;
        steps.push_back(std::move(j));
    }
    Json j;
    j["schema_version"] = script.schema_version;
    j["task"] = script.task;
    j["entry"] = script.entry;
    j["steps"] = std::move(steps);
    return j;
}

TestScript script_from_json(const Json& j) {
    try {
        TestScript script;
        script.schema_version = j.at("schema_version").get<int>();
        script.task = j.at("task").get<std::string>();
        script.entry = j.at("entry").get<std::string>();
        for (const auto& sj : j.at("steps")) {
            ScriptStep s;
            s.ordinal = sj.at("ordinal").get<int>();
            s.command = parse_command(sj.at("command").get<std::string>());
            s.locator = sj.value("locator", "");
            if (sj.contains("argument")) s.argument = sj.at("argument").get<std::string>();
            script.steps.push_back(std::move(s));
        }
        validate(script);
        return script;
    } catch (const Json::exception& e) {
        throw Error("invalid-script", e.what());
    }
}

std::string render_script_text(const TestScript& script) {
    std::string out;
    out += "# task: " + script.task + "\n";
    out += "# entry: " + script.entry + "\n";
    out += "# steps: " + std::to_string(script.steps.size()) + "\n";
    for (const auto& s : script.steps) {
        out += std::to_string(s.ordinal) + " " + std::string(to_string(s.command));
        if (!s.locator.empty()) out += " xpath=" + s.locator;
        if (s.argument) out += " '" + *s.argument + "'";
        out += "\n";
    }
    return out;
}

PageObservation replay(const TestScript& script, Environment& env) {
    validate(script);
    std::optional<PageObservation> page;
    for (const auto& s : script.steps) {
        auto where = "step " + std::to_string(s.ordinal);
        if (s.command == Command::Open) {
            page = env.load(*s.argument);
            continue;
        }
        if (!page) throw Error("replay-failed", where + " runs before any page was opened");
        if (s.command == Command::AssertTitle) {
            if (page->title != *s.argument) {
                throw Error("replay-failed", where + " expected title '" + *s.argument + "', got '" + page->title + "'");
            }
            continue;
        }
        FeasibleAction action;
        action.operation = s.command == Command::Click ? Operation::Click
                           : s.command == Command::Type ? Operation::Input
                                                        : Operation::Select;
        action.target.xpath = s.locator;
        action.input_content = s.argument;
        auto result = env.execute(action);
        if (!result.ok()) {
            throw Error("replay-failed", where + ": " + std::string(to_string(result.status)) + " " + result.detail);
        }
        page = std::move(result.observation);
    }
    if (!page) throw Error("replay-failed", "script has no open step");
    return std::move(*page);
}

}  // namespace hxagent

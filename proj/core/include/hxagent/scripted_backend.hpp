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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/extractor.hpp"
#include "hxagent/json.hpp"
#include "hxagent/llm.hpp"

namespace hxagent {

// One step of a known-good action sequence, identified the way prompts show
// it: operation plus xpath, with the content for input/select steps.
struct PlanStep {
    Operation operation = Operation::Click;
    std::string xpath;
    std::optional<std::string> input;

    bool operator==(const PlanStep&) const = default;
};

// A row of a script: which requests it answers and how.
//
// Matching: `purposes` (empty = any), every `contains` substring present and
// no `not_contains` substring present. The first matching entry wins.
//
// Answering: either a canned `response`, in which the placeholders
//   {{done_index}}          number of the DONE candidate
//   {{candidate:TEXT}}      number of the first candidate line containing TEXT
//   {{count:TEXT}}          occurrences of TEXT in the prompt
// are expanded, or a `plan`, in which case the entry acts as a policy that
// reads its progress from the step history in the prompt and picks the next
// planned step (or DONE once the plan is exhausted).
struct ScriptEntry {
    std::vector<Purpose> purposes;
    std::vector<std::string> contains;
    std::vector<std::string> not_contains;
    std::optional<std::string> response;
    std::optional<std::vector<PlanStep>> plan;
    std::optional<std::size_t> prompt_tokens;
    std::optional<std::size_t> output_tokens;
};

// Deterministic offline backend: the response is a pure function of the
// request. In strict mode an unmatched request throws
// Error("scripted-unmatched"); otherwise `fallback` is returned.
class ScriptedBackend : public LlmBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> entries, bool strict = true, std::string fallback = {});

    static ScriptedBackend from_json(const Json& j);
    static ScriptedBackend from_file(const std::filesystem::path& path);

    BackendReply complete(const CompletionRequest& request, std::chrono::milliseconds timeout) override;

    const std::vector<ScriptEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<ScriptEntry> entries_;
    bool strict_;
    std::string fallback_;
};

Json to_json(const PlanStep& step);
PlanStep plan_step_from_json(const Json& j);
Json to_json(const ScriptEntry& entry);
ScriptEntry script_entry_from_json(const Json& j);

// Plan-following answer for a prompt; exposed for tests.
std::string follow_plan(const std::vector<PlanStep>& plan, const CompletionRequest& request);

// Actions recorded in the "> STEP #k:" lines of a rendered step history,
// in order. Lines that do not parse are skipped.
std::vector<PlanStep> parse_history_steps(std::string_view prompt);

}  // namespace hxagent

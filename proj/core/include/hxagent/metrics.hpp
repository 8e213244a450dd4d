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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/extractor.hpp"
#include "hxagent/json.hpp"
#include "hxagent/llm.hpp"
#include "hxagent/memory.hpp"

namespace hxagent {

// An expected step. The element is matched by xpath when one is given,
// otherwise by normalized text. With exact_input set, the content of an
// input or select step must match too (surrounding whitespace ignored).
struct ReferenceAction {
    Operation operation = Operation::Click;
    std::optional<std::string> xpath;
    std::optional<std::string> text;
    std::optional<std::string> input;
    bool exact_input = true;

    bool operator==(const ReferenceAction&) const = default;
};

struct GroundTruthInstance {
    std::string id;
    std::string task_text;
    std::vector<ReferenceAction> actions;
};

struct GroundTruth {
    std::string task_id;
    std::vector<GroundTruthInstance> instances;

    const GroundTruthInstance* find(const std::string& instance_id) const;
};

// Throws Error("invalid-ground-truth") for an empty action list or a
// reference without xpath and text.
void validate(const GroundTruthInstance& instance);

ReferenceAction reference_from(const FeasibleAction& action);

Json to_json(const ReferenceAction& ref);
ReferenceAction reference_from_json(const Json& j);
Json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);
// A single task object or {"tasks": [...]}.
std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path);

bool action_equal(const FeasibleAction& predicted, const ReferenceAction& truth);

// Whole-sequence equality: same length, every step equal.
bool instance_correct(const std::vector<FeasibleAction>& predicted, const std::vector<ReferenceAction>& truth);

// 100 * correct / total. Throws Error("no-results") for an empty list.
double exact_match(const std::vector<bool>& results);

// Matched prefix length over truth length. Throws Error("invalid-ground-truth")
// for an empty truth.
double prefix_accuracy(const std::vector<FeasibleAction>& predicted, const std::vector<ReferenceAction>& truth);

struct StepAccuracy {
    std::size_t step = 0;
    // Instances whose truth has >= step actions and whose earlier predictions
    // were all correct.
    std::size_t reached = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;

    bool operator==(const StepAccuracy&) const = default;
};

struct ScoredSequence {
    std::vector<FeasibleAction> predicted;
    std::vector<ReferenceAction> truth;
};

// One entry per step k while at least one instance reaches k.
// Throws Error("no-results") for an empty list.
std::vector<StepAccuracy> per_step_accuracy(const std::vector<ScoredSequence>& sequences);

// Rounded to one decimal.
double round1(double value);

struct InstanceResult {
    std::string task_id;
    std::string instance_id;
    std::string episode_id;
    Outcome outcome = Outcome::Done;
    std::vector<FeasibleAction> predicted;
    std::vector<ReferenceAction> truth;
};

struct InstanceScore {
    std::string task_id;
    std::string instance_id;
    std::string episode_id;
    Outcome outcome = Outcome::Done;
    bool correct = false;
    double prefix_accuracy = 0.0;
    std::size_t predicted_steps = 0;
    std::size_t truth_steps = 0;
};

struct MetricsReport {
    double exact_match_pct = 0.0;
    double prefix_match_pct = 0.0;
    std::vector<StepAccuracy> per_step;
    std::size_t instances = 0;
    std::size_t correct_instances = 0;
    std::vector<InstanceScore> scores;
    Json token_totals;

    Json to_json() const;
    // One row per instance followed by the summary rows.
    std::string to_csv() const;
    // Compact text table with integer percentages.
    std::string summary() const;
};

// Throws Error("no-results") for an empty list.
MetricsReport build_report(const std::vector<InstanceResult>& results, const TokenLedger& ledger);

}  // namespace hxagent

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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/environment.hpp"
#include "hxagent/experience.hpp"
#include "hxagent/extractor.hpp"
#include "hxagent/llm.hpp"
#include "hxagent/memory.hpp"

namespace hxagent {

enum class Phase { Training, Evaluation };
std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view text);

inline constexpr std::size_t kDefaultStepLimit = 20;

struct PlannerConfig {
    std::size_t step_limit = kDefaultStepLimit;
    MemoryWindow memory_window = MemoryWindow::all();
    MemoryMode memory_mode = MemoryMode::StatesAndActions;
    std::size_t max_exemplars = kDefaultMaxExemplars;
    std::size_t state_budget = kDefaultStateBudget;
    Phase phase = Phase::Training;
    // Required in the evaluation phase; never modified.
    std::optional<ExperienceSnapshot> frozen_experience;

    // Throws Error("invalid-config") or Error("missing-experience").
    void validate() const;
};

// Text of the synthetic completion candidate appended after the page actions.
inline constexpr std::string_view kDoneCandidate = "DONE — the task is complete";

struct Decision {
    FeasibleAction chosen;
    // 1-based position in the list the model chose from.
    int index = 0;
    std::string description;
    std::string reason;
    bool was_disambiguated = false;
};

// Main prompt. `candidates` are the page actions; the done candidate is
// appended as the last entry.
std::string build_main_prompt(const std::string& state, const std::vector<FeasibleAction>& candidates,
                              const std::string& memory_section, const std::string& experience_section);

std::string build_duplicate_prompt(const std::vector<FeasibleAction>& duplicates, const FeasibleAction& first_choice,
                                   const std::string& memory_section, const std::string& experience_section);

// `options` lists the choices of a select target (empty for text fields).
std::string build_input_prompt(const FeasibleAction& target, const std::vector<std::string>& options,
                               const std::string& memory_section, const std::string& experience_section);

std::string build_summary_prompt();

// Per-call prompt sections for one step of an episode.
struct PromptContext {
    std::string memory_section;
    std::string experience_section;
};

Decision choose_next_action(const WebState& state, const std::vector<FeasibleAction>& candidates,
                            const PromptContext& context, LlmGateway& llm, PromptLog* log = nullptr);

// Re-asks with the screenshot and only the duplicate group. Without a
// screenshot the first member in document order is returned and a warning
// is logged.
Decision disambiguate_with_vision(const std::optional<std::string>& screenshot,
                                  const std::vector<FeasibleAction>& duplicates, const Decision& first_choice,
                                  const PromptContext& context, LlmGateway& llm, PromptLog* log = nullptr);

// Throws Error("empty-input-content") when the model returns nothing.
std::string generate_input_content(const FeasibleAction& target, const std::vector<std::string>& options,
                                   const PromptContext& context, LlmGateway& llm, PromptLog* log = nullptr);

// Summarizer that asks the model to describe a screenshot.
Summarizer llm_summarizer(LlmGateway& llm, PromptLog* log = nullptr);

// Verdict for a finished episode, or nullopt to leave it for human review.
using Judge = std::function<std::optional<Verdict>(const EpisodeTrace& trace, Environment& env)>;
using Clock = std::function<std::string()>;

// UTC wall clock in ISO 8601.
std::string utc_now();

struct PlannerServices {
    LlmGateway* llm = nullptr;
    PromptLog* prompt_log = nullptr;
    // Training phase: source of the live experience and target of updates.
    ExperienceStore* store = nullptr;
    RuleProvider rule_provider;
    Judge judge;
    Summarizer summarizer;
    Clock clock;
};

struct EpisodeIds {
    std::string episode_id;
    std::string task_id;
};

// One full episode. The returned trace is closed with outcome done,
// step_limit or error (the error text recorded). In the training phase a
// closed episode is judged and committed to services.store: done episodes
// take the judge's verdict, step_limit and error episodes count as
// incorrect. Episodes the judge leaves open are returned unjudged.
EpisodeTrace run_episode(const std::string& task, const std::string& entry, Environment& env,
                         PlannerServices& services, const PlannerConfig& config, const EpisodeIds& ids = {});

}  // namespace hxagent

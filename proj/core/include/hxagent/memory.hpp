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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hxagent/extractor.hpp"
#include "hxagent/json.hpp"

namespace hxagent {

enum class Outcome { Running, Done, StepLimit, Error };
enum class Verdict { Correct, Incorrect };

std::string_view to_string(Outcome outcome);
Outcome parse_outcome(std::string_view text);
std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view text);

struct StateActionPair {
    WebState state;
    FeasibleAction action;
    int step_index = 0;
    // Model rationale attached to the decision, kept for reviewers.
    std::string reason;

    bool operator==(const StateActionPair&) const = default;
};

// Short-term memory of one episode: the task and the ordered state/action
// history. Traces are owned by exactly one episode while running.
struct EpisodeTrace {
    std::string episode_id;
    std::string task_id;
    std::string entry;
    std::string task;
    std::string site_title;
    std::vector<StateActionPair> pairs;
    Outcome outcome = Outcome::Running;
    std::optional<Verdict> verdict;
    std::string error;
    std::string started_at;
    std::string finished_at;

    bool closed() const noexcept { return outcome != Outcome::Running; }
    std::vector<FeasibleAction> actions() const;

    bool operator==(const EpisodeTrace&) const = default;
};

// Throws Error("empty-task") for an empty task.
EpisodeTrace new_trace(std::string task, std::string site_title);

// Throws Error("trace-closed") once the outcome is no longer running, and
// Error("done-not-recorded") for the done pseudo-action.
void append(EpisodeTrace& trace, WebState state, FeasibleAction action, std::string reason = {});

// Sets the terminal outcome. Throws Error("trace-closed") if already closed.
void close(EpisodeTrace& trace, Outcome outcome, std::string error = {});

// Memory capacity: all pairs, or the N most recent ones.
class MemoryWindow {
public:
    static MemoryWindow all() { return MemoryWindow{}; }
    // Throws Error("invalid-window") for n == 0.
    static MemoryWindow last(std::size_t n);
    // "all" or a positive integer.
    static MemoryWindow parse(std::string_view text);

    bool is_all() const noexcept { return !capacity_; }
    std::size_t visible(std::size_t length) const noexcept;
    std::string to_string() const;

    bool operator==(const MemoryWindow&) const = default;

private:
    std::optional<std::size_t> capacity_;
};

enum class MemoryMode { StatesAndActions, ActionsOnly };

// "<operation> on <tag> '<text>' (<xpath>)", plus " with input '<content>'"
// when the action carries content.
std::string render_action_line(const FeasibleAction& action);

// Step history section of the planner prompt. Shows the min(window, n) most
// recent pairs, renumbered from 1.
std::string render_memory_section(const EpisodeTrace& trace, MemoryWindow window = MemoryWindow::all(),
                                  MemoryMode mode = MemoryMode::StatesAndActions);

Json to_json(const EpisodeTrace& trace);
EpisodeTrace trace_from_json(const Json& j);

}  // namespace hxagent

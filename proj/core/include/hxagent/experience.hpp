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
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/json.hpp"
#include "hxagent/llm.hpp"
#include "hxagent/memory.hpp"

namespace hxagent {

struct Rule {
    std::string text;
    std::string source_episode;
    int created_at = 0;

    bool operator==(const Rule&) const = default;
};

// Long-term experience of one task family. Committed snapshots are immutable.
struct ExperienceSnapshot {
    std::string task_id;
    std::vector<EpisodeTrace> correct_traces;
    std::vector<EpisodeTrace> incorrect_traces;
    std::vector<Rule> rules;
    std::vector<int> outcome_history;
    int captured_at_episode = 0;

    bool empty() const noexcept { return correct_traces.empty() && rules.empty(); }
    bool operator==(const ExperienceSnapshot&) const = default;
};

struct MovingAveragePoint {
    int episode = 0;
    double value = 0.0;

    bool operator==(const MovingAveragePoint&) const = default;
};

inline constexpr std::size_t kDefaultMaxExemplars = 8;
inline constexpr std::size_t kDefaultAverageWindow = 10;
inline constexpr double kDefaultStopThreshold = 0.9;
inline constexpr int kRuleRetries = 2;

// Produces a new rule from the banks of `snapshot` (which already holds the
// failing trace). Only the text of the returned rule is used.
using RuleProvider = std::function<Rule(const ExperienceSnapshot& snapshot)>;

// Case-folded, whitespace-collapsed rule text.
std::string normalize_rule(std::string_view text);

// Folds one judged episode into `snapshot` and returns the result. A correct
// trace joins the correct bank; an incorrect one joins the incorrect bank and
// a new rule is requested. If no novel rule can be obtained the episode is
// still recorded, without a rule. Throws Error("unjudged-trace").
ExperienceSnapshot update(ExperienceSnapshot snapshot, const EpisodeTrace& trace, const RuleProvider& provider);

std::string build_rule_prompt(const std::vector<EpisodeTrace>& correct, const std::vector<EpisodeTrace>& incorrect,
                              const std::vector<Rule>& rules);

// Asks the model for a rule that differs from every existing one, retrying
// `retries` times on a duplicate. Throws Error("rule-duplicate"),
// Error("empty-rule") or Error("no-failure-to-explain").
Rule extract_rule(const std::vector<EpisodeTrace>& correct, const std::vector<EpisodeTrace>& incorrect,
                  const std::vector<Rule>& rules, LlmGateway& gateway, PromptLog* log = nullptr,
                  int retries = kRuleRetries);

RuleProvider llm_rule_provider(LlmGateway& gateway, PromptLog* log = nullptr);

// Experience section of the planner prompt: the most recent `max_exemplars`
// successful trials (oldest first) followed by the numbered rules. An empty
// snapshot renders as "".
std::string render_experience_section(const ExperienceSnapshot& snapshot,
                                      std::size_t max_exemplars = kDefaultMaxExemplars);

// Point k (1-based) is the mean of entries max(1, k-window+1)..k.
// Throws Error("invalid-window") for window 0.
std::vector<MovingAveragePoint> moving_average(const std::vector<int>& history,
                                               std::size_t window = kDefaultAverageWindow);

// True once the latest full window of `history` averages at least `threshold`.
bool should_stop(const std::vector<int>& history, std::size_t window = kDefaultAverageWindow,
                 double threshold = kDefaultStopThreshold);

using SnapshotPtr = std::shared_ptr<const ExperienceSnapshot>;
using SnapshotTimeline = std::vector<SnapshotPtr>;

// Episode whose snapshot should be frozen: the earliest episode k >= window
// whose moving average reaches `threshold`; otherwise the latest episode with
// the highest full-window average (all points if no window ever filled).
// Throws Error("no-training-history").
int select_optimal_episode(const std::vector<int>& history, std::size_t window = kDefaultAverageWindow,
                           double threshold = kDefaultStopThreshold);

// Snapshot captured at select_optimal_episode of the latest history.
SnapshotPtr select_optimal(const SnapshotTimeline& timeline, std::size_t window = kDefaultAverageWindow,
                           double threshold = kDefaultStopThreshold);

Json to_json(const ExperienceSnapshot& snapshot);
// Throws Error("snapshot-corrupt") naming the offending field path.
ExperienceSnapshot snapshot_from_json(const Json& j);
void persist(const ExperienceSnapshot& snapshot, const std::filesystem::path& path);
ExperienceSnapshot load_snapshot(const std::filesystem::path& path);

// experience/<task>/episode-NNNN.json
std::filesystem::path snapshot_path(const std::filesystem::path& experience_dir, const std::string& task_id,
                                    int episode);

// Single-writer, multi-reader holder of one task's timeline. Readers get a
// fully committed snapshot; commits are serialized.
class ExperienceStore {
public:
    // With a directory, every commit is persisted under it.
    explicit ExperienceStore(std::string task_id, std::optional<std::filesystem::path> experience_dir = {});

    // Reads every persisted snapshot of `task_id`, if any.
    static std::unique_ptr<ExperienceStore> open(const std::filesystem::path& experience_dir,
                                                 const std::string& task_id);

    const std::string& task_id() const noexcept { return task_id_; }
    SnapshotPtr current() const;
    // Entry 0 is the initial empty snapshot; entry k follows episode k.
    SnapshotTimeline timeline() const;

    SnapshotPtr commit(const EpisodeTrace& judged, const RuleProvider& provider);

private:
    std::string task_id_;
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    SnapshotTimeline timeline_;
};

}  // namespace hxagent

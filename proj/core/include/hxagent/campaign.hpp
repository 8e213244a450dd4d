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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hxagent/emitter.hpp"
#include "hxagent/environment.hpp"
#include "hxagent/experience.hpp"
#include "hxagent/json.hpp"
#include "hxagent/llm.hpp"
#include "hxagent/metrics.hpp"
#include "hxagent/planner.hpp"
#include "hxagent/remote_backend.hpp"
#include "hxagent/scripted_backend.hpp"
#include "hxagent/suite.hpp"
#include "hxagent/webdriver.hpp"

namespace hxagent {

enum class EnvBackend { Sim, WebDriver };
enum class LlmKind { Scripted, Remote };
// Where training verdicts come from. auto: ground truth when one exists for
// the instance, else the simulator goal, else a human.
enum class JudgeMode { Auto, GroundTruth, Goal, Human };

EnvBackend parse_env_backend(std::string_view text);
LlmKind parse_llm_kind(std::string_view text);
JudgeMode parse_judge_mode(std::string_view text);
std::string_view to_string(EnvBackend backend);
std::string_view to_string(LlmKind kind);
std::string_view to_string(JudgeMode mode);

// Script value that builds a correct plan-following policy for every sim
// instance of the suite instead of reading a file.
inline constexpr std::string_view kBuiltinPerfectPolicy = "builtin:perfect";

struct CampaignConfig {
    // Builtin suite when unset.
    std::optional<std::filesystem::path> task_suite;
    std::optional<std::filesystem::path> ground_truth;
    EnvBackend backend = EnvBackend::Sim;
    WebDriverConfig webdriver;
    LlmKind llm = LlmKind::Scripted;
    // Path or kBuiltinPerfectPolicy.
    std::string llm_script = std::string(kBuiltinPerfectPolicy);
    RemoteLlmConfig remote;
    RetryPolicy retry;
    std::chrono::milliseconds llm_timeout{60'000};

    std::size_t training_episodes = 20;
    bool early_stop = false;
    std::size_t average_window = kDefaultAverageWindow;
    double stop_threshold = kDefaultStopThreshold;
    JudgeMode judge = JudgeMode::Auto;

    std::size_t eval_instances = 25;
    // Snapshot file to freeze for evaluation; otherwise the optimal snapshot
    // of each task's training timeline under out_dir is used.
    std::optional<std::filesystem::path> experience_snapshot;

    PlannerConfig planner;
    std::filesystem::path out_dir = "hxagent-out";

    // Throws Error("invalid-config").
    void validate() const;
};

// Reads the JSON config file; relative paths resolve against its directory.
// Throws Error("invalid-config").
CampaignConfig load_config(const std::filesystem::path& path);
CampaignConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json to_json(const CampaignConfig& config);

// Output layout under the campaign directory.
struct OutputLayout {
    std::filesystem::path root;

    std::filesystem::path traces(const std::string& task_id, Phase phase) const;
    std::filesystem::path trace_file(const std::string& task_id, Phase phase, const std::string& episode_id) const;
    std::filesystem::path prompts(const std::string& task_id, Phase phase) const;
    std::filesystem::path prompt_file(const std::string& task_id, Phase phase, const std::string& episode_id) const;
    std::filesystem::path experience() const;
    std::filesystem::path reports() const;
    std::filesystem::path script_file(const std::string& task_id, const std::string& episode_id) const;
};

std::string episode_id(const std::string& task_id, Phase phase, std::size_t ordinal);

// Oracle sequences of the sim instances of `suite` as ground truth.
std::vector<GroundTruth> oracle_ground_truth(const TaskSuite& suite);
// Plan-following policy script for every sim instance of `suite`.
Json perfect_policy_script(const TaskSuite& suite);

struct TaskTrainingSummary {
    std::string task_id;
    std::size_t episodes_run = 0;
    std::size_t judged = 0;
    std::vector<int> history;
    std::optional<std::string> pending_episode;
    bool stopped_early = false;
};

struct TrainingSummary {
    std::vector<TaskTrainingSummary> tasks;
    std::size_t errors = 0;
    Json to_json() const;
};

struct EvaluationResult {
    MetricsReport report;
    // Episode whose snapshot was frozen, per task.
    std::map<std::string, int> experience_episode;
    std::size_t unscored = 0;
};

// A training or evaluation campaign over one task suite. Tasks run
// sequentially in suite order, episodes of a task in instance order.
class Campaign {
public:
    explicit Campaign(CampaignConfig config);
    ~Campaign();

    // Runs up to training_episodes judged episodes per task, resuming from
    // the persisted experience. A task whose latest episode awaits a human
    // verdict is skipped until that verdict arrives.
    TrainingSummary train();

    // Runs eval_instances episodes per task with frozen experience and writes
    // the report and scripts. Throws Error("missing-experience").
    EvaluationResult evaluate();

    // One episode outside any campaign bookkeeping.
    EpisodeTrace run_single(const std::string& task, const std::string& entry,
                            const std::optional<ExperienceSnapshot>& experience);

    const CampaignConfig& config() const noexcept { return config_; }
    const TaskSuite& suite() const noexcept { return suite_; }
    const OutputLayout& layout() const noexcept { return layout_; }
    LlmGateway& gateway() noexcept { return *gateway_; }
    RuleProvider rule_provider();
    std::unique_ptr<Environment> make_environment() const;
    // Ground truth for an instance, if any.
    std::optional<std::vector<ReferenceAction>> truth_for(const std::string& task_id, const TaskInstance& instance);

private:
    Clock make_clock() const;
    std::optional<Verdict> judge(const std::string& task_id, const TaskInstance& instance, const EpisodeTrace& trace,
                                 Environment& env);
    void write_episode(const EpisodeTrace& trace, Phase phase, const PromptLog& log) const;

    CampaignConfig config_;
    TaskSuite suite_;
    OutputLayout layout_;
    std::shared_ptr<LlmBackend> backend_;
    std::unique_ptr<LlmGateway> gateway_;
    std::vector<GroundTruth> truths_;
    std::map<std::string, std::vector<ReferenceAction>> oracle_cache_;
};

// Rebuilds the evaluation report from the traces and prompt logs under
// out_dir. Token totals are recomputed from the prompt logs.
MetricsReport rebuild_report(const CampaignConfig& config);

// Token ledger summed over every prompt log (*.jsonl) under `dir`.
TokenLedger ledger_from_prompt_logs(const std::filesystem::path& dir);

// Feasible actions and state of a page: an HTML file, a sim entry, or (with
// a WebDriver config) a live url.
Json extract_page(const std::string& source, const std::optional<WebDriverConfig>& webdriver);

// Writes suite.json, ground-truth.json, policy.json and config.json for the
// builtin suite into `dir`.
void write_builtin_bundle(const std::filesystem::path& dir, std::size_t training, std::size_t evaluation);

}  // namespace hxagent

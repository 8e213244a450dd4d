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

#include "hxagent/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>

#include <spdlog/spdlog.h>

#include "hxagent/error.hpp"
#include "hxagent/sim.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_config(const std::string& detail) { throw Error("invalid-config", detail); }

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        bad_config(std::string("\"") + key + "\" has the wrong type");
    }
}

std::chrono::milliseconds ms_or(const Json& j, const char* key, std::chrono::milliseconds fallback) {
    return std::chrono::milliseconds(get_or<long long>(j, key, fallback.count()));
}

std::string logical_time(long seconds) {
    std::time_t t = seconds;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<ReferenceAction> references(const std::vector<FeasibleAction>& actions) {
    std::vector<ReferenceAction> out;
    for (const auto& a : actions) out.push_back(reference_from(a));
    return out;
}

std::vector<fs::path> sorted_files(const fs::path& dir, std::string_view extension) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Ordinal encoded in "<task>-<phase>-NNNN".
std::size_t ordinal_of(const std::string& id) {
    auto dash = id.rfind('-');
    if (dash == std::string::npos) return 0;
    try {
        return std::stoul(id.substr(dash + 1));
    } catch (const std::exception&) {
        return 0;
    }
}

void write_json(const fs::path& path, const Json& j) { util::write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace

EnvBackend parse_env_backend(std::string_view text) {
    if (text == "sim") return EnvBackend::Sim;
    if (text == "webdriver") return EnvBackend::WebDriver;
    bad_config("unknown environment backend " + std::string(text));
}

LlmKind parse_llm_kind(std::string_view text) {
    if (text == "scripted") return LlmKind::Scripted;
    if (text == "remote") return LlmKind::Remote;
    bad_config("unknown llm backend " + std::string(text));
}

JudgeMode parse_judge_mode(std::string_view text) {
    if (text == "auto") return JudgeMode::Auto;
    if (text == "ground-truth") return JudgeMode::GroundTruth;
    if (text == "goal") return JudgeMode::Goal;
    if (text == "human") return JudgeMode::Human;
    bad_config("unknown judge " + std::string(text));
}

std::string_view to_string(EnvBackend backend) { return backend == EnvBackend::Sim ? "sim" : "webdriver"; }
std::string_view to_string(LlmKind kind) { return kind == LlmKind::Scripted ? "scripted" : "remote"; }

std::string_view to_string(JudgeMode mode) {
    switch (mode) {
        case JudgeMode::Auto: return "auto";
        case JudgeMode::GroundTruth: return "ground-truth";
        case JudgeMode::Goal: return "goal";
        case JudgeMode::Human: return "human";
    }
    return "auto";
}

void CampaignConfig::validate() const {
    if (training_episodes < 1) bad_config("training episodes must be at least 1");
    if (eval_instances < 1) bad_config("evaluation instances must be at least 1");
    if (average_window < 1) bad_config("moving-average window must be at least 1");
    if (!(stop_threshold > 0.0 && stop_threshold <= 1.0)) bad_config("stop threshold must be in (0, 1]");
    for (const auto& p : {task_suite, ground_truth, experience_snapshot}) {
        if (p && !fs::exists(*p)) bad_config(p->string() + " does not exist");
    }
    if (llm == LlmKind::Scripted && llm_script != kBuiltinPerfectPolicy && !fs::exists(llm_script)) {
        bad_config("llm script " + llm_script + " does not exist");
    }
    if (out_dir.empty()) bad_config("output directory is empty");
    PlannerConfig p = planner;
    p.phase = Phase::Training;
    try {
        p.validate();
    } catch (const Error& e) {
        bad_config(e.what());
    }
}

CampaignConfig config_from_json(const Json& j, const fs::path& base) {
    if (!j.is_object()) bad_config("config must be a JSON object");
    CampaignConfig c;
    if (j.contains("task_suite")) c.task_suite = resolve(base, get_or<std::string>(j, "task_suite", ""));
    if (j.contains("ground_truth")) c.ground_truth = resolve(base, get_or<std::string>(j, "ground_truth", ""));
    c.backend = parse_env_backend(get_or<std::string>(j, "backend", "sim"));
    c.out_dir = resolve(base, get_or<std::string>(j, "out", "hxagent-out"));

    if (j.contains("webdriver")) {
        const auto& w = j.at("webdriver");
        c.webdriver.endpoint = get_or<std::string>(w, "endpoint", c.webdriver.endpoint);
        if (w.contains("capabilities")) c.webdriver.capabilities = w.at("capabilities");
        c.webdriver.request_timeout = ms_or(w, "request_timeout_ms", c.webdriver.request_timeout);
        c.webdriver.quiet_period = ms_or(w, "quiet_period_ms", c.webdriver.quiet_period);
        c.webdriver.settle_timeout = ms_or(w, "settle_timeout_ms", c.webdriver.settle_timeout);
        c.webdriver.capture_screenshots = get_or<bool>(w, "capture_screenshots", true);
    }
    if (j.contains("llm")) {
        const auto& l = j.at("llm");
        c.llm = parse_llm_kind(get_or<std::string>(l, "backend", "scripted"));
        auto script = get_or<std::string>(l, "script", std::string(kBuiltinPerfectPolicy));
        c.llm_script = script == kBuiltinPerfectPolicy ? script : resolve(base, script).string();
        c.remote.endpoint = get_or<std::string>(l, "endpoint", c.remote.endpoint);
        c.remote.model = get_or<std::string>(l, "model", c.remote.model);
        c.remote.api_key_env = get_or<std::string>(l, "api_key_env", c.remote.api_key_env);
        c.remote.system_prompt = get_or<std::string>(l, "system_prompt", c.remote.system_prompt);
        c.llm_timeout = ms_or(l, "timeout_ms", c.llm_timeout);
        c.retry.attempts = get_or<int>(l, "attempts", c.retry.attempts);
        c.retry.initial_backoff = ms_or(l, "backoff_ms", c.retry.initial_backoff);
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        c.training_episodes = get_or<std::size_t>(t, "episodes", c.training_episodes);
        c.early_stop = get_or<bool>(t, "early_stop", c.early_stop);
        c.average_window = get_or<std::size_t>(t, "window", c.average_window);
        c.stop_threshold = get_or<double>(t, "threshold", c.stop_threshold);
        c.judge = parse_judge_mode(get_or<std::string>(t, "judge", "auto"));
    }
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        c.eval_instances = get_or<std::size_t>(e, "instances", c.eval_instances);
        if (e.contains("experience")) c.experience_snapshot = resolve(base, get_or<std::string>(e, "experience", ""));
    }
    if (j.contains("planner")) {
        const auto& p = j.at("planner");
        c.planner.step_limit = get_or<std::size_t>(p, "step_limit", c.planner.step_limit);
        try {
            c.planner.memory_window = MemoryWindow::parse(get_or<std::string>(p, "memory_window", "all"));
        } catch (const Error& e) {
            bad_config(e.what());
        }
        auto mode = get_or<std::string>(p, "memory_mode", "states_and_actions");
        if (mode == "states_and_actions") c.planner.memory_mode = MemoryMode::StatesAndActions;
        else if (mode == "actions_only") c.planner.memory_mode = MemoryMode::ActionsOnly;
        else bad_config("unknown memory mode " + mode);
        c.planner.max_exemplars = get_or<std::size_t>(p, "max_exemplars", c.planner.max_exemplars);
        c.planner.state_budget = get_or<std::size_t>(p, "state_budget", c.planner.state_budget);
    }
    return c;
}

CampaignConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) bad_config(path.string() + " does not exist");
    auto j = Json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) bad_config(path.string() + " is not valid JSON");
    return config_from_json(j, path.parent_path());
}

Json to_json(const CampaignConfig& c) {
    Json j;
    if (c.task_suite) j["task_suite"] = c.task_suite->string();
    if (c.ground_truth) j["ground_truth"] = c.ground_truth->string();
    j["backend"] = std::string(to_string(c.backend));
    j["webdriver"] = {{"endpoint", c.webdriver.endpoint},
                      {"capabilities", c.webdriver.capabilities},
                      {"request_timeout_ms", c.webdriver.request_timeout.count()},
                      {"quiet_period_ms", c.webdriver.quiet_period.count()},
                      {"settle_timeout_ms", c.webdriver.settle_timeout.count()},
                      {"capture_screenshots", c.webdriver.capture_screenshots}};
    j["llm"] = {{"backend", std::string(to_string(c.llm))},
                {"script", c.llm_script},
                {"endpoint", c.remote.endpoint},
                {"model", c.remote.model},
                {"api_key_env", c.remote.api_key_env},
                {"timeout_ms", c.llm_timeout.count()},
                {"attempts", c.retry.attempts},
                {"backoff_ms", c.retry.initial_backoff.count()}};
    j["training"] = {{"episodes", c.training_episodes},
                     {"early_stop", c.early_stop},
                     {"window", c.average_window},
                     {"threshold", c.stop_threshold},
                     {"judge", std::string(to_string(c.judge))}};
    j["evaluation"] = {{"instances", c.eval_instances}};
    if (c.experience_snapshot) j["evaluation"]["experience"] = c.experience_snapshot->string();
    j["planner"] = {{"step_limit", c.planner.step_limit},
                    {"memory_window", c.planner.memory_window.to_string()},
                    {"memory_mode", c.planner.memory_mode == MemoryMode::StatesAndActions ? "states_and_actions"
                                                                                           : "actions_only"},
                    {"max_exemplars", c.planner.max_exemplars},
                    {"state_budget", c.planner.state_budget}};
    j["out"] = c.out_dir.string();
    return j;
}

fs::path OutputLayout::traces(const std::string& task_id, Phase phase) const {
    return root / "traces" / task_id / std::string(to_string(phase));
}

fs::path OutputLayout::trace_file(const std::string& task_id, Phase phase, const std::string& episode_id) const {
    return traces(task_id, phase) / (episode_id + ".json");
}

fs::path OutputLayout::prompts(const std::string& task_id, Phase phase) const {
    return root / "prompts" / task_id / std::string(to_string(phase));
}

fs::path OutputLayout::prompt_file(const std::string& task_id, Phase phase, const std::string& episode_id) const {
    return prompts(task_id, phase) / (episode_id + ".jsonl");
}

fs::path OutputLayout::experience() const { return root / "experience"; }
fs::path OutputLayout::reports() const { return root / "reports"; }

fs::path OutputLayout::script_file(const std::string& task_id, const std::string& episode_id) const {
    return root / "scripts" / task_id / (episode_id + ".json");
}

std::string episode_id(const std::string& task_id, Phase phase, std::size_t ordinal) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04zu", ordinal);
    return task_id + (phase == Phase::Training ? "-train-" : "-eval-") + buf;
}

std::vector<GroundTruth> oracle_ground_truth(const TaskSuite& suite) {
    std::vector<GroundTruth> out;
    for (const auto& task : suite.tasks) {
        GroundTruth truth;
        truth.task_id = task.task_id;
        for (const auto* list : {&task.evaluation, &task.training}) {
            for (const auto& inst : *list) {
                try {
                    auto site = sim::resolve_entry(inst.entry);
                    truth.instances.push_back({inst.id, inst.task, references(sim::oracle_shortest_sequence(site))});
                } catch (const Error& e) {
                    spdlog::warn("no oracle for {}: {}", inst.id, e.what());
                }
            }
        }
        out.push_back(std::move(truth));
    }
    return out;
}

Json perfect_policy_script(const TaskSuite& suite) {
    Json entries = Json::array();
    std::map<std::string, Json> plans;
    for (const auto& task : suite.tasks) {
        for (const auto* list : {&task.training, &task.evaluation}) {
            for (const auto& inst : *list) {
                Json plan = Json::array();
                try {
                    for (const auto& a : sim::oracle_shortest_sequence(sim::resolve_entry(inst.entry))) {
                        plan.push_back(to_json(PlanStep{a.operation, a.target.xpath, a.input_content}));
                    }
                } catch (const Error& e) {
                    spdlog::warn("no oracle for {}: {}", inst.id, e.what());
                    continue;
                }
                auto [it, inserted] = plans.emplace(inst.task, plan);
                if (!inserted) {
                    if (it->second != plan) spdlog::warn("task text of {} is shared by instances with different plans", inst.id);
                    continue;
                }
                entries.push_back({{"purpose", {"next_action", "duplicate_disambiguation", "input_content"}},
                                   {"contains", {"You are asked to complete the following task: " + inst.task + "\n"}},
                                   {"plan", std::move(plan)}});
            }
        }
    }
    entries.push_back({{"purpose", "rule_extraction"},
                       {"response", "Check every remaining requirement of the task before choosing DONE "
                                    "(after {{count:FAILED TRIAL}} failed trials, {{count:RULE #}} rules)."}});
    entries.push_back({{"purpose", "state_summary"}, {"response", "A web page with a form and a few links."}});
    return {{"strict", true}, {"entries", std::move(entries)}};
}

Json TrainingSummary::to_json() const {
    Json list = Json::array();
    for (const auto& t : tasks) {
        Json j;
        j["task_id"] = t.task_id;
        j["episodes_run"] = t.episodes_run;
        j["judged"] = t.judged;
        j["history"] = t.history;
        j["pending_episode"] = t.pending_episode ? Json(*t.pending_episode) : Json(nullptr);
        j["stopped_early"] = t.stopped_early;
        list.push_back(std::move(j));
    }
    return {{"tasks", std::move(list)}, {"errors", errors}};
}

Campaign::Campaign(CampaignConfig config) : config_(std::move(config)), layout_{config_.out_dir} {
    config_.validate();
    suite_ = config_.task_suite ? load_suite(*config_.task_suite)
                                : builtin_suite(config_.training_episodes, config_.eval_instances);
    if (suite_.tasks.empty()) throw Error("empty-suite", "the task suite lists no tasks");
    if (config_.ground_truth) truths_ = load_ground_truth(*config_.ground_truth);

    if (config_.llm == LlmKind::Remote) {
        backend_ = std::make_shared<RemoteBackend>(config_.remote);
    } else if (config_.llm_script == kBuiltinPerfectPolicy) {
        backend_ = std::make_shared<ScriptedBackend>(ScriptedBackend::from_json(perfect_policy_script(suite_)));
    } else {
        backend_ = std::make_shared<ScriptedBackend>(ScriptedBackend::from_file(config_.llm_script));
    }
    gateway_ = std::make_unique<LlmGateway>(backend_, config_.retry, config_.llm_timeout);
}

Campaign::~Campaign() = default;

RuleProvider Campaign::rule_provider() { return llm_rule_provider(*gateway_); }

std::unique_ptr<Environment> Campaign::make_environment() const {
    if (config_.backend == EnvBackend::WebDriver) return std::make_unique<WebDriverEnvironment>(config_.webdriver);
    return std::make_unique<sim::SimEnvironment>();
}

Clock Campaign::make_clock() const {
    if (config_.llm == LlmKind::Remote) return utc_now;
    auto tick = std::make_shared<long>(0);
    return [tick] { return logical_time((*tick)++); };
}

std::optional<std::vector<ReferenceAction>> Campaign::truth_for(const std::string& task_id,
                                                                const TaskInstance& instance) {
    for (const auto& t : truths_) {
        if (t.task_id != task_id) continue;
        if (const auto* inst = t.find(instance.id)) return inst->actions;
    }
    if (auto it = oracle_cache_.find(instance.entry); it != oracle_cache_.end()) return it->second;
    try {
        auto refs = references(sim::oracle_shortest_sequence(sim::resolve_entry(instance.entry)));
        oracle_cache_[instance.entry] = refs;
        return refs;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<Verdict> Campaign::judge(const std::string& task_id, const TaskInstance& instance,
                                       const EpisodeTrace& trace, Environment& env) {
    auto by_truth = [&]() -> std::optional<Verdict> {
        auto truth = truth_for(task_id, instance);
        if (!truth) return std::nullopt;
        return instance_correct(trace.actions(), *truth) ? Verdict::Correct : Verdict::Incorrect;
    };
    auto by_goal = [&]() -> std::optional<Verdict> {
        auto* s = dynamic_cast<sim::SimEnvironment*>(&env);
        if (!s) return std::nullopt;
        return s->goal_reached() ? Verdict::Correct : Verdict::Incorrect;
    };
    switch (config_.judge) {
        case JudgeMode::Human: return std::nullopt;
        case JudgeMode::GroundTruth: return by_truth();
        case JudgeMode::Goal: return by_goal();
        case JudgeMode::Auto:
            if (auto v = by_truth()) return v;
            return by_goal();
    }
    return std::nullopt;
}

void Campaign::write_episode(const EpisodeTrace& trace, Phase phase, const PromptLog& log) const {
    write_json(layout_.trace_file(trace.task_id, phase, trace.episode_id), to_json(trace));
    util::write_file_atomic(layout_.prompt_file(trace.task_id, phase, trace.episode_id), log.to_jsonl());
}

TrainingSummary Campaign::train() {
    TrainingSummary summary;
    for (const auto& task : suite_.tasks) {
        TaskTrainingSummary s;
        s.task_id = task.task_id;
        auto store = ExperienceStore::open(layout_.experience(), task.task_id);

        for (const auto& file : sorted_files(layout_.traces(task.task_id, Phase::Training), ".json")) {
            auto trace = trace_from_json(Json::parse(util::read_file(file)));
            if (!trace.verdict) s.pending_episode = trace.episode_id;
        }
        if (s.pending_episode) {
            spdlog::info("{}: {} awaits a verdict, skipping", task.task_id, *s.pending_episode);
        } else if (task.training.empty()) {
            spdlog::warn("{}: no training instances", task.task_id);
        } else {
            for (auto ep = store->timeline().size(); ep <= config_.training_episodes; ++ep) {
                if (config_.early_stop &&
                    should_stop(store->current()->outcome_history, config_.average_window, config_.stop_threshold)) {
                    s.stopped_early = true;
                    break;
                }
                const auto& instance = task.training[(ep - 1) % task.training.size()];
                auto env = make_environment();
                PromptLog log;
                PlannerServices services;
                services.llm = gateway_.get();
                services.prompt_log = &log;
                services.store = store.get();
                services.judge = [&](const EpisodeTrace& t, Environment& e) {
                    return judge(task.task_id, instance, t, e);
                };
                services.clock = make_clock();
                PlannerConfig planner = config_.planner;
                planner.phase = Phase::Training;
                planner.frozen_experience.reset();

                auto trace = run_episode(instance.task, instance.entry, *env, services, planner,
                                         {episode_id(task.task_id, Phase::Training, ep), task.task_id});
                if (trace.outcome == Outcome::Error) {
                    ++summary.errors;
                    spdlog::warn("{}: {}", trace.episode_id, trace.error);
                }
                write_episode(trace, Phase::Training, log);
                Json line = {{"episode_id", trace.episode_id},
                             {"instance", instance.id},
                             {"outcome", std::string(to_string(trace.outcome))},
                             {"verdict", trace.verdict ? Json(std::string(to_string(*trace.verdict))) : Json(nullptr)},
                             {"steps", trace.pairs.size()}};
                util::append_line(layout_.reports() / "training-log.jsonl", line.dump());
                ++s.episodes_run;
                if (!trace.verdict) {
                    s.pending_episode = trace.episode_id;
                    spdlog::info("{}: {} parked for review", task.task_id, trace.episode_id);
                    break;
                }
            }
        }

        s.history = store->current()->outcome_history;
        s.judged = s.history.size();
        if (!s.history.empty()) {
            auto points = moving_average(s.history, config_.average_window);
            Json series = Json::array();
            std::string csv = "episode,value\n";
            for (const auto& p : points) {
                series.push_back({{"episode", p.episode}, {"value", p.value}});
                char buf[64];
                std::snprintf(buf, sizeof buf, "%d,%.4f\n", p.episode, p.value);
                csv += buf;
            }
            auto dir = layout_.reports() / task.task_id;
            write_json(dir / "moving-average.json",
                       {{"task_id", task.task_id}, {"window", config_.average_window}, {"points", std::move(series)}});
            util::write_file_atomic(dir / "moving-average.csv", csv);
        }
        summary.tasks.push_back(std::move(s));
    }
    write_json(layout_.reports() / "training.json", summary.to_json());
    return summary;
}

EvaluationResult Campaign::evaluate() {
    EvaluationResult out;
    std::vector<InstanceResult> results;
    TokenLedger ledger;
    std::optional<ExperienceSnapshot> explicit_snapshot;
    if (config_.experience_snapshot) explicit_snapshot = load_snapshot(*config_.experience_snapshot);

    for (const auto& task : suite_.tasks) {
        ExperienceSnapshot frozen;
        if (explicit_snapshot) {
            if (!explicit_snapshot->task_id.empty() && explicit_snapshot->task_id != task.task_id) {
                throw Error("missing-experience", "snapshot belongs to " + explicit_snapshot->task_id + ", not " +
                                                      task.task_id);
            }
            frozen = *explicit_snapshot;
            out.experience_episode[task.task_id] = frozen.captured_at_episode;
        } else {
            auto store = ExperienceStore::open(layout_.experience(), task.task_id);
            auto timeline = store->timeline();
            if (timeline.size() < 2) throw Error("missing-experience", "no training history for " + task.task_id);
            auto k = select_optimal_episode(timeline.back()->outcome_history, config_.average_window,
                                            config_.stop_threshold);
            frozen = *timeline.at(static_cast<std::size_t>(k));
            out.experience_episode[task.task_id] = k;
        }

        auto count = std::min(config_.eval_instances, task.evaluation.size());
        for (std::size_t i = 0; i < count; ++i) {
            const auto& instance = task.evaluation[i];
            auto env = make_environment();
            PromptLog log;
            PlannerServices services;
            services.llm = gateway_.get();
            services.prompt_log = &log;
            services.clock = make_clock();
            PlannerConfig planner = config_.planner;
            planner.phase = Phase::Evaluation;
            planner.frozen_experience = frozen;

            auto trace = run_episode(instance.task, instance.entry, *env, services, planner,
                                     {episode_id(task.task_id, Phase::Evaluation, i + 1), task.task_id});
            write_episode(trace, Phase::Evaluation, log);
            for (const auto& e : log.entries()) ledger.record(e.purpose, e.prompt_tokens, e.output_tokens);
            if (trace.outcome == Outcome::Done) {
                auto script = emit_script(trace, instance.entry);
                auto path = layout_.script_file(task.task_id, trace.episode_id);
                write_json(path, to_json(script));
                util::write_file_atomic(fs::path(path).replace_extension(".txt"), render_script_text(script));
            }
            if (auto truth = truth_for(task.task_id, instance)) {
                results.push_back({task.task_id, instance.id, trace.episode_id, trace.outcome, trace.actions(), *truth});
            } else {
                ++out.unscored;
                spdlog::warn("{}: no ground truth, not scored", instance.id);
            }
        }
    }

    out.report = build_report(results, ledger);
    auto j = out.report.to_json();
    j["experience_episode"] = out.experience_episode;
    j["unscored"] = out.unscored;
    write_json(layout_.reports() / "report.json", j);
    util::write_file_atomic(layout_.reports() / "report.csv", out.report.to_csv());
    util::write_file_atomic(layout_.reports() / "summary.txt", out.report.summary());
    util::write_file_atomic(layout_.reports() / "tokens.csv", ledger.to_csv());
    return out;
}

EpisodeTrace Campaign::run_single(const std::string& task, const std::string& entry,
                                  const std::optional<ExperienceSnapshot>& experience) {
    auto env = make_environment();
    PromptLog log;
    PlannerServices services;
    services.llm = gateway_.get();
    services.prompt_log = &log;
    services.clock = make_clock();
    PlannerConfig planner = config_.planner;
    planner.phase = experience ? Phase::Evaluation : Phase::Training;
    planner.frozen_experience = experience;
    auto trace = run_episode(task, entry, *env, services, planner, {"run-" + util::hex64(util::fnv1a64(task + entry)), ""});
    util::write_file_atomic(layout_.root / "runs" / (trace.episode_id + ".prompts.jsonl"), log.to_jsonl());
    write_json(layout_.root / "runs" / (trace.episode_id + ".json"), to_json(trace));
    if (trace.outcome == Outcome::Done) {
        auto script = emit_script(trace, entry);
        write_json(layout_.root / "runs" / (trace.episode_id + ".script.json"), to_json(script));
        util::write_file_atomic(layout_.root / "runs" / (trace.episode_id + ".script.txt"), render_script_text(script));
    }
    return trace;
}

TokenLedger ledger_from_prompt_logs(const fs::path& dir) {
    TokenLedger ledger;
    if (!fs::exists(dir)) return ledger;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto log = PromptLog::from_jsonl(util::read_file(f));
        for (const auto& e : log.entries()) {
            ledger.record(e.purpose, e.prompt_tokens, e.output_tokens);
        }
    }
    return ledger;
}

MetricsReport rebuild_report(const CampaignConfig& config) {
    Campaign campaign(config);
    TokenLedger ledger;
    std::vector<InstanceResult> results;
    for (const auto& task : campaign.suite().tasks) {
        ledger.merge(ledger_from_prompt_logs(campaign.layout().prompts(task.task_id, Phase::Evaluation)));
        for (const auto& file : sorted_files(campaign.layout().traces(task.task_id, Phase::Evaluation), ".json")) {
            auto trace = trace_from_json(Json::parse(util::read_file(file)));
            auto ordinal = ordinal_of(trace.episode_id);
            if (ordinal < 1 || ordinal > task.evaluation.size()) {
                spdlog::warn("{}: no matching evaluation instance", trace.episode_id);
                continue;
            }
            const auto& instance = task.evaluation[ordinal - 1];
            if (auto truth = campaign.truth_for(task.task_id, instance)) {
                results.push_back({task.task_id, instance.id, trace.episode_id, trace.outcome, trace.actions(), *truth});
            }
        }
    }
    return build_report(results, ledger);
}

Json extract_page(const std::string& source, const std::optional<WebDriverConfig>& webdriver) {
    PageObservation obs;
    bool html_file = fs::exists(source) && fs::path(source).extension() != ".json";
    if (html_file) {
        obs.document = dom::parse_html(util::read_file(source));
        obs.render_info = infer_render_info(obs.document);
        obs.title = obs.document.title();
        obs.url = source;
    } else if (source.rfind("sim:", 0) == 0 || fs::exists(source)) {
        sim::SimEnvironment env;
        obs = env.load(source);
    } else if (webdriver) {
        WebDriverEnvironment env(*webdriver);
        obs = env.load(source);
    } else {
        throw Error("load-failure", source + " is neither a file nor a sim entry, and no WebDriver endpoint is set");
    }

    auto extraction = extract_feasible_actions(obs.document, obs.render_info);
    Json actions = Json::array();
    for (const auto& a : extraction.actions) actions.push_back(to_json(a));
    Json j;
    j["title"] = obs.title;
    j["url"] = obs.url;
    j["actions"] = std::move(actions);
    try {
        j["state"] = to_json(extract_state(obs.document, obs.render_info, obs.screenshot, {}));
    } catch (const Error& e) {
        extraction.warnings.push_back(e.what());
        j["state"] = nullptr;
    }
    j["warnings"] = extraction.warnings;
    return j;
}

void write_builtin_bundle(const fs::path& dir, std::size_t training, std::size_t evaluation) {
    auto suite = builtin_suite(training, evaluation);
    write_json(dir / "suite.json", to_json(suite));
    Json truths = Json::array();
    for (const auto& t : oracle_ground_truth(suite)) truths.push_back(to_json(t));
    write_json(dir / "ground-truth.json", {{"tasks", std::move(truths)}});
    write_json(dir / "policy.json", perfect_policy_script(suite));
    write_json(dir / "config.json",
               {{"task_suite", "suite.json"},
                {"ground_truth", "ground-truth.json"},
                {"backend", "sim"},
                {"llm", {{"backend", "scripted"}, {"script", "policy.json"}}},
                {"training", {{"episodes", training}, {"judge", "auto"}}},
                {"evaluation", {{"instances", evaluation}}},
                {"planner", {{"step_limit", kDefaultStepLimit}, {"memory_window", "all"}}},
                {"out", "out"}});
}

}  // namespace hxagent

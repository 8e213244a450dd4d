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

#include "hxagent/experience.hpp"

#include <algorithm>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace {

constexpr std::size_t kPromptFailures = 3;

void render_trials(std::string& out, const char* label, const std::vector<EpisodeTrace>& traces, std::size_t keep) {
    auto first = traces.size() > keep ? traces.size() - keep : 0;
    for (std::size_t i = first; i < traces.size(); ++i) {
        const auto& t = traces[i];
        if (i > first) out += "\n";
        out += std::string(label) + " TRIAL #" + std::to_string(i - first + 1) + ": Task: " + t.task + "\n";
        for (std::size_t s = 0; s < t.pairs.size(); ++s) {
            out += "STEP #" + std::to_string(s + 1) + ": " + render_action_line(t.pairs[s].action) + "\n";
        }
    }
}

std::string first_line(std::string_view text) {
    for (const auto& line : util::split_lines(text)) {
        auto t = util::trim(line);
        if (!t.empty()) return t;
    }
    return {};
}

std::string clean_rule(std::string_view raw) {
    auto text = first_line(raw);
    if (text.rfind("RULE #", 0) == 0) {
        auto colon = text.find(':');
        if (colon != std::string::npos) text = util::trim(std::string_view(text).substr(colon + 1));
    }
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
    return util::trim(text);
}

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
    throw Error("snapshot-corrupt", path + ": " + why);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) corrupt(path, "expected an object");
    if (!j.contains(key)) corrupt(path + "." + key, "missing");
    return j.at(key);
}

std::vector<EpisodeTrace> read_traces(const Json& j, const char* key) {
    const auto& list = field(j, key, "$");
    if (!list.is_array()) corrupt(std::string("$.") + key, "expected an array");
    std::vector<EpisodeTrace> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        try {
            out.push_back(trace_from_json(list[i]));
        } catch (const std::exception& e) {
            corrupt(std::string("$.") + key + "[" + std::to_string(i) + "]", e.what());
        }
    }
    return out;
}

}  // namespace

std::string normalize_rule(std::string_view text) { return util::fold(text); }

ExperienceSnapshot update(ExperienceSnapshot snapshot, const EpisodeTrace& trace, const RuleProvider& provider) {
    if (!trace.verdict) throw Error("unjudged-trace", trace.episode_id);
    bool correct = *trace.verdict == Verdict::Correct;
    snapshot.outcome_history.push_back(correct ? 1 : 0);
    snapshot.captured_at_episode = static_cast<int>(snapshot.outcome_history.size());
    if (correct) {
        snapshot.correct_traces.push_back(trace);
        return snapshot;
    }
    snapshot.incorrect_traces.push_back(trace);
    try {
        Rule rule = provider(snapshot);
        rule.text = util::trim(rule.text);
        auto key = normalize_rule(rule.text);
        bool duplicate = std::any_of(snapshot.rules.begin(), snapshot.rules.end(),
                                     [&](const Rule& r) { return normalize_rule(r.text) == key; });
        if (rule.text.empty()) throw Error("empty-rule");
        if (duplicate) throw Error("rule-duplicate", rule.text);
        rule.source_episode = trace.episode_id;
        rule.created_at = snapshot.captured_at_episode;
        snapshot.rules.push_back(std::move(rule));
    } catch (const Error& e) {
        if (e.code() != "rule-duplicate" && e.code() != "empty-rule") throw;
        spdlog::warn("episode {} recorded without a new rule: {}", trace.episode_id, e.what());
    }
    return snapshot;
}

std::string build_rule_prompt(const std::vector<EpisodeTrace>& correct, const std::vector<EpisodeTrace>& incorrect,
                              const std::vector<Rule>& rules) {
    std::string out = "You are reviewing the attempts of a web assistant that completes tasks on a website step by step.\n";
    if (!correct.empty()) {
        out += "\n# Successful attempts\n";
        render_trials(out, "SUCCESS", correct, kDefaultMaxExemplars);
    }
    out += "\n# Failed attempts\n";
    auto first = incorrect.size() > kPromptFailures ? incorrect.size() - kPromptFailures : 0;
    for (std::size_t i = first; i < incorrect.size(); ++i) {
        const auto& t = incorrect[i];
        if (i > first) out += "\n";
        out += "FAILED TRIAL #" + std::to_string(i - first + 1) + ": Task: " + t.task + "\n";
        for (std::size_t s = 0; s < t.pairs.size(); ++s) {
            out += "STEP #" + std::to_string(s + 1) + ": " + render_action_line(t.pairs[s].action) + "\n";
        }
        out += "ENDED WITH: " + std::string(to_string(t.outcome));
        if (!t.error.empty()) out += " (" + t.error + ")";
        out += "\n";
    }
    out += "\n# Existing rules\n";
    if (rules.empty()) out += "(none)\n";
    for (std::size_t i = 0; i < rules.size(); ++i) {
        out += "RULE #" + std::to_string(i + 1) + ": " + rules[i].text + "\n";
    }
    out += "\nWrite one new rule, a single imperative sentence, that would have prevented the last failed attempt. "
           "It must differ from every existing rule. Reply with the sentence only.";
    return out;
}

Rule extract_rule(const std::vector<EpisodeTrace>& correct, const std::vector<EpisodeTrace>& incorrect,
                  const std::vector<Rule>& rules, LlmGateway& gateway, PromptLog* log, int retries) {
    if (incorrect.empty()) throw Error("no-failure-to-explain");
    const auto base = build_rule_prompt(correct, incorrect, rules);
    std::string prompt = base;
    std::string last;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        CompletionRequest request;
        request.prompt = prompt;
        request.purpose = Purpose::RuleExtraction;
        auto text = clean_rule(gateway.complete(request, log).text);
        if (text.empty()) throw Error("empty-rule");
        auto key = normalize_rule(text);
        bool duplicate =
            std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return normalize_rule(r.text) == key; });
        if (!duplicate) return Rule{text, {}, 0};
        last = text;
        prompt = base + "\n\n\"" + text + "\" repeats an existing rule. Write a different one.";
    }
    throw Error("rule-duplicate", last);
}

RuleProvider llm_rule_provider(LlmGateway& gateway, PromptLog* log) {
    return [&gateway, log](const ExperienceSnapshot& s) {
        return extract_rule(s.correct_traces, s.incorrect_traces, s.rules, gateway, log);
    };
}

std::string render_experience_section(const ExperienceSnapshot& snapshot, std::size_t max_exemplars) {
    bool trials = max_exemplars > 0 && !snapshot.correct_traces.empty();
    if (!trials && snapshot.rules.empty()) return {};
    std::string out;
    if (trials) {
        out += "# Here are the history of your trials\n";
        render_trials(out, "SUCCESS", snapshot.correct_traces, max_exemplars);
    }
    if (!snapshot.rules.empty()) {
        if (trials) out += "\n";
        out += "# Rules extracted from past attempts, use to evaluate your policy:\n";
        for (std::size_t i = 0; i < snapshot.rules.size(); ++i) {
            out += "RULE #" + std::to_string(i + 1) + ": " + snapshot.rules[i].text + "\n";
        }
    }
    return out;
}

std::vector<MovingAveragePoint> moving_average(const std::vector<int>& history, std::size_t window) {
    if (window == 0) throw Error("invalid-window", "moving-average window must be positive");
    std::vector<MovingAveragePoint> out;
    out.reserve(history.size());
    long sum = 0;
    for (std::size_t k = 0; k < history.size(); ++k) {
        sum += history[k];
        if (k >= window) sum -= history[k - window];
        auto n = std::min(k + 1, window);
        out.push_back({static_cast<int>(k + 1), static_cast<double>(sum) / static_cast<double>(n)});
    }
    return out;
}

bool should_stop(const std::vector<int>& history, std::size_t window, double threshold) {
    if (history.size() < window) return false;
    return moving_average(history, window).back().value >= threshold;
}

int select_optimal_episode(const std::vector<int>& history, std::size_t window, double threshold) {
    if (history.empty()) throw Error("no-training-history");
    auto points = moving_average(history, window);
    for (const auto& p : points) {
        if (static_cast<std::size_t>(p.episode) >= window && p.value >= threshold) return p.episode;
    }
    std::size_t from = history.size() >= window ? window - 1 : 0;
    const MovingAveragePoint* best = &points[from];
    for (std::size_t i = from; i < points.size(); ++i) {
        if (points[i].value >= best->value) best = &points[i];
    }
    return best->episode;
}

SnapshotPtr select_optimal(const SnapshotTimeline& timeline, std::size_t window, double threshold) {
    if (timeline.empty() || !timeline.back() || timeline.back()->outcome_history.empty()) {
        throw Error("no-training-history");
    }
    int episode = select_optimal_episode(timeline.back()->outcome_history, window, threshold);
    for (const auto& s : timeline) {
        if (s && s->captured_at_episode == episode) return s;
    }
    throw Error("no-training-history", "timeline lacks the snapshot of episode " + std::to_string(episode));
}

Json to_json(const ExperienceSnapshot& snapshot) {
    Json j;
    j["task_id"] = snapshot.task_id;
    auto traces = [](const std::vector<EpisodeTrace>& v) {
        Json a = Json::array();
        for (const auto& t : v) a.push_back(to_json(t));
        return a;
    };
    j["correct_traces"] = traces(snapshot.correct_traces);
    j["incorrect_traces"] = traces(snapshot.incorrect_traces);
    Json rules = Json::array();
    for (const auto& r : snapshot.rules) {
        rules.push_back({{"text", r.text}, {"source_episode", r.source_episode}, {"created_at", r.created_at}});
    }
    j["rules"] = std::move(rules);
    j["outcome_history"] = snapshot.outcome_history;
    j["captured_at_episode"] = snapshot.captured_at_episode;
    return j;
}

ExperienceSnapshot snapshot_from_json(const Json& j) {
    ExperienceSnapshot s;
    const auto& task = field(j, "task_id", "$");
    if (!task.is_string()) corrupt("$.task_id", "expected a string");
    s.task_id = task.get<std::string>();
    s.correct_traces = read_traces(j, "correct_traces");
    s.incorrect_traces = read_traces(j, "incorrect_traces");

    const auto& rules = field(j, "rules", "$");
    if (!rules.is_array()) corrupt("$.rules", "expected an array");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        auto path = "$.rules[" + std::to_string(i) + "]";
        const auto& text = field(rules[i], "text", path);
        if (!text.is_string() || text.get<std::string>().empty()) corrupt(path + ".text", "expected a non-empty string");
        const auto& source = field(rules[i], "source_episode", path);
        if (!source.is_string()) corrupt(path + ".source_episode", "expected a string");
        const auto& created = field(rules[i], "created_at", path);
        if (!created.is_number_integer()) corrupt(path + ".created_at", "expected an integer");
        s.rules.push_back({text.get<std::string>(), source.get<std::string>(), created.get<int>()});
    }

    const auto& history = field(j, "outcome_history", "$");
    if (!history.is_array()) corrupt("$.outcome_history", "expected an array");
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& v = history[i];
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            corrupt("$.outcome_history[" + std::to_string(i) + "]", "expected 0 or 1");
        }
        s.outcome_history.push_back(v.get<int>());
    }

    const auto& captured = field(j, "captured_at_episode", "$");
    if (!captured.is_number_integer()) corrupt("$.captured_at_episode", "expected an integer");
    s.captured_at_episode = captured.get<int>();
    return s;
}

void persist(const ExperienceSnapshot& snapshot, const std::filesystem::path& path) {
    util::write_file_atomic(path, to_json(snapshot).dump(2) + "\n");
}

ExperienceSnapshot load_snapshot(const std::filesystem::path& path) {
    std::string text;
    try {
        text = util::read_file(path);
    } catch (const Error& e) {
        throw Error("snapshot-corrupt", path.string() + ": " + e.what());
    }
    auto j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) corrupt("$", path.string() + " is not valid JSON");
    return snapshot_from_json(j);
}

std::filesystem::path snapshot_path(const std::filesystem::path& experience_dir, const std::string& task_id,
                                    int episode) {
    char name[32];
    std::snprintf(name, sizeof name, "episode-%04d.json", episode);
    return experience_dir / task_id / name;
}

ExperienceStore::ExperienceStore(std::string task_id, std::optional<std::filesystem::path> experience_dir)
    : task_id_(std::move(task_id)), dir_(std::move(experience_dir)) {
    auto initial = std::make_shared<ExperienceSnapshot>();
    initial->task_id = task_id_;
    timeline_.push_back(std::move(initial));
}

std::unique_ptr<ExperienceStore> ExperienceStore::open(const std::filesystem::path& experience_dir,
                                                       const std::string& task_id) {
    auto store = std::make_unique<ExperienceStore>(task_id, experience_dir);
    for (int episode = 1;; ++episode) {
        auto path = snapshot_path(experience_dir, task_id, episode);
        if (!std::filesystem::exists(path)) break;
        store->timeline_.push_back(std::make_shared<const ExperienceSnapshot>(load_snapshot(path)));
    }
    return store;
}

SnapshotPtr ExperienceStore::current() const {
    std::lock_guard lock(read_mutex_);
    return timeline_.back();
}

SnapshotTimeline ExperienceStore::timeline() const {
    std::lock_guard lock(read_mutex_);
    return timeline_;
}

SnapshotPtr ExperienceStore::commit(const EpisodeTrace& judged, const RuleProvider& provider) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<const ExperienceSnapshot>(update(*current(), judged, provider));
    if (dir_) persist(*next, snapshot_path(*dir_, task_id_, next->captured_at_episode));
    std::lock_guard lock(read_mutex_);
    timeline_.push_back(next);
    return next;
}

}  // namespace hxagent

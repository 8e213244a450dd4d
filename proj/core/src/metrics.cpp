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

#include "hxagent/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace {

std::string strip_root(std::string_view xpath) {
    while (!xpath.empty() && xpath.front() == '/') xpath.remove_prefix(1);
    return std::string(xpath);
}

std::string fixed1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

const GroundTruthInstance* GroundTruth::find(const std::string& instance_id) const {
    for (const auto& i : instances) {
        if (i.id == instance_id) return &i;
    }
    return nullptr;
}

void validate(const GroundTruthInstance& instance) {
    if (instance.actions.empty()) throw Error("invalid-ground-truth", instance.id + " has no actions");
    for (std::size_t i = 0; i < instance.actions.size(); ++i) {
        const auto& a = instance.actions[i];
        if (!a.xpath && !a.text) {
            throw Error("invalid-ground-truth", instance.id + " action " + std::to_string(i + 1) + " has no element");
        }
        if (a.operation == Operation::Done) {
            throw Error("invalid-ground-truth", instance.id + " lists the done pseudo-action");
        }
    }
}

ReferenceAction reference_from(const FeasibleAction& action) {
    ReferenceAction r;
    r.operation = action.operation;
    r.xpath = action.target.xpath;
    r.text = action.target.text;
    r.input = action.input_content;
    return r;
}

Json to_json(const ReferenceAction& ref) {
    Json j;
    j["operation"] = std::string(to_string(ref.operation));
    if (ref.xpath) j["xpath"] = *ref.xpath;
    if (ref.text) j["text"] = *ref.text;
    if (ref.input) {
        j["input"] = *ref.input;
        j["exact_input"] = ref.exact_input;
    }
    return j;
}

ReferenceAction reference_from_json(const Json& j) {
    ReferenceAction r;
    r.operation = parse_operation(j.at("operation").get<std::string>());
    if (j.contains("xpath")) r.xpath = j.at("xpath").get<std::string>();
    if (j.contains("text")) r.text = j.at("text").get<std::string>();
    if (j.contains("input")) r.input = j.at("input").get<std::string>();
    r.exact_input = j.value("exact_input", true);
    return r;
}

Json to_json(const GroundTruth& truth) {
    Json instances = Json::array();
    for (const auto& i : truth.instances) {
        Json actions = Json::array();
        for (const auto& a : i.actions) actions.push_back(to_json(a));
        instances.push_back({{"id", i.id}, {"task_text", i.task_text}, {"actions", std::move(actions)}});
    }
    return {{"task_id", truth.task_id}, {"instances", std::move(instances)}};
}

GroundTruth ground_truth_from_json(const Json& j) {
    try {
        GroundTruth t;
        t.task_id = j.at("task_id").get<std::string>();
        for (const auto& ij : j.at("instances")) {
            GroundTruthInstance inst;
            inst.id = ij.at("id").get<std::string>();
            inst.task_text = ij.value("task_text", "");
            for (const auto& aj : ij.at("actions")) inst.actions.push_back(reference_from_json(aj));
            validate(inst);
            t.instances.push_back(std::move(inst));
        }
        return t;
    } catch (const Json::exception& e) {
        throw Error("invalid-ground-truth", e.what());
    }
}

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path) {
    auto j = Json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error("invalid-ground-truth", path.string() + " is not valid JSON");
    std::vector<GroundTruth> out;
    if (j.is_object() && j.contains("tasks")) {
        for (const auto& t : j.at("tasks")) out.push_back(ground_truth_from_json(t));
    } else {
        out.push_back(ground_truth_from_json(j));
    }
    return out;
}

bool action_equal(const FeasibleAction& predicted, const ReferenceAction& truth) {
    if (predicted.operation != truth.operation) return false;
    if (truth.xpath) {
        if (strip_root(predicted.target.xpath) != strip_root(*truth.xpath)) return false;
    } else if (truth.text) {
        if (util::fold(predicted.target.text) != util::fold(*truth.text)) return false;
    } else {
        return false;
    }
    bool carries_content = truth.operation == Operation::Input || truth.operation == Operation::Select;
    if (carries_content && truth.exact_input && truth.input) {
        if (!predicted.input_content || util::trim(*predicted.input_content) != util::trim(*truth.input)) return false;
    }
    return true;
}

bool instance_correct(const std::vector<FeasibleAction>& predicted, const std::vector<ReferenceAction>& truth) {
    if (predicted.size() != truth.size()) return false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!action_equal(predicted[i], truth[i])) return false;
    }
    return true;
}

double exact_match(const std::vector<bool>& results) {
    if (results.empty()) throw Error("no-results");
    std::size_t correct = 0;
    for (bool r : results) correct += r ? 1 : 0;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(results.size());
}

double prefix_accuracy(const std::vector<FeasibleAction>& predicted, const std::vector<ReferenceAction>& truth) {
    if (truth.empty()) throw Error("invalid-ground-truth", "empty truth sequence");
    std::size_t n = 0;
    while (n < truth.size() && n < predicted.size() && action_equal(predicted[n], truth[n])) ++n;
    return static_cast<double>(n) / static_cast<double>(truth.size());
}

std::vector<StepAccuracy> per_step_accuracy(const std::vector<ScoredSequence>& sequences) {
    if (sequences.empty()) throw Error("no-results");
    // Matched prefix length per instance decides how far it reaches.
    std::vector<std::size_t> matched;
    std::size_t longest = 0;
    for (const auto& s : sequences) {
        std::size_t n = 0;
        while (n < s.truth.size() && n < s.predicted.size() && action_equal(s.predicted[n], s.truth[n])) ++n;
        matched.push_back(n);
        longest = std::max(longest, s.truth.size());
    }
    std::vector<StepAccuracy> out;
    for (std::size_t k = 1; k <= longest; ++k) {
        StepAccuracy a;
        a.step = k;
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            if (sequences[i].truth.size() < k || matched[i] < k - 1) continue;
            ++a.reached;
            if (matched[i] >= k) ++a.correct;
        }
        if (a.reached == 0) break;
        a.accuracy = static_cast<double>(a.correct) / static_cast<double>(a.reached);
        out.push_back(a);
    }
    return out;
}

double round1(double value) { return std::round(value * 10.0) / 10.0; }

MetricsReport build_report(const std::vector<InstanceResult>& results, const TokenLedger& ledger) {
    if (results.empty()) throw Error("no-results");
    MetricsReport r;
    std::vector<bool> flags;
    std::vector<ScoredSequence> sequences;
    double prefix_sum = 0.0;
    for (const auto& res : results) {
        InstanceScore s;
        s.task_id = res.task_id;
        s.instance_id = res.instance_id;
        s.episode_id = res.episode_id;
        s.outcome = res.outcome;
        s.correct = instance_correct(res.predicted, res.truth);
        s.prefix_accuracy = prefix_accuracy(res.predicted, res.truth);
        s.predicted_steps = res.predicted.size();
        s.truth_steps = res.truth.size();
        flags.push_back(s.correct);
        prefix_sum += s.prefix_accuracy;
        sequences.push_back({res.predicted, res.truth});
        r.correct_instances += s.correct ? 1 : 0;
        r.scores.push_back(std::move(s));
    }
    r.instances = results.size();
    r.exact_match_pct = round1(exact_match(flags));
    r.prefix_match_pct = round1(100.0 * prefix_sum / static_cast<double>(results.size()));
    r.per_step = per_step_accuracy(sequences);
    r.token_totals = ledger.to_json();
    return r;
}

Json MetricsReport::to_json() const {
    Json steps = Json::array();
    for (const auto& s : per_step) {
        steps.push_back({{"step", s.step}, {"reached", s.reached}, {"correct", s.correct}, {"accuracy", s.accuracy}});
    }
    Json rows = Json::array();
    for (const auto& s : scores) {
        rows.push_back({{"task_id", s.task_id},
                        {"instance_id", s.instance_id},
                        {"episode_id", s.episode_id},
                        {"outcome", std::string(hxagent::to_string(s.outcome))},
                        {"correct", s.correct},
                        {"prefix_accuracy", s.prefix_accuracy},
                        {"predicted_steps", s.predicted_steps},
                        {"truth_steps", s.truth_steps}});
    }
    // Per-task breakdown, in first-seen order.
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& s : scores) {
        if (!counts.count(s.task_id)) order.push_back(s.task_id);
        auto& c = counts[s.task_id];
        ++c.first;
        c.second += s.correct ? 1 : 0;
    }
    Json tasks = Json::object();
    for (const auto& task : order) {
        const auto& c = counts[task];
        tasks[task] = {{"instances", c.first},
                       {"correct_instances", c.second},
                       {"exact_match_pct", round1(100.0 * static_cast<double>(c.second) / static_cast<double>(c.first))}};
    }
    Json j;
    j["exact_match_pct"] = exact_match_pct;
    j["prefix_match_pct"] = prefix_match_pct;
    j["counts"] = {{"instances", instances}, {"correct_instances", correct_instances}};
    j["per_step_accuracy"] = std::move(steps);
    j["tasks"] = std::move(tasks);
    j["instances"] = std::move(rows);
    j["token_totals"] = token_totals;
    return j;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out << "task_id,instance_id,episode_id,outcome,correct,prefix_accuracy,predicted_steps,truth_steps\n";
    for (const auto& s : scores) {
        out << csv_field(s.task_id) << ',' << csv_field(s.instance_id) << ',' << csv_field(s.episode_id) << ','
            << hxagent::to_string(s.outcome) << ',' << (s.correct ? 1 : 0) << ',' << fixed4(s.prefix_accuracy) << ','
            << s.predicted_steps << ',' << s.truth_steps << '\n';
    }
    out << "summary,exact_match_pct,,," << fixed1(exact_match_pct) << ",,,\n";
    out << "summary,prefix_match_pct,,," << fixed1(prefix_match_pct) << ",,,\n";
    for (const auto& s : per_step) {
        out << "step," << s.step << ",,," << fixed4(s.accuracy) << ",," << s.correct << ',' << s.reached << '\n';
    }
    return out.str();
}

std::string MetricsReport::summary() const {
    std::ostringstream out;
    out << "instances          " << instances << "\n";
    out << "correct            " << correct_instances << "\n";
    out << "Exact-Match (%)    " << std::lround(exact_match_pct) << "\n";
    out << "Prefix-Match (%)   " << std::lround(prefix_match_pct) << "\n";
    for (const auto& s : per_step) {
        out << "step " << s.step << " accuracy    " << fixed1(100.0 * s.accuracy) << "% (" << s.correct << "/"
            << s.reached << ")\n";
    }
    return out.str();
}

}  // namespace hxagent

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

#include "hxagent/scripted_backend.hpp"

#include <algorithm>
#include <regex>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace {

constexpr std::string_view kHistoryMarker = "You have completed the following steps:";
constexpr std::string_view kCandidatePrefix = "POSSIBLE NEXT ACTION #";
constexpr std::string_view kDuplicatePrefix = "DUPLICATE CANDIDATE #";

struct Candidate {
    int number = 0;
    bool done = false;
    std::string body;
    std::optional<PlanStep> step;
};

std::vector<Candidate> parse_candidates(std::string_view prompt, std::string_view prefix) {
    std::vector<Candidate> out;
    for (const auto& line : util::split_lines(prompt)) {
        if (line.rfind(prefix, 0) != 0) continue;
        auto colon = line.find(':', prefix.size());
        if (colon == std::string::npos) continue;
        Candidate c;
        try {
            c.number = std::stoi(line.substr(prefix.size(), colon - prefix.size()));
        } catch (const std::exception&) {
            continue;
        }
        c.body = util::trim(std::string_view(line).substr(colon + 1));
        if (c.body.rfind("DONE", 0) == 0) {
            c.done = true;
        } else if (!c.body.empty() && c.body.front() == '{') {
            auto j = Json::parse(c.body, nullptr, false);
            if (!j.is_discarded() && j.contains("operation") && j.contains("target object")) {
                try {
                    c.step = PlanStep{parse_operation(j.at("operation").get<std::string>()),
                                      j.at("target object").value("xpath", ""), std::nullopt};
                } catch (const Error&) {
                }
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

bool same_target(const PlanStep& a, const PlanStep& b) { return a.operation == b.operation && a.xpath == b.xpath; }

// Number of plan steps already performed, as far as the visible history
// tells. With a truncated history the earliest consistent position is taken.
std::optional<std::size_t> plan_progress(const std::vector<PlanStep>& plan, const std::vector<PlanStep>& seen) {
    for (std::size_t k = seen.size(); k <= plan.size(); ++k) {
        bool match = true;
        for (std::size_t i = 0; i < seen.size() && match; ++i) {
            match = same_target(plan[k - seen.size() + i], seen[i]);
        }
        if (match) return k;
    }
    return std::nullopt;
}

std::string decision_json(int index, const std::string& description, const std::string& reason) {
    Json j;
    j["chosen_action"] = index;
    j["action_description"] = description;
    j["reason"] = reason;
    return j.dump();
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string expand_placeholders(std::string text, std::string_view prompt) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("{{", pos);
        if (open == std::string::npos) break;
        auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        out += text.substr(pos, open - pos);
        auto token = text.substr(open + 2, close - open - 2);
        if (token == "done_index") {
            int n = 0;
            for (const auto& c : parse_candidates(prompt, kCandidatePrefix)) {
                if (c.done) n = c.number;
            }
            out += std::to_string(n);
        } else if (token.rfind("candidate:", 0) == 0) {
            auto needle = token.substr(10);
            int n = 0;
            for (auto prefix : {kCandidatePrefix, kDuplicatePrefix}) {
                for (const auto& c : parse_candidates(prompt, prefix)) {
                    if (n == 0 && c.body.find(needle) != std::string::npos) n = c.number;
                }
            }
            out += std::to_string(n);
        } else if (token.rfind("count:", 0) == 0) {
            out += std::to_string(count_occurrences(prompt, token.substr(6)));
        } else {
            out += "{{" + token + "}}";
        }
        pos = close + 2;
    }
    out += text.substr(pos);
    return out;
}

bool matches(const ScriptEntry& entry, const CompletionRequest& request) {
    if (!entry.purposes.empty() &&
        std::find(entry.purposes.begin(), entry.purposes.end(), request.purpose) == entry.purposes.end()) {
        return false;
    }
    for (const auto& s : entry.contains) {
        if (request.prompt.find(s) == std::string::npos) return false;
    }
    for (const auto& s : entry.not_contains) {
        if (request.prompt.find(s) != std::string::npos) return false;
    }
    return true;
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else {
        for (const auto& s : v) out.push_back(s.get<std::string>());
    }
    return out;
}

}  // namespace

std::vector<PlanStep> parse_history_steps(std::string_view prompt) {
    static const std::regex kLine(R"(^> STEP #\d+: (\w+) on \S+ '.*' \(([^()\s]*)\)(?: with input '(.*)')?$)");
    std::vector<PlanStep> out;
    auto marker = prompt.find(kHistoryMarker);
    if (marker == std::string_view::npos) return out;
    for (const auto& line : util::split_lines(prompt.substr(marker))) {
        if (line.rfind("> STEP #", 0) != 0) continue;
        std::smatch m;
        if (!std::regex_match(line, m, kLine)) continue;
        try {
            PlanStep step{parse_operation(m[1].str()), m[2].str(), std::nullopt};
            if (m[3].matched) step.input = m[3].str();
            out.push_back(std::move(step));
        } catch (const Error&) {
        }
    }
    return out;
}

std::string follow_plan(const std::vector<PlanStep>& plan, const CompletionRequest& request) {
    auto progress = plan_progress(plan, parse_history_steps(request.prompt));
    const PlanStep* next = (progress && *progress < plan.size()) ? &plan[*progress] : nullptr;

    switch (request.purpose) {
        case Purpose::NextAction: {
            auto candidates = parse_candidates(request.prompt, kCandidatePrefix);
            int done_index = 0;
            for (const auto& c : candidates) {
                if (c.done) done_index = c.number;
            }
            if (next) {
                for (const auto& c : candidates) {
                    if (c.step && same_target(*c.step, *next)) {
                        return decision_json(c.number,
                                             std::string(to_string(next->operation)) + " " + next->xpath,
                                             "step " + std::to_string(*progress + 1) + " of the known sequence");
                    }
                }
                return decision_json(done_index, "done", "the next known step is not available on this page");
            }
            return decision_json(done_index, "done",
                                 progress ? "all known steps are complete" : "history does not match the known sequence");
        }
        case Purpose::DuplicateDisambiguation: {
            auto candidates = parse_candidates(request.prompt, kDuplicatePrefix);
            for (const auto& c : candidates) {
                if (next && c.step && same_target(*c.step, *next)) {
                    return decision_json(c.number, "pick " + next->xpath, "matches the known step");
                }
            }
            return decision_json(1, "pick the first", "no candidate matches the known step");
        }
        case Purpose::InputContent:
            return next && next->input ? *next->input : std::string{};
        case Purpose::RuleExtraction:
        case Purpose::StateSummary:
            break;
    }
    return {};
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries, bool strict, std::string fallback)
    : entries_(std::move(entries)), strict_(strict), fallback_(std::move(fallback)) {}

ScriptedBackend ScriptedBackend::from_json(const Json& j) {
    std::vector<ScriptEntry> entries;
    const Json& list = j.is_array() ? j : j.at("entries");
    for (const auto& e : list) entries.push_back(script_entry_from_json(e));
    bool strict = j.is_object() ? j.value("strict", true) : true;
    std::string fallback = j.is_object() ? j.value("fallback", "") : "";
    return ScriptedBackend(std::move(entries), strict, std::move(fallback));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    auto j = Json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error("script-invalid", path.string() + " is not valid JSON");
    try {
        return from_json(j);
    } catch (const Json::exception& e) {
        throw Error("script-invalid", path.string() + ": " + e.what());
    }
}

BackendReply ScriptedBackend::complete(const CompletionRequest& request, std::chrono::milliseconds) {
    for (const auto& entry : entries_) {
        if (!matches(entry, request)) continue;
        BackendReply reply;
        reply.text = entry.plan ? follow_plan(*entry.plan, request)
                                : expand_placeholders(entry.response.value_or(""), request.prompt);
        reply.prompt_tokens = entry.prompt_tokens;
        reply.output_tokens = entry.output_tokens;
        return reply;
    }
    if (strict_) {
        throw Error("scripted-unmatched", "no script entry for a " + std::string(to_string(request.purpose)) + " request");
    }
    return BackendReply{fallback_, std::nullopt, std::nullopt};
}

Json to_json(const PlanStep& step) {
    Json j;
    j["operation"] = std::string(to_string(step.operation));
    j["xpath"] = step.xpath;
    if (step.input) j["input"] = *step.input;
    return j;
}

PlanStep plan_step_from_json(const Json& j) {
    PlanStep s;
    s.operation = parse_operation(j.at("operation").get<std::string>());
    s.xpath = j.at("xpath").get<std::string>();
    if (j.contains("input") && !j.at("input").is_null()) s.input = j.at("input").get<std::string>();
    return s;
}

Json to_json(const ScriptEntry& entry) {
    Json j;
    if (entry.purposes.empty()) {
        j["purpose"] = "*";
    } else {
        Json list = Json::array();
        for (auto p : entry.purposes) list.push_back(std::string(to_string(p)));
        j["purpose"] = std::move(list);
    }
    if (!entry.contains.empty()) j["contains"] = entry.contains;
    if (!entry.not_contains.empty()) j["not_contains"] = entry.not_contains;
    if (entry.response) j["response"] = *entry.response;
    if (entry.plan) {
        Json steps = Json::array();
        for (const auto& s : *entry.plan) steps.push_back(to_json(s));
        j["plan"] = std::move(steps);
    }
    if (entry.prompt_tokens) j["prompt_tokens"] = *entry.prompt_tokens;
    if (entry.output_tokens) j["output_tokens"] = *entry.output_tokens;
    return j;
}

ScriptEntry script_entry_from_json(const Json& j) {
    ScriptEntry e;
    for (const auto& p : string_list(j, "purpose")) {
        if (p != "*") e.purposes.push_back(parse_purpose(p));
    }
    e.contains = string_list(j, "contains");
    e.not_contains = string_list(j, "not_contains");
    if (j.contains("response")) e.response = j.at("response").get<std::string>();
    if (j.contains("plan")) {
        std::vector<PlanStep> plan;
        for (const auto& s : j.at("plan")) plan.push_back(plan_step_from_json(s));
        e.plan = std::move(plan);
    }
    if (!e.response && !e.plan) throw Error("script-invalid", "entry has neither response nor plan");
    if (j.contains("prompt_tokens")) e.prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
    if (j.contains("output_tokens")) e.output_tokens = j.at("output_tokens").get<std::size_t>();
    return e;
}

}  // namespace hxagent

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

#include "hxagent/memory.hpp"

#include <charconv>

#include "hxagent/error.hpp"

namespace hxagent {

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Running: return "running";
        case Outcome::Done: return "done";
        case Outcome::StepLimit: return "step_limit";
        case Outcome::Error: return "error";
    }
    return "running";
}

Outcome parse_outcome(std::string_view text) {
    if (text == "running") return Outcome::Running;
    if (text == "done") return Outcome::Done;
    if (text == "step_limit") return Outcome::StepLimit;
    if (text == "error") return Outcome::Error;
    throw Error("unknown-outcome", std::string(text));
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::Correct ? "correct" : "incorrect"; }

Verdict parse_verdict(std::string_view text) {
    if (text == "correct") return Verdict::Correct;
    if (text == "incorrect") return Verdict::Incorrect;
    throw Error("unknown-verdict", std::string(text));
}

std::vector<FeasibleAction> EpisodeTrace::actions() const {
    std::vector<FeasibleAction> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.action);
    return out;
}

EpisodeTrace new_trace(std::string task, std::string site_title) {
    if (task.empty()) throw Error("empty-task");
    EpisodeTrace trace;
    trace.task = std::move(task);
    trace.site_title = std::move(site_title);
    return trace;
}

void append(EpisodeTrace& trace, WebState state, FeasibleAction action, std::string reason) {
    if (trace.closed()) throw Error("trace-closed");
    if (action.is_done()) throw Error("done-not-recorded");
    StateActionPair pair{std::move(state), std::move(action), static_cast<int>(trace.pairs.size()) + 1,
                         std::move(reason)};
    trace.pairs.push_back(std::move(pair));
}

void close(EpisodeTrace& trace, Outcome outcome, std::string error) {
    if (trace.closed()) throw Error("trace-closed");
    trace.outcome = outcome;
    trace.error = std::move(error);
}

MemoryWindow MemoryWindow::last(std::size_t n) {
    if (n == 0) throw Error("invalid-window", "memory window must be positive");
    MemoryWindow w;
    w.capacity_ = n;
    return w;
}

MemoryWindow MemoryWindow::parse(std::string_view text) {
    if (text == "all") return all();
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error("invalid-window", std::string(text));
    }
    return last(n);
}

std::size_t MemoryWindow::visible(std::size_t length) const noexcept {
    return capacity_ ? std::min(*capacity_, length) : length;
}

std::string MemoryWindow::to_string() const { return capacity_ ? std::to_string(*capacity_) : "all"; }

std::string render_action_line(const FeasibleAction& action) {
    std::string line = std::string(hxagent::to_string(action.operation)) + " on " + action.target.tag_name + " '" +
                       action.target.text + "' (" + action.target.xpath + ")";
    if (action.input_content) line += " with input '" + *action.input_content + "'";
    return line;
}

std::string render_memory_section(const EpisodeTrace& trace, MemoryWindow window, MemoryMode mode) {
    std::string out;
    out += "You are visiting the website title: " + trace.site_title + "\n";
    out += "You are asked to complete the following task: " + trace.task + "\n";
    out += "\n";
    out += "You have completed the following steps:\n";
    auto shown = window.visible(trace.pairs.size());
    auto first = trace.pairs.size() - shown;
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& pair = trace.pairs[first + i];
        auto k = std::to_string(i + 1);
        if (i > 0) out += "\n";
        if (mode == MemoryMode::StatesAndActions) out += "> STATE #" + k + ": " + pair.state.body + "\n";
        out += "> STEP #" + k + ": " + render_action_line(pair.action) + "\n";
    }
    return out;
}

Json to_json(const EpisodeTrace& trace) {
    Json pairs = Json::array();
    for (const auto& p : trace.pairs) {
        Json pj;
        pj["step_index"] = p.step_index;
        pj["state"] = to_json(p.state);
        pj["action"] = to_json(p.action);
        pj["reason"] = p.reason;
        pairs.push_back(std::move(pj));
    }
    Json j;
    j["episode_id"] = trace.episode_id;
    j["task_id"] = trace.task_id;
    j["entry"] = trace.entry;
    j["task"] = trace.task;
    j["site_title"] = trace.site_title;
    j["pairs"] = std::move(pairs);
    j["outcome"] = std::string(to_string(trace.outcome));
    j["verdict"] = trace.verdict ? Json(std::string(to_string(*trace.verdict))) : Json(nullptr);
    j["error"] = trace.error;
    j["timestamps"] = {{"started", trace.started_at}, {"finished", trace.finished_at}};
    return j;
}

EpisodeTrace trace_from_json(const Json& j) {
    EpisodeTrace t;
    t.episode_id = j.value("episode_id", "");
    t.task_id = j.value("task_id", "");
    t.entry = j.value("entry", "");
    t.task = j.at("task").get<std::string>();
    t.site_title = j.value("site_title", "");
    for (const auto& pj : j.at("pairs")) {
        StateActionPair p;
        p.step_index = pj.at("step_index").get<int>();
        p.state = state_from_json(pj.at("state"));
        p.action = action_from_json(pj.at("action"));
        p.reason = pj.value("reason", "");
        t.pairs.push_back(std::move(p));
    }
    t.outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (j.contains("verdict") && !j.at("verdict").is_null()) t.verdict = parse_verdict(j.at("verdict").get<std::string>());
    t.error = j.value("error", "");
    if (j.contains("timestamps")) {
        t.started_at = j.at("timestamps").value("started", "");
        t.finished_at = j.at("timestamps").value("finished", "");
    }
    return t;
}

}  // namespace hxagent

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

#include "hxagent/llm.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "hxagent/util.hpp"

namespace hxagent {

namespace {

std::size_t index_of(Purpose p) { return static_cast<std::size_t>(p); }

bool images_allowed(Purpose p) { return p == Purpose::DuplicateDisambiguation || p == Purpose::StateSummary; }

// End (one past) of the balanced JSON object starting at `open`, honouring
// string literals; npos if unbalanced.
std::size_t object_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

}  // namespace

std::string_view to_string(Purpose purpose) {
    switch (purpose) {
        case Purpose::NextAction: return "next_action";
        case Purpose::DuplicateDisambiguation: return "duplicate_disambiguation";
        case Purpose::InputContent: return "input_content";
        case Purpose::RuleExtraction: return "rule_extraction";
        case Purpose::StateSummary: return "state_summary";
    }
    return "next_action";
}

Purpose parse_purpose(std::string_view text) {
    for (auto p : kAllPurposes) {
        if (to_string(p) == text) return p;
    }
    throw Error("unknown-purpose", std::string(text));
}

std::size_t estimate_tokens(std::string_view text) { return (util::utf8_length(text) + 3) / 4; }

TokenLedger::TokenLedger(const TokenLedger& other) {
    std::lock_guard lock(other.mutex_);
    counters_ = other.counters_;
}

TokenLedger& TokenLedger::operator=(const TokenLedger& other) {
    if (&other == this) return *this;
    std::array<Counters, kAllPurposes.size()> theirs;
    {
        std::lock_guard lock(other.mutex_);
        theirs = other.counters_;
    }
    std::lock_guard lock(mutex_);
    counters_ = theirs;
    return *this;
}

void TokenLedger::record(Purpose purpose, std::size_t prompt_tokens, std::size_t output_tokens) {
    std::lock_guard lock(mutex_);
    auto& c = counters_[index_of(purpose)];
    c.prompt_tokens += prompt_tokens;
    c.output_tokens += output_tokens;
    c.calls += 1;
}

TokenLedger::Counters TokenLedger::of(Purpose purpose) const {
    std::lock_guard lock(mutex_);
    return counters_[index_of(purpose)];
}

TokenLedger::Counters TokenLedger::total() const {
    std::lock_guard lock(mutex_);
    Counters sum;
    for (const auto& c : counters_) {
        sum.prompt_tokens += c.prompt_tokens;
        sum.output_tokens += c.output_tokens;
        sum.calls += c.calls;
    }
    return sum;
}

void TokenLedger::merge(const TokenLedger& other) {
    if (&other == this) return;
    std::array<Counters, kAllPurposes.size()> theirs;
    {
        std::lock_guard lock(other.mutex_);
        theirs = other.counters_;
    }
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < theirs.size(); ++i) {
        counters_[i].prompt_tokens += theirs[i].prompt_tokens;
        counters_[i].output_tokens += theirs[i].output_tokens;
        counters_[i].calls += theirs[i].calls;
    }
}

std::string TokenLedger::to_csv() const {
    std::ostringstream out;
    out << "purpose,calls,prompt_tokens,output_tokens\n";
    for (auto p : kAllPurposes) {
        auto c = of(p);
        out << to_string(p) << ',' << c.calls << ',' << c.prompt_tokens << ',' << c.output_tokens << '\n';
    }
    auto t = total();
    out << "total," << t.calls << ',' << t.prompt_tokens << ',' << t.output_tokens << '\n';
    return out.str();
}

Json TokenLedger::to_json() const {
    Json j;
    for (auto p : kAllPurposes) {
        auto c = of(p);
        j[std::string(to_string(p))] = {
            {"calls", c.calls}, {"prompt_tokens", c.prompt_tokens}, {"output_tokens", c.output_tokens}};
    }
    auto t = total();
    j["total"] = {{"calls", t.calls}, {"prompt_tokens", t.prompt_tokens}, {"output_tokens", t.output_tokens}};
    return j;
}

std::string PromptLog::to_jsonl() const {
    std::string out;
    std::size_t seq = 0;
    for (const auto& e : entries_) {
        Json j;
        j["seq"] = ++seq;
        j["purpose"] = std::string(to_string(e.purpose));
        j["prompt"] = e.prompt;
        j["images"] = e.image_count;
        j["response"] = e.response;
        j["prompt_tokens"] = e.prompt_tokens;
        j["output_tokens"] = e.output_tokens;
        out += j.dump();
        out += '\n';
    }
    return out;
}

PromptLog PromptLog::from_jsonl(std::string_view text) {
    PromptLog log;
    for (const auto& line : util::split_lines(text)) {
        if (util::trim(line).empty()) continue;
        auto j = Json::parse(line);
        PromptLogEntry e;
        e.purpose = parse_purpose(j.at("purpose").get<std::string>());
        e.prompt = j.at("prompt").get<std::string>();
        e.image_count = j.value("images", std::size_t{0});
        e.response = j.at("response").get<std::string>();
        e.prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
        e.output_tokens = j.at("output_tokens").get<std::size_t>();
        log.record(std::move(e));
    }
    return log;
}

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, RetryPolicy retry, std::chrono::milliseconds timeout)
    : backend_(std::move(backend)), retry_(retry), timeout_(timeout) {
    if (!backend_) throw Error("llm-unconfigured", "no backend");
    if (retry_.attempts < 1) retry_.attempts = 1;
}

Completion LlmGateway::complete(const CompletionRequest& request, PromptLog* log) {
    if (request.prompt.empty()) throw Error("empty-prompt");
    if (!request.images.empty() && !images_allowed(request.purpose)) {
        throw Error("images-not-permitted", std::string(to_string(request.purpose)));
    }

    std::optional<BackendReply> reply;
    std::string last_failure;
    auto backoff = retry_.initial_backoff;
    for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
        try {
            reply = backend_->complete(request, timeout_);
            break;
        } catch (const TransportFailure& e) {
            last_failure = e.what();
            spdlog::warn("llm attempt {}/{} failed: {}", attempt, retry_.attempts, last_failure);
            if (attempt < retry_.attempts) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
        }
    }
    if (!reply) throw Error("llm-unavailable", last_failure);

    Completion out;
    out.text = std::move(reply->text);
    out.prompt_tokens = reply->prompt_tokens.value_or(estimate_tokens(request.prompt));
    out.output_tokens = reply->output_tokens.value_or(estimate_tokens(out.text));
    ledger_.record(request.purpose, out.prompt_tokens, out.output_tokens);
    if (log) {
        log->record(PromptLogEntry{request.purpose, request.prompt, request.images.size(), out.text,
                                   out.prompt_tokens, out.output_tokens});
    }
    return out;
}

ParsedDecision parse_decision(std::string_view raw, std::size_t candidate_count) {
    auto fail = [](const std::string& why) -> ParsedDecision { throw Error("decision-parse-failure", why); };

    std::optional<Json> object;
    for (auto open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
        auto end = object_end(raw, open);
        if (end == std::string_view::npos) break;
        auto parsed = Json::parse(raw.substr(open, end - open), nullptr, /*allow_exceptions=*/false);
        if (!parsed.is_discarded() && parsed.is_object()) {
            bool decision = parsed.contains("chosen_action");
            if (!object || decision) object = std::move(parsed);
            if (decision) break;
        }
    }
    if (!object) return fail("no well-formed JSON object in the response");

    const auto& j = *object;
    for (const char* key : {"chosen_action", "action_description", "reason"}) {
        if (!j.contains(key)) return fail(std::string("missing field \"") + key + "\"");
    }

    long long index = 0;
    const auto& chosen = j.at("chosen_action");
    if (chosen.is_number_integer() || chosen.is_number_unsigned()) {
        index = chosen.get<long long>();
    } else if (chosen.is_number_float()) {
        double v = chosen.get<double>();
        if (std::floor(v) != v) return fail("chosen_action is not an integer");
        index = static_cast<long long>(v);
    } else if (chosen.is_string()) {
        auto s = util::trim(chosen.get<std::string>());
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            return fail("chosen_action is not an integer");
        }
        index = std::stoll(s);
    } else {
        return fail("chosen_action is not an integer");
    }
    if (index < 1 || static_cast<std::size_t>(index) > candidate_count) {
        return fail("chosen_action " + std::to_string(index) + " outside 1.." + std::to_string(candidate_count));
    }

    auto as_text = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    return ParsedDecision{static_cast<int>(index), as_text(j.at("action_description")), as_text(j.at("reason"))};
}

ParsedDecision request_decision(LlmGateway& gateway, const CompletionRequest& request, std::size_t candidate_count,
                                PromptLog* log) {
    auto first = gateway.complete(request, log);
    try {
        return parse_decision(first.text, candidate_count);
    } catch (const Error& e) {
        spdlog::warn("decision unparseable, asking for a repair: {}", e.what());
        CompletionRequest repair = request;
        repair.prompt += "\n\nYour previous response could not be used: " + std::string(e.what()) +
                         "\nPrevious response:\n" + first.text +
                         "\nReply again with only the JSON object in the required format.";
        auto second = gateway.complete(repair, log);
        return parse_decision(second.text, candidate_count);
    }
}

}  // namespace hxagent

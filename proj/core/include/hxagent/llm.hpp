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

#include <array>
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hxagent/error.hpp"
#include "hxagent/json.hpp"

namespace hxagent {

enum class Purpose { NextAction, DuplicateDisambiguation, InputContent, RuleExtraction, StateSummary };
inline constexpr std::array<Purpose, 5> kAllPurposes = {Purpose::NextAction, Purpose::DuplicateDisambiguation,
                                                        Purpose::InputContent, Purpose::RuleExtraction,
                                                        Purpose::StateSummary};

std::string_view to_string(Purpose purpose);
Purpose parse_purpose(std::string_view text);

struct Image {
    std::string bytes;
    std::string media_type = "image/png";
};

struct Decoding {
    double temperature = 0.0;
    int max_output = 512;
};

struct CompletionRequest {
    std::string prompt;
    std::vector<Image> images;
    Decoding decoding;
    Purpose purpose = Purpose::NextAction;
};

struct Completion {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t output_tokens = 0;
};

// What a backend hands back; token counts are optional because not every
// provider reports them.
struct BackendReply {
    std::string text;
    std::optional<std::size_t> prompt_tokens;
    std::optional<std::size_t> output_tokens;
};

// Retryable failure (connection refused, 5xx, rate limiting).
class TransportFailure : public Error {
public:
    explicit TransportFailure(const std::string& detail) : Error("transport-failure", detail) {}
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    // Throws TransportFailure for retryable problems, Error("llm-timeout")
    // when the call exceeds `timeout`, any other Error for permanent ones.
    virtual BackendReply complete(const CompletionRequest& request, std::chrono::milliseconds timeout) = 0;
};

// ceil(characters / 4), counting Unicode scalar values.
std::size_t estimate_tokens(std::string_view text);

class TokenLedger {
public:
    struct Counters {
        std::size_t prompt_tokens = 0;
        std::size_t output_tokens = 0;
        std::size_t calls = 0;

        bool operator==(const Counters&) const = default;
    };

    TokenLedger() = default;
    TokenLedger(const TokenLedger& other);
    TokenLedger& operator=(const TokenLedger& other);

    void record(Purpose purpose, std::size_t prompt_tokens, std::size_t output_tokens);
    Counters of(Purpose purpose) const;
    Counters total() const;
    void merge(const TokenLedger& other);

    // purpose,calls,prompt_tokens,output_tokens with a trailing total row.
    std::string to_csv() const;
    Json to_json() const;

private:
    mutable std::mutex mutex_;
    std::array<Counters, kAllPurposes.size()> counters_{};
};

struct PromptLogEntry {
    Purpose purpose = Purpose::NextAction;
    std::string prompt;
    std::size_t image_count = 0;
    std::string response;
    std::size_t prompt_tokens = 0;
    std::size_t output_tokens = 0;
};

// Append-only record of the completions made during one episode.
class PromptLog {
public:
    void record(PromptLogEntry entry) { entries_.push_back(std::move(entry)); }
    const std::vector<PromptLogEntry>& entries() const noexcept { return entries_; }
    std::string to_jsonl() const;
    static PromptLog from_jsonl(std::string_view text);

private:
    std::vector<PromptLogEntry> entries_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
};

// Uniform entry point to the reasoning model. Reentrant: concurrent calls are
// allowed and ledger updates are atomic.
class LlmGateway {
public:
    LlmGateway(std::shared_ptr<LlmBackend> backend, RetryPolicy retry = {},
               std::chrono::milliseconds timeout = std::chrono::seconds(60));

    // Throws Error("empty-prompt"), Error("images-not-permitted"),
    // Error("llm-unavailable") after the retry budget, Error("llm-timeout").
    Completion complete(const CompletionRequest& request, PromptLog* log = nullptr);

    TokenLedger& ledger() noexcept { return ledger_; }
    const TokenLedger& ledger() const noexcept { return ledger_; }

private:
    std::shared_ptr<LlmBackend> backend_;
    RetryPolicy retry_;
    std::chrono::milliseconds timeout_;
    TokenLedger ledger_;
};

struct ParsedDecision {
    int chosen_action = 0;
    std::string action_description;
    std::string reason;
};

// Reads {"chosen_action", "action_description", "reason"} from the first
// well-formed JSON object in `raw` that has a chosen_action (else the first
// object, which then fails).
// chosen_action must be an integer in 1..candidate_count.
// Throws Error("decision-parse-failure").
ParsedDecision parse_decision(std::string_view raw, std::size_t candidate_count);

// complete() + parse_decision() with one repair round-trip: on a parse
// failure the prompt is re-sent with the error appended.
ParsedDecision request_decision(LlmGateway& gateway, const CompletionRequest& request, std::size_t candidate_count,
                                PromptLog* log = nullptr);

}  // namespace hxagent

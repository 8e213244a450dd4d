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

#include <string>

#include "hxagent/llm.hpp"

namespace hxagent {

struct RemoteLlmConfig {
    // Full URL of a chat-completions style endpoint.
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o";
    // Name of the environment variable holding the bearer credential.
    std::string api_key_env = "HXAGENT_LLM_API_KEY";
    std::string system_prompt;
};

// Chat-style HTTP backend: one optional system message plus one user message,
// images inlined as data URLs. 429 and 5xx responses and connection problems
// are reported as TransportFailure so the gateway retries them.
class RemoteBackend : public LlmBackend {
public:
    explicit RemoteBackend(RemoteLlmConfig config);

    BackendReply complete(const CompletionRequest& request, std::chrono::milliseconds timeout) override;

    // Request body for `request`; exposed for tests.
    Json request_body(const CompletionRequest& request) const;
    // Parses a response body. Throws Error("llm-bad-response").
    static BackendReply parse_response(std::string_view body);

private:
    RemoteLlmConfig config_;
    std::string origin_;
    std::string path_;
};

}  // namespace hxagent

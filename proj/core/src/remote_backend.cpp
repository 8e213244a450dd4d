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

#include "hxagent/remote_backend.hpp"

#include <cstdlib>

#include <httplib.h>

#include "hxagent/util.hpp"

namespace hxagent {

RemoteBackend::RemoteBackend(RemoteLlmConfig config) : config_(std::move(config)) {
    auto scheme = config_.endpoint.find("://");
    if (scheme == std::string::npos) throw Error("llm-unconfigured", "endpoint has no scheme: " + config_.endpoint);
    auto slash = config_.endpoint.find('/', scheme + 3);
    origin_ = config_.endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

Json RemoteBackend::request_body(const CompletionRequest& request) const {
    Json messages = Json::array();
    if (!config_.system_prompt.empty()) {
        messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
    }
    Json user;
    user["role"] = "user";
    if (request.images.empty()) {
        user["content"] = request.prompt;
    } else {
        Json parts = Json::array();
        parts.push_back({{"type", "text"}, {"text", request.prompt}});
        for (const auto& image : request.images) {
            parts.push_back({{"type", "image_url"},
                             {"image_url", {{"url", "data:" + image.media_type + ";base64," +
                                                        util::base64_encode(image.bytes)}}}});
        }
        user["content"] = std::move(parts);
    }
    messages.push_back(std::move(user));

    Json body;
    body["model"] = config_.model;
    body["messages"] = std::move(messages);
    body["temperature"] = request.decoding.temperature;
    body["max_tokens"] = request.decoding.max_output;
    return body;
}

BackendReply RemoteBackend::parse_response(std::string_view body) {
    auto j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error("llm-bad-response", "response is not JSON");
    try {
        BackendReply reply;
        const auto& content = j.at("choices").at(0).at("message").at("content");
        reply.text = content.is_null() ? std::string{} : content.get<std::string>();
        if (j.contains("usage") && j.at("usage").is_object()) {
            const auto& usage = j.at("usage");
            if (usage.contains("prompt_tokens")) reply.prompt_tokens = usage.at("prompt_tokens").get<std::size_t>();
            if (usage.contains("completion_tokens")) {
                reply.output_tokens = usage.at("completion_tokens").get<std::size_t>();
            }
        }
        return reply;
    } catch (const Json::exception& e) {
        throw Error("llm-bad-response", e.what());
    }
}

BackendReply RemoteBackend::complete(const CompletionRequest& request, std::chrono::milliseconds timeout) {
    httplib::Client client(origin_);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path_, headers, request_body(request).dump(), "application/json");
    if (!result) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        if (result.error() == httplib::Error::Read && elapsed >= timeout) {
            throw Error("llm-timeout", "no response within " + std::to_string(timeout.count()) + " ms");
        }
        throw TransportFailure(httplib::to_string(result.error()));
    }
    if (result->status == 429 || result->status >= 500) {
        throw TransportFailure("HTTP " + std::to_string(result->status));
    }
    if (result->status != 200) {
        throw Error("llm-request-rejected", "HTTP " + std::to_string(result->status) + ": " + result->body);
    }
    return parse_response(result->body);
}

}  // namespace hxagent

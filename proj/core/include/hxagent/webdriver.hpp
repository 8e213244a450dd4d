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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hxagent/environment.hpp"
#include "hxagent/error.hpp"
#include "hxagent/json.hpp"

namespace hxagent {

// Protocol error reply. code() is the mapped local code, w3c_code() the
// error string from the reply ("no such element", ...).
class WebDriverError : public Error {
public:
    WebDriverError(std::string w3c_code, int http_status, const std::string& message);
    const std::string& w3c_code() const noexcept { return w3c_code_; }
    int http_status() const noexcept { return http_status_; }

private:
    std::string w3c_code_;
    int http_status_;
};

// "no such element" -> "element-not-found", "element not interactable" ->
// "not-interactable", "timeout" -> "navigation-timeout", ...
std::string map_w3c_error(std::string_view w3c_code);

inline constexpr std::string_view kW3cElementKey = "element-6066-11e4-a52e-4f735466cecf";

// Marker comments the scripts carry so that test doubles can recognise them.
inline constexpr std::string_view kRenderInfoMarker = "/*hxagent:render-info*/";
inline constexpr std::string_view kReadyStateMarker = "/*hxagent:ready-state*/";

// Page script returning {xpath: {visible, interactable, has_handler}} with
// xpaths in the same format as dom::compute_xpath.
const std::string& render_info_script();
const std::string& ready_state_script();

// Minimal W3C WebDriver client over HTTP+JSON.
class WebDriverClient {
public:
    explicit WebDriverClient(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~WebDriverClient();
    WebDriverClient(const WebDriverClient&) = delete;
    WebDriverClient& operator=(const WebDriverClient&) = delete;

    std::string new_session(const Json& capabilities = default_capabilities());
    void delete_session();
    bool has_session() const noexcept { return !session_.empty(); }
    const std::string& session_id() const noexcept { return session_; }

    void navigate(const std::string& url);
    std::string current_url();
    std::string title();
    std::string page_source();
    // Decoded image bytes.
    std::string screenshot();
    // Element reference for an absolute xpath.
    std::string find_element(const std::string& xpath);
    void click(const std::string& element);
    void clear(const std::string& element);
    void send_keys(const std::string& element, const std::string& text);
    Json execute_script(const std::string& script, const Json& args = Json::array());

    static Json default_capabilities();

private:
    // A null body sends no payload.
    Json call(const std::string& method, const std::string& path, const Json& body = nullptr);
    std::string session_path() const;

    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string session_;
};

struct WebDriverConfig {
    std::string endpoint = "http://127.0.0.1:4444";
    Json capabilities = WebDriverClient::default_capabilities();
    std::chrono::milliseconds request_timeout{30'000};
    // Settled condition: readyState complete, then this long without acting.
    std::chrono::milliseconds quiet_period{200};
    std::chrono::milliseconds settle_timeout{10'000};
    bool capture_screenshots = true;
};

// Environment backed by a remote browser session.
class WebDriverEnvironment : public Environment {
public:
    explicit WebDriverEnvironment(WebDriverConfig config);
    ~WebDriverEnvironment() override;

    PageObservation load(const std::string& entry) override;
    ExecutionResult execute(const FeasibleAction& action) override;
    PageObservation observe() override;

    WebDriverClient& client() noexcept { return client_; }

private:
    // False if the page did not settle in time.
    bool settle();

    WebDriverConfig config_;
    WebDriverClient client_;
};

}  // namespace hxagent

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

#include "hxagent/webdriver.hpp"

#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hxagent/util.hpp"

namespace hxagent {

WebDriverError::WebDriverError(std::string w3c_code, int http_status, const std::string& message)
    : Error(map_w3c_error(w3c_code), w3c_code + ": " + message), w3c_code_(std::move(w3c_code)),
      http_status_(http_status) {}

std::string map_w3c_error(std::string_view w3c) {
    if (w3c == "no such element" || w3c == "stale element reference") return "element-not-found";
    if (w3c == "element not interactable" || w3c == "element click intercepted" || w3c == "invalid element state") {
        return "not-interactable";
    }
    if (w3c == "timeout" || w3c == "script timeout") return "navigation-timeout";
    if (w3c == "invalid session id" || w3c == "session not created") return "session-error";
    if (w3c == "invalid argument") return "invalid-argument";
    return "webdriver-error";
}

const std::string& render_info_script() {
    static const std::string script = std::string(kRenderInfoMarker) + R"JS(
const out = {};
const unindexed = new Set(['html', 'head', 'body']);
function path(el) {
  const parts = [];
  for (let n = el; n && n.nodeType === 1; n = n.parentElement) {
    const tag = n.tagName.toLowerCase();
    if (unindexed.has(tag)) { parts.push(tag); continue; }
    let i = 1;
    for (let s = n.previousElementSibling; s; s = s.previousElementSibling) {
      if (s.tagName.toLowerCase() === tag) i++;
    }
    parts.push(tag + '[' + i + ']');
  }
  return parts.reverse().join('/');
}
for (const el of document.querySelectorAll('*')) {
  const style = window.getComputedStyle(el);
  const box = el.getBoundingClientRect();
  const visible = style.display !== 'none' && style.visibility !== 'hidden' && box.width > 0 && box.height > 0;
  let handler = typeof el.onclick === 'function';
  for (const a of el.attributes) { if (a.name.startsWith('on')) { handler = true; break; } }
  out[path(el)] = {visible: visible, interactable: visible && !el.disabled, has_handler: handler};
}
return out;)JS";
    return script;
}

const std::string& ready_state_script() {
    static const std::string script = std::string(kReadyStateMarker) + "\nreturn document.readyState;";
    return script;
}

struct WebDriverClient::Impl {
    explicit Impl(const std::string& endpoint) : client(endpoint) {}
    httplib::Client client;
};

WebDriverClient::WebDriverClient(std::string endpoint, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(endpoint)) {
    impl_->client.set_connection_timeout(timeout);
    impl_->client.set_read_timeout(timeout);
    impl_->client.set_write_timeout(timeout);
    impl_->client.set_keep_alive(true);
    impl_->client.set_tcp_nodelay(true);
}

WebDriverClient::~WebDriverClient() = default;

Json WebDriverClient::default_capabilities() {
    return Json{{"capabilities", {{"alwaysMatch", {{"browserName", "chrome"}}}}}};
}

Json WebDriverClient::call(const std::string& method, const std::string& path, const Json& body) {
    httplib::Result result;
    std::string payload = body.is_null() ? std::string{} : body.dump();
    if (method == "GET") result = impl_->client.Get(path);
    else if (method == "DELETE") result = impl_->client.Delete(path);
    else result = impl_->client.Post(path, payload, "application/json");
    if (!result) throw Error("webdriver-unreachable", method + " " + path + ": " + httplib::to_string(result.error()));

    auto reply = Json::parse(result->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("value")) {
        throw Error("webdriver-bad-response", method + " " + path + ": HTTP " + std::to_string(result->status));
    }
    const auto& value = reply.at("value");
    if (result->status >= 400 || (value.is_object() && value.contains("error"))) {
        std::string w3c = value.is_object() ? value.value("error", "unknown error") : "unknown error";
        std::string message = value.is_object() ? value.value("message", "") : "";
        throw WebDriverError(w3c, result->status, message);
    }
    return value;
}

std::string WebDriverClient::session_path() const {
    if (session_.empty()) throw Error("session-error", "no open session");
    return "/session/" + session_;
}

std::string WebDriverClient::new_session(const Json& capabilities) {
    auto value = call("POST", "/session", capabilities);
    session_ = value.at("sessionId").get<std::string>();
    return session_;
}

void WebDriverClient::delete_session() {
    if (session_.empty()) return;
    auto path = session_path();
    session_.clear();
    call("DELETE", path);
}

void WebDriverClient::navigate(const std::string& url) { call("POST", session_path() + "/url", Json{{"url", url}}); }

std::string WebDriverClient::current_url() { return call("GET", session_path() + "/url").get<std::string>(); }

std::string WebDriverClient::title() { return call("GET", session_path() + "/title").get<std::string>(); }

std::string WebDriverClient::page_source() {
    return call("GET", session_path() + "/source").get<std::string>();
}

std::string WebDriverClient::screenshot() {
    return util::base64_decode(call("GET", session_path() + "/screenshot").get<std::string>());
}

std::string WebDriverClient::find_element(const std::string& xpath) {
    auto value = call("POST", session_path() + "/element", Json{{"using", "xpath"}, {"value", xpath}});
    return value.at(std::string(kW3cElementKey)).get<std::string>();
}

void WebDriverClient::click(const std::string& element) {
    call("POST", session_path() + "/element/" + element + "/click", Json::object());
}

void WebDriverClient::clear(const std::string& element) {
    call("POST", session_path() + "/element/" + element + "/clear", Json::object());
}

void WebDriverClient::send_keys(const std::string& element, const std::string& text) {
    call("POST", session_path() + "/element/" + element + "/value", Json{{"text", text}});
}

Json WebDriverClient::execute_script(const std::string& script, const Json& args) {
    return call("POST", session_path() + "/execute/sync", Json{{"script", script}, {"args", args}});
}

WebDriverEnvironment::WebDriverEnvironment(WebDriverConfig config)
    : config_(std::move(config)), client_(config_.endpoint, config_.request_timeout) {}

WebDriverEnvironment::~WebDriverEnvironment() {
    try {
        client_.delete_session();
    } catch (const std::exception& e) {
        spdlog::warn("closing webdriver session failed: {}", e.what());
    }
}

bool WebDriverEnvironment::settle() {
    auto deadline = std::chrono::steady_clock::now() + config_.settle_timeout;
    while (true) {
        auto state = client_.execute_script(ready_state_script());
        if (state.is_string() && state.get<std::string>() == "complete") break;
        if (std::chrono::steady_clock::now() >= deadline) return false;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    if (config_.quiet_period.count() > 0) std::this_thread::sleep_for(config_.quiet_period);
    return true;
}

PageObservation WebDriverEnvironment::load(const std::string& entry) {
    try {
        if (!client_.has_session()) client_.new_session(config_.capabilities);
        client_.navigate(entry);
        if (!settle()) throw Error("load-failure", entry + " never finished loading");
        return observe();
    } catch (const Error& e) {
        if (e.code() == "load-failure") throw;
        throw Error("load-failure", entry + ": " + e.what());
    }
}

PageObservation WebDriverEnvironment::observe() {
    PageObservation obs{dom::parse_html(client_.page_source()), {}, {}, {}, std::nullopt};
    obs.render_info = render_info_from_json(client_.execute_script(render_info_script()));
    obs.title = client_.title();
    obs.url = client_.current_url();
    if (config_.capture_screenshots) obs.screenshot = client_.screenshot();
    return obs;
}

ExecutionResult WebDriverEnvironment::execute(const FeasibleAction& action) {
    if (action.is_done()) throw Error("not-executable", "the done pseudo-action is never executed");
    if (action.operation != Operation::Click && !action.input_content) {
        throw Error("not-executable", std::string(to_string(action.operation)) + " without input content");
    }
    try {
        auto element = client_.find_element("/" + action.target.xpath);
        switch (action.operation) {
            case Operation::Click:
                client_.click(element);
                break;
            case Operation::Input:
                client_.clear(element);
                client_.send_keys(element, *action.input_content);
                break;
            case Operation::Select:
                client_.send_keys(element, *action.input_content);
                break;
            case Operation::Done:
                break;
        }
    } catch (const WebDriverError& e) {
        if (e.code() == "element-not-found") return {ExecStatus::ElementNotFound, std::nullopt, e.what()};
        if (e.code() == "not-interactable") return {ExecStatus::NotInteractable, std::nullopt, e.what()};
        if (e.code() == "navigation-timeout") return {ExecStatus::NavigationTimeout, std::nullopt, e.what()};
        throw;
    }
    if (!settle()) return {ExecStatus::NavigationTimeout, std::nullopt, "page did not settle"};
    return {ExecStatus::Ok, observe(), {}};
}

}  // namespace hxagent

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

#include "hxagent/mock_webdriver.hpp"

#include <httplib.h>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"
#include "hxagent/webdriver.hpp"

namespace hxagent {

namespace {

int status_for(const std::string& w3c) {
    if (w3c == "no such element" || w3c == "stale element reference" || w3c == "invalid session id" ||
        w3c == "unknown command") {
        return 404;
    }
    if (w3c == "element not interactable" || w3c == "invalid argument") return 400;
    return 500;
}

void reply(httplib::Response& res, const Json& value) {
    res.status = 200;
    res.set_content(Json{{"value", value}}.dump(), "application/json; charset=utf-8");
}

void fail(httplib::Response& res, const std::string& w3c, const std::string& message) {
    res.status = status_for(w3c);
    res.set_content(Json{{"value", {{"error", w3c}, {"message", message}, {"stacktrace", ""}}}}.dump(),
                    "application/json; charset=utf-8");
}

}  // namespace

struct MockWebDriverServer::Impl {
    httplib::Server server;
    mutable std::mutex mutex;
    std::vector<std::string> transcript;
    std::map<std::string, std::string> static_pages;

    bool session_open = false;
    std::string url = "about:blank";
    std::optional<sim::SimEnvironment> sim;
    std::optional<dom::Document> static_doc;
    std::map<std::string, std::pair<std::string, int>> elements;  // id -> (xpath, generation)
    int generation = 0;
    int next_element = 0;

    dom::Document current_document() {
        if (sim) return std::move(sim->observe().document);
        if (static_doc) return dom::parse_html(dom::serialize(*static_doc));
        return dom::parse_html("<html><head><title></title></head><body></body></html>");
    }

    RenderInfo current_render_info() {
        if (sim) return sim->observe().render_info;
        return infer_render_info(current_document());
    }

    bool check_session(const httplib::Request& req, httplib::Response& res) {
        if (!session_open || req.matches[1] != kSessionId) {
            fail(res, "invalid session id", "no such session");
            return false;
        }
        return true;
    }

    std::optional<std::string> element_xpath(const std::string& id, httplib::Response& res) {
        auto it = elements.find(id);
        if (it == elements.end()) {
            fail(res, "no such element", "unknown element reference " + id);
            return std::nullopt;
        }
        if (it->second.second != generation) {
            fail(res, "stale element reference", id + " belongs to a previous page state");
            return std::nullopt;
        }
        return it->second.first;
    }

    void perform(const FeasibleAction& action, httplib::Response& res) {
        if (!sim) {
            reply(res, nullptr);
            return;
        }
        auto result = sim->execute(action);
        switch (result.status) {
            case ExecStatus::Ok:
                ++generation;
                reply(res, nullptr);
                return;
            case ExecStatus::ElementNotFound:
                fail(res, "no such element", result.detail);
                return;
            case ExecStatus::NotInteractable:
                fail(res, "element not interactable", result.detail);
                return;
            case ExecStatus::NavigationTimeout:
                fail(res, "timeout", result.detail);
                return;
        }
    }

    void routes() {
        // Post-routing: the request body has been read by then.
        server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response&) {
            std::lock_guard lock(mutex);
            std::string line = req.method + " " + req.path;
            if (!req.body.empty()) line += "\n" + req.body;
            transcript.push_back(std::move(line));
        });

        server.Post("/session", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (session_open) return fail(res, "session not created", "a session is already open");
            session_open = true;
            url = "about:blank";
            sim.reset();
            static_doc.reset();
            elements.clear();
            reply(res, {{"sessionId", kSessionId}, {"capabilities", {{"browserName", "hxagent-mock"}}}});
        });

        server.Delete(R"(/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            session_open = false;
            reply(res, nullptr);
        });

        server.Post(R"(/session/([^/]+)/url)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            auto body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("url")) return fail(res, "invalid argument", "url missing");
            auto target = body.at("url").get<std::string>();
            ++generation;
            sim.reset();
            static_doc.reset();
            if (auto it = static_pages.find(target); it != static_pages.end()) {
                static_doc = dom::parse_html(it->second);
            } else {
                try {
                    sim.emplace();
                    sim->load(target);
                } catch (const Error& e) {
                    sim.reset();
                    return fail(res, "unknown error", e.what());
                }
            }
            url = target;
            reply(res, nullptr);
        });

        server.Get(R"(/session/([^/]+)/url)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            reply(res, sim ? sim->observe().url : url);
        });

        server.Get(R"(/session/([^/]+)/title)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            reply(res, current_document().title());
        });

        server.Get(R"(/session/([^/]+)/source)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            reply(res, dom::serialize(current_document()));
        });

        server.Get(R"(/session/([^/]+)/screenshot)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            std::string image = sim ? *sim->observe().screenshot : dom::inner_text(*current_document().html());
            reply(res, util::base64_encode(image));
        });

        server.Post(R"(/session/([^/]+)/element)", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!check_session(req, res)) return;
            auto body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded() || body.value("using", "") != "xpath" || !body.contains("value")) {
                return fail(res, "invalid argument", "only xpath lookups are supported");
            }
            auto xpath = body.at("value").get<std::string>();
            auto doc = current_document();
            const auto* node = dom::resolve_xpath(doc, xpath);
            if (!node) return fail(res, "no such element", "no element matches " + xpath);
            auto id = "el-" + std::to_string(++next_element);
            elements[id] = {dom::compute_xpath(*node), generation};
            reply(res, {{std::string(kW3cElementKey), id}});
        });

        server.Post(R"(/session/([^/]+)/element/([^/]+)/click)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        std::lock_guard lock(mutex);
                        if (!check_session(req, res)) return;
                        auto xpath = element_xpath(req.matches[2], res);
                        if (!xpath) return;
                        FeasibleAction a;
                        a.operation = Operation::Click;
                        a.target.xpath = *xpath;
                        perform(a, res);
                    });

        server.Post(R"(/session/([^/]+)/element/([^/]+)/clear)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        std::lock_guard lock(mutex);
                        if (!check_session(req, res)) return;
                        if (!element_xpath(req.matches[2], res)) return;
                        reply(res, nullptr);
                    });

        server.Post(R"(/session/([^/]+)/element/([^/]+)/value)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        std::lock_guard lock(mutex);
                        if (!check_session(req, res)) return;
                        auto xpath = element_xpath(req.matches[2], res);
                        if (!xpath) return;
                        auto body = Json::parse(req.body, nullptr, false);
                        if (body.is_discarded() || !body.contains("text")) {
                            return fail(res, "invalid argument", "text missing");
                        }
                        auto doc = current_document();
                        const auto* node = dom::resolve_xpath(doc, *xpath);
                        FeasibleAction a;
                        a.operation = node && node->tag() == "select" ? Operation::Select : Operation::Input;
                        a.target.xpath = *xpath;
                        a.input_content = body.at("text").get<std::string>();
                        perform(a, res);
                    });

        server.Post(R"(/session/([^/]+)/execute/sync)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        std::lock_guard lock(mutex);
                        if (!check_session(req, res)) return;
                        auto body = Json::parse(req.body, nullptr, false);
                        auto script = body.is_discarded() ? std::string{} : body.value("script", "");
                        if (script.rfind(kRenderInfoMarker, 0) == 0) return reply(res, to_json(current_render_info()));
                        if (script.rfind(kReadyStateMarker, 0) == 0) return reply(res, "complete");
                        fail(res, "javascript error", "the mock only evaluates its own scripts");
                    });

        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) fail(res, "unknown command", "unsupported endpoint");
        });
    }
};

MockWebDriverServer::MockWebDriverServer() : impl_(std::make_unique<Impl>()) {
    impl_->server.set_tcp_nodelay(true);
    impl_->routes();
}

MockWebDriverServer::~MockWebDriverServer() { stop(); }

void MockWebDriverServer::add_static_page(const std::string& url, const std::string& html) {
    std::lock_guard lock(impl_->mutex);
    impl_->static_pages[url] = html;
}

void MockWebDriverServer::start() {
    if (thread_.joinable()) return;
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw Error("mock-server", "could not bind a port");
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockWebDriverServer::stop() {
    if (!thread_.joinable()) return;
    impl_->server.stop();
    thread_.join();
}

std::string MockWebDriverServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<std::string> MockWebDriverServer::transcript() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->transcript;
}

std::string MockWebDriverServer::transcript_text() const {
    std::string out;
    for (const auto& line : transcript()) out += line + "\n";
    return out;
}

void MockWebDriverServer::clear_transcript() {
    std::lock_guard lock(impl_->mutex);
    impl_->transcript.clear();
}

}  // namespace hxagent

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

#include "hxagent/review.hpp"

#include <algorithm>
#include <mutex>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hxagent/campaign.hpp"
#include "hxagent/error.hpp"
#include "hxagent/memory.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace fs = std::filesystem;

namespace {

using Reply = ReviewService::Reply;

Reply error_reply(int status, const std::string& code, const std::string& message) {
    return {status, {{"error", code}, {"message", message}}};
}

bool safe_id(const std::string& id) {
    if (id.empty() || id.size() > 200 || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (directories ? e.is_directory() : (e.is_regular_file() && e.path().extension() == ".json")) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Json episode_summary(const EpisodeTrace& t) {
    return {{"episode_id", t.episode_id},
            {"task_id", t.task_id},
            {"task", t.task},
            {"entry", t.entry},
            {"steps", t.pairs.size()},
            {"outcome", std::string(to_string(t.outcome))},
            {"verdict", t.verdict ? Json(std::string(to_string(*t.verdict))) : Json(nullptr)},
            {"status", t.verdict ? "judged" : "pending"},
            {"started_at", t.started_at},
            {"finished_at", t.finished_at}};
}

Json experience_summary(const ExperienceSnapshot& s) {
    Json exemplars = Json::array();
    auto first = s.correct_traces.size() > kDefaultMaxExemplars ? s.correct_traces.size() - kDefaultMaxExemplars : 0;
    for (auto i = first; i < s.correct_traces.size(); ++i) {
        const auto& t = s.correct_traces[i];
        exemplars.push_back({{"episode_id", t.episode_id}, {"task", t.task}, {"steps", t.pairs.size()}});
    }
    Json rules = Json::array();
    for (const auto& r : s.rules) {
        rules.push_back({{"text", r.text}, {"source_episode", r.source_episode}, {"created_at", r.created_at}});
    }
    return {{"task_id", s.task_id},
            {"episodes", s.outcome_history.size()},
            {"correct_count", s.correct_traces.size()},
            {"incorrect_count", s.incorrect_traces.size()},
            {"exemplar_count", exemplars.size()},
            {"exemplars", std::move(exemplars)},
            {"rule_count", s.rules.size()},
            {"rules", std::move(rules)},
            {"outcome_history", s.outcome_history}};
}

void send(httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json; charset=utf-8");
}

}  // namespace

struct ReviewService::Impl {
    OutputLayout layout;
    RuleProvider provider;
    std::size_t window;
    httplib::Server server;
    std::mutex verdict_mutex;

    std::optional<fs::path> find_trace(const std::string& id) const {
        if (!safe_id(id)) return std::nullopt;
        for (const auto& task_dir : sorted_entries(layout.root / "traces", true)) {
            auto path = task_dir / std::string(to_string(Phase::Training)) / (id + ".json");
            if (fs::exists(path)) return path;
        }
        return std::nullopt;
    }

    bool task_known(const std::string& task_id) const {
        return safe_id(task_id) &&
               (fs::exists(layout.experience() / task_id) || fs::exists(layout.root / "traces" / task_id));
    }
};

ReviewService::ReviewService(fs::path out_dir, RuleProvider provider, std::size_t window)
    : impl_(std::make_unique<Impl>()) {
    if (window == 0) throw Error("invalid-window", "moving-average window must be positive");
    impl_->layout = OutputLayout{std::move(out_dir)};
    impl_->provider = std::move(provider);
    impl_->window = window;

    auto& srv = impl_->server;
    srv.set_tcp_nodelay(true);
    srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        send(res, {200, {{"status", "ok"}}});
    });
    srv.Get("/api/episodes", [this](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> status;
        if (req.has_param("status")) status = req.get_param_value("status");
        send(res, list_episodes(status));
    });
    srv.Get(R"(/api/episodes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, get_episode(req.matches[1]));
    });
    srv.Post(R"(/api/episodes/([^/]+)/verdict)", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("verdict") || !body.at("verdict").is_string()) {
            return send(res, error_reply(400, "invalid-request", "body must be {\"verdict\": \"correct\"|\"incorrect\"}"));
        }
        VerdictSubmission sub;
        sub.episode_id = req.matches[1];
        try {
            sub.verdict = parse_verdict(body.at("verdict").get<std::string>());
        } catch (const Error& e) {
            return send(res, error_reply(400, "invalid-request", e.what()));
        }
        if (body.contains("note") && body.at("note").is_string()) sub.note = body.at("note").get<std::string>();
        if (body.contains("submitted_by") && body.at("submitted_by").is_string()) {
            sub.submitted_by = body.at("submitted_by").get<std::string>();
        }
        send(res, submit_verdict(sub));
    });
    srv.Get(R"(/api/experience/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, get_experience(req.matches[1]));
    });
    srv.Get(R"(/api/metrics/([^/]+)/moving-average)", [this](const httplib::Request& req, httplib::Response& res) {
        std::size_t window = impl_->window;
        if (req.has_param("window")) {
            try {
                window = std::stoul(req.get_param_value("window"));
            } catch (const std::exception&) {
                window = 0;
            }
            if (window == 0) return send(res, error_reply(400, "invalid-window", "window must be a positive integer"));
        }
        send(res, get_moving_average(req.matches[1], window));
    });
    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty() && req.path.rfind("/api/", 0) == 0) {
            send(res, error_reply(res.status, res.status == 404 ? "not-found" : "error", req.path));
        }
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        spdlog::error("review service: {}", what);
        send(res, error_reply(500, "internal-error", what));
    });
}

ReviewService::~ReviewService() { stop(); }

void ReviewService::mount_static(const fs::path& dir) {
    if (!impl_->server.set_mount_point("/", dir.string())) {
        throw Error("invalid-config", dir.string() + " is not a directory");
    }
}

void ReviewService::start(const std::string& host, int port) {
    if (thread_.joinable()) return;
    port_ = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw Error("bind-failure", host + ":" + std::to_string(port));
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ReviewService::listen(const std::string& host, int port) {
    if (!impl_->server.bind_to_port(host, port)) throw Error("bind-failure", host + ":" + std::to_string(port));
    port_ = port;
    impl_->server.listen_after_bind();
}

void ReviewService::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

Reply ReviewService::list_episodes(const std::optional<std::string>& status) const {
    if (status && *status != "pending" && *status != "judged") {
        return error_reply(400, "invalid-request", "status must be pending or judged");
    }
    Json list = Json::array();
    for (const auto& task_dir : sorted_entries(impl_->layout.root / "traces", true)) {
        for (const auto& file : sorted_entries(task_dir / std::string(to_string(Phase::Training)), false)) {
            auto trace = trace_from_json(Json::parse(util::read_file(file)));
            bool judged = trace.verdict.has_value();
            if (status && (*status == "judged") != judged) continue;
            list.push_back(episode_summary(trace));
        }
    }
    return {200, {{"episodes", std::move(list)}}};
}

Reply ReviewService::get_episode(const std::string& episode_id) const {
    auto path = impl_->find_trace(episode_id);
    if (!path) return error_reply(404, "not-found", "no episode " + episode_id);
    auto trace = trace_from_json(Json::parse(util::read_file(*path)));
    Json j = to_json(trace);
    j["status"] = trace.verdict ? "judged" : "pending";
    auto log = impl_->layout.prompt_file(trace.task_id, Phase::Training, trace.episode_id);
    j["prompt_log"] = fs::exists(log) ? Json(fs::relative(log, impl_->layout.root).generic_string()) : Json(nullptr);
    return {200, std::move(j)};
}

Reply ReviewService::submit_verdict(const VerdictSubmission& submission) {
    std::lock_guard lock(impl_->verdict_mutex);
    auto path = impl_->find_trace(submission.episode_id);
    if (!path) return error_reply(404, "not-found", "no episode " + submission.episode_id);
    auto trace = trace_from_json(Json::parse(util::read_file(*path)));
    if (trace.verdict) {
        return error_reply(409, "conflict",
                           submission.episode_id + " was already judged " + std::string(to_string(*trace.verdict)));
    }
    trace.verdict = submission.verdict;
    auto store = ExperienceStore::open(impl_->layout.experience(), trace.task_id);
    auto snapshot = store->commit(trace, impl_->provider);
    util::write_file_atomic(*path, to_json(trace).dump(2) + "\n");
    Json review = {{"episode_id", submission.episode_id},
                   {"verdict", std::string(to_string(submission.verdict))},
                   {"note", submission.note},
                   {"submitted_by", submission.submitted_by}};
    util::append_line(impl_->layout.reports() / "reviews.jsonl", review.dump());
    spdlog::info("{} judged {}", submission.episode_id, to_string(submission.verdict));
    return {200,
            {{"episode_id", submission.episode_id},
             {"verdict", std::string(to_string(submission.verdict))},
             {"snapshot", experience_summary(*snapshot)}}};
}

Reply ReviewService::get_experience(const std::string& task_id) const {
    if (!impl_->task_known(task_id)) return error_reply(404, "not-found", "no task " + task_id);
    auto store = ExperienceStore::open(impl_->layout.experience(), task_id);
    return {200, experience_summary(*store->current())};
}

Reply ReviewService::get_moving_average(const std::string& task_id, std::size_t window) const {
    if (!impl_->task_known(task_id)) return error_reply(404, "not-found", "no task " + task_id);
    auto store = ExperienceStore::open(impl_->layout.experience(), task_id);
    Json points = Json::array();
    for (const auto& p : moving_average(store->current()->outcome_history, window)) {
        points.push_back({{"episode", p.episode}, {"value", p.value}});
    }
    return {200, {{"task_id", task_id}, {"window", window}, {"points", std::move(points)}}};
}

}  // namespace hxagent

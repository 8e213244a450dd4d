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

// hxagent command line: campaigns, one-off runs, extraction, reports and the
// review service.
//
// Exit codes: 0 success, 1 campaign failure, 2 configuration error.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "hxagent/campaign.hpp"
#include "hxagent/error.hpp"
#include "hxagent/review.hpp"

namespace fs = std::filesystem;
using namespace hxagent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCampaign = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
    std::optional<fs::path> config;
    std::optional<std::string> backend;
    std::optional<std::string> llm;
    std::optional<fs::path> task_suite;
    std::optional<fs::path> out;
    bool verbose = false;
};

// Codes that mean the inputs were wrong rather than the run.
bool is_config_error(const std::string& code) {
    return code == "invalid-config" || code == "empty-suite" || code == "invalid-suite" ||
           code == "invalid-ground-truth" || code == "invalid-script" || code == "script-invalid" ||
           code == "llm-unconfigured" || code == "file-unreadable" || code == "snapshot-corrupt";
}

CampaignConfig resolve_config(const CommonOptions& o) {
    CampaignConfig c = o.config ? load_config(*o.config) : CampaignConfig{};
    if (o.backend) c.backend = parse_env_backend(*o.backend);
    if (o.llm) c.llm = parse_llm_kind(*o.llm);
    if (o.task_suite) c.task_suite = *o.task_suite;
    if (o.out) c.out_dir = *o.out;
    c.validate();
    return c;
}

ReviewService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hxagent: plan web action sequences from task descriptions"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--config", common.config, "campaign config file (JSON)");
    app.add_option("--backend", common.backend, "environment backend")->check(CLI::IsMember({"sim", "webdriver"}));
    app.add_option("--llm", common.llm, "language model backend")->check(CLI::IsMember({"scripted", "remote"}));
    app.add_option("--task-suite", common.task_suite, "task suite file (builtin suite when omitted)");
    app.add_option("--out", common.out, "output directory");
    app.add_flag("-v,--verbose", common.verbose, "debug logging");

    auto* train = app.add_subcommand("train", "run the training phase");

    auto* eval = app.add_subcommand("eval", "evaluate with frozen experience and write the report");
    std::optional<fs::path> eval_experience;
    eval->add_option("--experience", eval_experience, "snapshot file to freeze instead of the optimal one");

    auto* run = app.add_subcommand("run", "plan one task");
    std::string run_task, run_entry;
    std::optional<fs::path> run_experience;
    run->add_option("--task", run_task, "task text")->required();
    run->add_option("--entry", run_entry, "entry url or sim entry")->required();
    run->add_option("--experience", run_experience, "snapshot file to use as frozen experience");

    auto* extract = app.add_subcommand("extract", "print the feasible actions and state of a page");
    std::string extract_source;
    extract->add_option("source", extract_source, "HTML file, sim entry or url")->required();

    auto* report = app.add_subcommand("report", "rebuild the evaluation report from an output directory");
    bool report_json = false;
    report->add_flag("--json", report_json, "print the full JSON report");

    auto* serve = app.add_subcommand("serve", "serve the review API over an output directory");
    int port = 8080;
    std::string host = "127.0.0.1";
    std::optional<fs::path> static_dir;
    serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "listen address");
    serve->add_option("--static", static_dir, "directory served at / (review console build)");

    auto* suite = app.add_subcommand("suite", "write the builtin suite, ground truth, policy and config");
    fs::path suite_dir = "hxagent-builtin";
    std::size_t suite_training = 20, suite_eval = 25;
    suite->add_option("dir", suite_dir, "target directory");
    suite->add_option("--training", suite_training, "training instances per task")->check(CLI::PositiveNumber);
    suite->add_option("--eval", suite_eval, "evaluation instances per task")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    spdlog::set_level(common.verbose ? spdlog::level::debug : spdlog::level::info);

    CampaignConfig config;
    try {
        if (!suite->parsed()) config = resolve_config(common);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    }

    try {
        if (train->parsed()) {
            Campaign campaign(config);
            auto summary = campaign.train();
            print_json(summary.to_json());
            return kExitOk;
        }
        if (eval->parsed()) {
            if (eval_experience) config.experience_snapshot = *eval_experience;
            Campaign campaign(config);
            auto result = campaign.evaluate();
            std::cout << result.report.summary();
            if (result.unscored > 0) std::cout << "unscored           " << result.unscored << "\n";
            return kExitOk;
        }
        if (run->parsed()) {
            Campaign campaign(config);
            std::optional<ExperienceSnapshot> experience;
            if (run_experience) experience = load_snapshot(*run_experience);
            auto trace = campaign.run_single(run_task, run_entry, experience);
            print_json(to_json(trace));
            return trace.outcome == Outcome::Done ? kExitOk : kExitCampaign;
        }
        if (extract->parsed()) {
            std::optional<WebDriverConfig> wd;
            if (config.backend == EnvBackend::WebDriver) wd = config.webdriver;
            print_json(extract_page(extract_source, wd));
            return kExitOk;
        }
        if (report->parsed()) {
            auto r = rebuild_report(config);
            if (report_json) {
                print_json(r.to_json());
            } else {
                std::cout << r.summary();
            }
            return kExitOk;
        }
        if (serve->parsed()) {
            Campaign campaign(config);
            ReviewService service(config.out_dir, campaign.rule_provider(), config.average_window);
            if (static_dir) service.mount_static(*static_dir);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            spdlog::info("review service on http://{}:{} over {}", host, port, config.out_dir.string());
            service.listen(host, port);
            g_service = nullptr;
            return kExitOk;
        }
        if (suite->parsed()) {
            write_builtin_bundle(suite_dir, suite_training, suite_eval);
            std::cout << suite_dir.string() << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return is_config_error(e.code()) ? kExitConfig : kExitCampaign;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitCampaign;
    }
    return kExitOk;
}

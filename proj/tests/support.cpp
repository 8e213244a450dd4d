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

#include <gtest/gtest.h>

#include "support.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hxagent/util.hpp"

namespace hxagent::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("hxagent-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

fs::path fixture_path(const std::string& name) { return fs::path(HXAGENT_TEST_DATA_DIR) / "fixtures" / name; }
fs::path golden_path(const std::string& name) { return fs::path(HXAGENT_TEST_DATA_DIR) / "golden" / name; }
std::string read_fixture(const std::string& name) { return util::read_file(fixture_path(name)); }

::testing::AssertionResult matches_golden(const std::string& name, const std::string& actual) {
    auto path = golden_path(name);
    const char* update = std::getenv("HXAGENT_UPDATE_GOLDEN");
    if (update && std::string(update) == "1") {
        util::write_file_atomic(path, actual);
        return ::testing::AssertionSuccess() << "rewrote " << path;
    }
    if (!fs::exists(path)) return ::testing::AssertionFailure() << "missing golden file " << path;
    auto expected = util::read_file(path);
    if (expected == actual) return ::testing::AssertionSuccess();
    std::size_t at = 0;
    while (at < expected.size() && at < actual.size() && expected[at] == actual[at]) ++at;
    return ::testing::AssertionFailure() << name << " differs at byte " << at << "\n--- expected\n"
                                         << expected << "\n--- actual\n"
                                         << actual;
}

std::vector<PlanStep> oracle_plan(const sim::Site& site) {
    std::vector<PlanStep> plan;
    for (const auto& a : sim::oracle_shortest_sequence(site)) {
        plan.push_back({a.operation, a.target.xpath, a.input_content});
    }
    return plan;
}

ScriptEntry plan_entry(const std::string& task, std::vector<PlanStep> plan) {
    ScriptEntry e;
    e.contains = {"You are asked to complete the following task: " + task + "\n"};
    e.plan = std::move(plan);
    return e;
}

std::unique_ptr<LlmGateway> scripted_gateway(std::vector<ScriptEntry> entries) {
    auto backend = std::make_shared<ScriptedBackend>(std::move(entries));
    return std::make_unique<LlmGateway>(backend, RetryPolicy{1, std::chrono::milliseconds(0)});
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

FeasibleAction click(const std::string& xpath, const std::string& text, const std::string& tag) {
    FeasibleAction a;
    a.operation = Operation::Click;
    a.target.tag_name = tag;
    a.target.xpath = xpath;
    a.target.text = text;
    return a;
}

FeasibleAction input(const std::string& xpath, const std::string& content, const std::string& tag) {
    FeasibleAction a;
    a.operation = Operation::Input;
    a.target.tag_name = tag;
    a.target.xpath = xpath;
    a.input_content = content;
    return a;
}

}  // namespace hxagent::testing

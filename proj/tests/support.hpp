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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hxagent/llm.hpp"
#include "hxagent/planner.hpp"
#include "hxagent/scripted_backend.hpp"
#include "hxagent/sim.hpp"

namespace hxagent::testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::filesystem::path fixture_path(const std::string& name);
std::filesystem::path golden_path(const std::string& name);
std::string read_fixture(const std::string& name);

// Compares `actual` with the golden file. With HXAGENT_UPDATE_GOLDEN=1 in the
// environment the file is rewritten instead and the check passes.
::testing::AssertionResult matches_golden(const std::string& name, const std::string& actual);

// Plan steps of the oracle sequence of `site`.
std::vector<PlanStep> oracle_plan(const sim::Site& site);

// Plan-following entry keyed on the task line of the prompt.
ScriptEntry plan_entry(const std::string& task, std::vector<PlanStep> plan);

// Gateway over a strict scripted backend with the given entries.
std::unique_ptr<LlmGateway> scripted_gateway(std::vector<ScriptEntry> entries);

// Fixed clock for traces.
std::string fixed_clock();

FeasibleAction click(const std::string& xpath, const std::string& text = {}, const std::string& tag = "a");
FeasibleAction input(const std::string& xpath, const std::string& content, const std::string& tag = "input");

}  // namespace hxagent::testing

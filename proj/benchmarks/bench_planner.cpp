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

#include <benchmark/benchmark.h>

#include "hxagent/metrics.hpp"
#include "hxagent/planner.hpp"
#include "hxagent/scripted_backend.hpp"
#include "hxagent/sim.hpp"
#include "hxagent/suite.hpp"

namespace {

using namespace hxagent;

// One full episode against the simulator with a plan-following scripted model.
void BM_RunEpisode(benchmark::State& state) {
    auto site = sim::make_builtin_site("login-form", 0, static_cast<std::size_t>(state.range(0)));
    ScriptEntry entry;
    entry.plan.emplace();
    for (const auto& a : sim::oracle_shortest_sequence(site)) {
        entry.plan->push_back({a.operation, a.target.xpath, a.input_content});
    }
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptEntry>{entry});
    for (auto _ : state) {
        LlmGateway gateway(backend);
        PromptLog log;
        PlannerServices services;
        services.llm = &gateway;
        services.prompt_log = &log;
        services.clock = [] { return std::string("t"); };
        sim::SimEnvironment env(site);
        auto trace = run_episode(site.task, "sim:login-form/0", env, services, PlannerConfig{}, {"bench", "login-form"});
        if (trace.outcome != Outcome::Done) state.SkipWithError("episode did not finish");
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(BM_RunEpisode)->Arg(0)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_MainPrompt(benchmark::State& state) {
    auto site = sim::make_builtin_site("search-engine", 0, static_cast<std::size_t>(state.range(0)));
    sim::Machine machine(site);
    auto page = machine.render(machine.initial());
    auto actions = extract_feasible_actions(page.document, page.render_info).actions;
    auto web_state = extract_state(page.document, page.render_info, std::string("screenshot"),
                                   [](const std::string&) { return std::string("A results page."); });
    for (auto _ : state) {
        auto prompt = build_main_prompt(web_state.body, actions, "", "");
        benchmark::DoNotOptimize(prompt);
    }
}
BENCHMARK(BM_MainPrompt)->Arg(0)->Arg(500);

void BM_BuildReport(benchmark::State& state) {
    auto site = sim::make_builtin_site("form-wizard", 0);
    auto plan = sim::oracle_shortest_sequence(site);
    std::vector<ReferenceAction> truth;
    for (const auto& a : plan) truth.push_back(reference_from(a));
    std::vector<InstanceResult> results;
    for (int i = 0; i < state.range(0); ++i) {
        auto predicted = plan;
        predicted.resize(plan.size() - static_cast<std::size_t>(i) % plan.size());
        results.push_back({"form-wizard", std::to_string(i), "e", Outcome::Done, predicted, truth});
    }
    TokenLedger ledger;
    for (auto _ : state) {
        auto report = build_report(results, ledger);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_BuildReport)->Arg(25)->Arg(1000);

}  // namespace

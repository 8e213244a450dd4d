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

#include "hxagent/extractor.hpp"
#include "hxagent/sim.hpp"
#include "hxagent/suite.hpp"

namespace {

using namespace hxagent;

sim::RenderedPage login_page(std::size_t filler) {
    sim::Machine machine(sim::make_builtin_site("login-form", 0, filler));
    return machine.render(machine.initial());
}

// Feasible-action extraction as the page grows.
void BM_ExtractFeasibleActions(benchmark::State& state) {
    auto page = login_page(static_cast<std::size_t>(state.range(0)));
    std::size_t n = 0;
    for (auto _ : state) {
        auto extraction = extract_feasible_actions(page.document, page.render_info);
        n = extraction.actions.size();
        benchmark::DoNotOptimize(extraction);
    }
    state.counters["actions"] = static_cast<double>(n);
}
BENCHMARK(BM_ExtractFeasibleActions)->Arg(0)->Arg(50)->Arg(100)->Arg(250)->Arg(500);

void BM_ExtractState(benchmark::State& state) {
    auto page = login_page(static_cast<std::size_t>(state.range(0)));
    // Large pages take the summary path; the summarizer is a constant.
    Summarizer summarizer = [](const std::string&) { return std::string("A login form."); };
    for (auto _ : state) {
        auto s = extract_state(page.document, page.render_info, std::string("screenshot"), summarizer);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ExtractState)->Arg(0)->Arg(100)->Arg(500);

void BM_DetectDuplicates(benchmark::State& state) {
    auto page = login_page(static_cast<std::size_t>(state.range(0)));
    auto actions = extract_feasible_actions(page.document, page.render_info).actions;
    for (auto _ : state) {
        auto groups = detect_duplicates(actions);
        benchmark::DoNotOptimize(groups);
    }
}
BENCHMARK(BM_DetectDuplicates)->Arg(0)->Arg(100)->Arg(500);

void BM_ParseHtml(benchmark::State& state) {
    sim::Machine machine(sim::make_builtin_site("login-form", 0, static_cast<std::size_t>(state.range(0))));
    auto html = sim::export_static_html(machine, machine.initial());
    for (auto _ : state) {
        auto doc = dom::parse_html(html);
        benchmark::DoNotOptimize(doc);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_ParseHtml)->Arg(0)->Arg(500);

}  // namespace

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

#include <fstream>
#include <functional>

#include "hxagent/error.hpp"
#include "hxagent/sim.hpp"
#include "hxagent/suite.hpp"
#include "support.hpp"

namespace {

using namespace hxagent;
using namespace hxagent::sim;

template <typename F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::vector<FeasibleAction> actions_of(const PageObservation& o) {
    return extract_feasible_actions(o.document, o.render_info).actions;
}

std::string dump(const std::vector<FeasibleAction>& actions) {
    Json j = Json::array();
    for (const auto& a : actions) j.push_back(to_json(a));
    return j.dump(1);
}

// Does any action sequence of length `depth` or less reach the goal?
bool reachable_within(const Machine& m, const State& s, std::size_t depth) {
    if (m.goal_reached(s)) return true;
    if (depth == 0) return false;
    for (const auto& a : m.moves(s)) {
        auto next = m.apply(s, a);
        if (auto* st = std::get_if<State>(&next); st && reachable_within(m, *st, depth - 1)) return true;
    }
    return false;
}

const FeasibleAction* find_text(const std::vector<FeasibleAction>& actions, const std::string& text) {
    for (const auto& a : actions) {
        if (a.target.text == text) return &a;
    }
    return nullptr;
}

std::vector<std::string> builtin_entries() {
    std::vector<std::string> out;
    for (auto family : kBuiltinFamilies) {
        for (int i : {0, 1, 2, 7, kTrainingInstanceBase + 3}) {
            out.push_back("sim:" + std::string(family) + "/" + std::to_string(i));
        }
    }
    return out;
}

// Start page with a button, a disabled button and a link to a second page.
Site tiny_site() {
    Site s;
    s.name = "tiny";
    s.task = "Open the second page.";
    Element go;
    go.tag = "button";
    go.key = "go";
    go.text = "Go";
    Element off = go;
    off.key = "off";
    off.text = "Off";
    off.disabled = true;
    s.pages = {{"one", "One", {go, off}}, {"two", "Two", {}}};
    s.start_page = "one";
    s.transitions.push_back({"one", "go", Operation::Click, {}, {}, "two"});
    s.transitions.push_back({"one", "off", Operation::Click, {}, {}, "two"});
    s.goal = {"two", {}};
    return s;
}

TEST(Load, LoginFormLayout) {
    SimEnvironment env;
    auto o = env.load("sim:login-form/0");
    EXPECT_EQ(o.title, "Login");
    auto actions = actions_of(o);
    std::size_t inputs = 0, buttons = 0;
    for (const auto& a : actions) {
        if (a.operation == Operation::Input && a.target.tag_name == "input") ++inputs;
        if (a.operation == Operation::Click && a.target.tag_name == "button" && a.target.text == "Login") ++buttons;
    }
    EXPECT_EQ(inputs, 2u);
    EXPECT_EQ(buttons, 1u);
    EXPECT_EQ(actions.size(), 3u);
    EXPECT_FALSE(env.goal_reached());
}

TEST(Load, UnknownEntries) {
    SimEnvironment env;
    EXPECT_EQ(error_code([&] { env.load("sim:no-such-family"); }), "load-failure");
    EXPECT_EQ(error_code([&] { env.load("sim:login-form/x"); }), "load-failure");
    EXPECT_EQ(error_code([&] { env.load("sim:login-form/1?zoom=2"); }), "load-failure");
    EXPECT_EQ(error_code([&] { env.load("/definitely/not/here.json"); }), "load-failure");
}

TEST(Load, FillerScalesTheActionSpace) {
    SimEnvironment env;
    auto actions = actions_of(env.load("sim:login-form/0?filler=500"));
    EXPECT_GE(actions.size(), 500u);
}

TEST(Execute, PaginationShowsNextThreeResults) {
    SimEnvironment env;
    auto page = actions_of(env.load("sim:search-8th-result"));
    auto* box = &page[0];
    ASSERT_EQ(box->operation, Operation::Input);
    auto typed = *box;
    typed.input_content = "Macie";
    ASSERT_TRUE(env.execute(typed).ok());
    auto r = env.execute(*find_text(actions_of(env.observe()), "Search"));
    ASSERT_TRUE(r.ok());
    auto first = actions_of(*r.observation);
    EXPECT_TRUE(find_text(first, "Leonie"));
    EXPECT_FALSE(find_text(first, "Jess"));
    r = env.execute(*find_text(first, "\xE2\x89\xA5"));
    ASSERT_TRUE(r.ok());
    auto second = actions_of(*r.observation);
    for (const char* name : {"Macie", "Jess", "Marcella"}) EXPECT_TRUE(find_text(second, name)) << name;
    EXPECT_FALSE(find_text(second, "Leonie"));
}

TEST(Execute, StaleXpathAfterNavigation) {
    SimEnvironment env;
    env.load("sim:login-form/0");
    auto plan = sim::oracle_shortest_sequence(env.machine().site());
    for (const auto& a : plan) ASSERT_TRUE(env.execute(a).ok());
    EXPECT_TRUE(env.goal_reached());
    auto r = env.execute(plan.back());
    EXPECT_EQ(r.status, ExecStatus::ElementNotFound);
    EXPECT_FALSE(r.observation);
}

TEST(Execute, DisabledAndMalformed) {
    SimEnvironment env(tiny_site());
    auto actions = actions_of(env.load("tiny"));
    // Disabled controls are not offered, so address it directly.
    EXPECT_FALSE(find_text(actions, "Off"));
    auto off = hxagent::testing::click("html/body/button[2]", "Off", "button");
    auto before = env.state();
    auto r = env.execute(off);
    EXPECT_EQ(r.status, ExecStatus::NotInteractable);
    EXPECT_EQ(env.state(), before);

    FeasibleAction done;
    done.operation = Operation::Done;
    EXPECT_EQ(error_code([&] { env.execute(done); }), "not-executable");
    auto typed = *find_text(actions, "Go");
    typed.operation = Operation::Input;
    EXPECT_EQ(error_code([&] { env.execute(typed); }), "not-executable");

    r = env.execute(*find_text(actions, "Go"));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.observation->title, "Two");
    EXPECT_TRUE(env.goal_reached());
}

TEST(Oracle, KnownLengths) {
    EXPECT_EQ(oracle_shortest_sequence(resolve_entry("sim:login-form/0")).size(), 3u);
    auto search = oracle_shortest_sequence(resolve_entry("sim:search-8th-result"));
    ASSERT_EQ(search.size(), 5u);
    EXPECT_EQ(search[0].operation, Operation::Input);
    EXPECT_EQ(search[0].input_content, "Macie");
    EXPECT_EQ(search[1].target.text, "Search");
    EXPECT_EQ(search[2].target.text, "\xE2\x89\xA5");
    EXPECT_EQ(search[3].target.text, "\xE2\x89\xA5");
    EXPECT_EQ(search[4].target.text, "Macie");
}

TEST(Oracle, NothingShorterReachesTheGoal) {
    for (const auto& entry : builtin_entries()) {
        Machine m(resolve_entry(entry));
        auto plan = oracle_shortest_sequence(m.site());
        if (plan.size() > 6) continue;
        ASSERT_FALSE(plan.empty()) << entry;
        EXPECT_FALSE(reachable_within(m, m.initial(), plan.size() - 1)) << entry;
    }
}

TEST(Oracle, ReplayReachesTheGoal) {
    for (const auto& entry : builtin_entries()) {
        SimEnvironment env;
        env.load(entry);
        auto plan = oracle_shortest_sequence(env.machine().site());
        for (const auto& a : plan) {
            auto r = env.execute(a);
            ASSERT_TRUE(r.ok()) << entry << " " << compact(a);
            ASSERT_TRUE(r.observation);
        }
        EXPECT_TRUE(env.goal_reached()) << entry;
    }
}

TEST(Oracle, GoalAtStartAndUnreachable) {
    auto s = tiny_site();
    s.goal = {"one", {}};
    EXPECT_TRUE(oracle_shortest_sequence(s).empty());
    s.goal = {"two", {{"never", "1"}}};
    EXPECT_EQ(error_code([&] { oracle_shortest_sequence(s); }), "goal-unreachable");
}

TEST(Determinism, SameActionsSameObservations) {
    for (const auto& entry : builtin_entries()) {
        SimEnvironment a, b;
        a.load(entry);
        b.load(entry);
        for (const auto& step : oracle_shortest_sequence(a.machine().site())) {
            auto ra = a.execute(step);
            auto rb = b.execute(step);
            ASSERT_EQ(dom::serialize(ra.observation->document), dom::serialize(rb.observation->document));
            ASSERT_EQ(to_json(ra.observation->render_info), to_json(rb.observation->render_info));
            ASSERT_EQ(ra.observation->screenshot, rb.observation->screenshot);
        }
    }
}

TEST(StaticExport, SameActionsAsLiveSim) {
    for (const auto& entry : builtin_entries()) {
        Machine m(resolve_entry(entry));
        auto state = m.initial();
        auto plan = oracle_shortest_sequence(m.site());
        for (std::size_t k = 0;; ++k) {
            auto live = m.render(state);
            auto doc = dom::parse_html(export_static_html(m, state));
            auto exported = extract_feasible_actions(doc, infer_render_info(doc)).actions;
            ASSERT_EQ(dump(extract_feasible_actions(live.document, live.render_info).actions), dump(exported))
                << entry << " step " << k;
            if (k == plan.size()) break;
            state = std::get<State>(m.apply(state, plan[k]));
        }
    }
    auto pages = export_static_html(resolve_entry("sim:form-wizard/0"));
    EXPECT_GE(pages.size(), 2u);
}

TEST(SiteJson, RoundTripAndValidation) {
    for (const auto& entry : builtin_entries()) {
        auto site = resolve_entry(entry);
        EXPECT_EQ(site_from_json(to_json(site)), site) << entry;
    }
    auto s = tiny_site();
    s.start_page = "missing";
    EXPECT_EQ(error_code([&] { validate(s); }), "invalid-site");
    s = tiny_site();
    s.transitions[0].go_to = "nowhere";
    EXPECT_EQ(error_code([&] { validate(s); }), "invalid-site");
}

TEST(SiteJson, FileEntry) {
    hxagent::testing::TempDir dir("site");
    auto path = dir / "tiny.json";
    std::ofstream(path) << to_json(tiny_site()).dump(2);
    SimEnvironment env;
    EXPECT_EQ(env.load(path.string()).title, "One");
    std::ofstream(dir / "bad.json") << "{\"name\": 3}";
    EXPECT_EQ(error_code([&] { env.load((dir / "bad.json").string()); }), "load-failure");
}

}  // namespace

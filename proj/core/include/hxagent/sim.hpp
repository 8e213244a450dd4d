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

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hxagent/environment.hpp"
#include "hxagent/json.hpp"

namespace hxagent::sim {

// Variable name -> required value; all entries must hold. A value written
// "!x" requires the variable to differ from x. Unset variables read as "".
using Conditions = std::map<std::string, std::string>;
using Vars = std::map<std::string, std::string>;

// A node of a simulated page. Text and attribute values may reference
// variables as {{name}}.
struct Element {
    std::string tag = "div";
    // Stable handle used by transitions; not rendered.
    std::string key;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;
    std::vector<Element> children;
    Conditions visible_if;
    // Variable written by input/select/checkbox interaction.
    std::string bind;
    // <select> options.
    std::vector<std::string> options;
    bool handler = false;
    bool disabled = false;

    bool operator==(const Element&) const = default;
};

struct Page {
    std::string name;
    std::string title;
    std::vector<Element> body;

    bool operator==(const Page&) const = default;
};

// Fires when `operation` is performed on `element` (a key) of `page` while
// `when` holds (input and select write their variable first).
struct Transition {
    std::string page;
    std::string element;
    Operation operation = Operation::Click;
    Conditions when;
    Vars set;
    std::string go_to;

    bool operator==(const Transition&) const = default;
};

struct Goal {
    std::string page;  // empty = any page
    Conditions vars;

    bool operator==(const Goal&) const = default;
};

struct Site {
    std::string name;
    std::string task;
    Vars initial_vars;
    std::vector<Page> pages;
    std::string start_page;
    std::vector<Transition> transitions;
    Goal goal;

    bool operator==(const Site&) const = default;
};

struct State {
    std::string page;
    Vars vars;

    bool operator==(const State&) const = default;
    auto operator<=>(const State&) const = default;
};

// Throws Error("invalid-site") describing the first problem found.
void validate(const Site& site);

Json to_json(const Site& site);
// Throws Error("invalid-site").
Site site_from_json(const Json& j);
Site load_site(const std::filesystem::path& path);

struct RenderedPage {
    dom::Document document;
    RenderInfo render_info;
    std::string title;
};

// Compiled, immutable form of a site: rendering and the transition function.
class Machine {
public:
    explicit Machine(Site site);
    Machine(const Machine&) = delete;
    Machine& operator=(const Machine&) = delete;

    const Site& site() const noexcept { return site_; }
    State initial() const;
    bool goal_reached(const State& state) const;

    RenderedPage render(const State& state) const;
    // Plain-text rendering of the visible content, the simulator's stand-in
    // for a screenshot.
    std::string snapshot_text(const State& state) const;

    // Next state, or the reason the action could not be performed.
    std::variant<State, ExecStatus> apply(const State& state, const FeasibleAction& action) const;

    // Values worth typing into the field bound to `var`: every constant the
    // transitions or the goal compare it with.
    std::vector<std::string> vocabulary(const std::string& var) const;

    // Executable actions in `state`, in document order; input and select
    // actions are expanded over their vocabulary / options.
    std::vector<FeasibleAction> moves(const State& state) const;

private:
    // An element plus everything on its ancestor chain that decides whether
    // it can be interacted with.
    struct Slot {
        const Element* element = nullptr;
        std::vector<const Conditions*> guards;
        bool disabled = false;
    };
    const Page& page(const std::string& name) const;
    const Slot* slot_at(const std::string& page, const std::string& xpath) const;

    Site site_;
    std::map<std::string, std::size_t> page_index_;
    std::map<std::string, std::map<std::string, Slot>> slots_;
    std::map<std::string, std::map<std::string, std::string>> key_xpath_;
};

// In-process deterministic backend.
class SimEnvironment : public Environment {
public:
    SimEnvironment() = default;
    explicit SimEnvironment(Site site);

    // Accepts "sim:<family>/<instance>", a builtin alias, or a path to a site
    // JSON file. An environment constructed from a Site always reloads that
    // site and only records `entry` as its URL.
    PageObservation load(const std::string& entry) override;
    ExecutionResult execute(const FeasibleAction& action) override;
    PageObservation observe() override;

    bool goal_reached() const;
    const State& state() const;
    const Machine& machine() const;

private:
    std::shared_ptr<const Machine> machine_;
    std::optional<State> state_;
    std::string entry_;
    bool fixed_ = false;
};

// Resolves an entry to a site. Throws Error("load-failure").
Site resolve_entry(const std::string& entry);

// Minimum-length goal-reaching action sequence by breadth-first search over
// (page, variables); ties broken by document order. Throws
// Error("goal-unreachable").
std::vector<FeasibleAction> oracle_shortest_sequence(const Site& site, std::size_t max_states = 200'000);

// Every page of the site in its initial variable state as static HTML,
// keyed by page name. Visibility is carried by inline display:none and
// handlers by onclick attributes, so infer_render_info recovers the facts.
std::map<std::string, std::string> export_static_html(const Site& site);
std::string export_static_html(const Machine& machine, const State& state);

}  // namespace hxagent::sim

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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hxagent/json.hpp"

#include "hxagent/dom.hpp"

namespace hxagent {

enum class Operation { Click, Input, Select, Done };

std::string_view to_string(Operation op);
// Case-insensitive; throws Error("unknown-operation").
Operation parse_operation(std::string_view text);

struct ElementDescriptor {
    std::string tag_name;
    std::map<std::string, std::string> attributes;
    std::string xpath;
    std::string text;

    bool operator==(const ElementDescriptor&) const = default;
};

struct FeasibleAction {
    Operation operation = Operation::Click;
    ElementDescriptor target;
    std::string context;
    std::optional<std::string> input_content;

    bool is_done() const noexcept { return operation == Operation::Done; }
    static FeasibleAction done();

    bool operator==(const FeasibleAction&) const = default;
};

// Per-element facts that only a renderer knows, keyed by xpath.
struct RenderFacts {
    bool visible = false;
    bool interactable = false;
    bool has_handler = false;

    bool operator==(const RenderFacts&) const = default;
};
using RenderInfo = std::map<std::string, RenderFacts>;

enum class StateKind { SimplifiedMarkup, Summary };
std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view text);

struct WebState {
    StateKind kind = StateKind::SimplifiedMarkup;
    std::string body;
    std::size_t source_size = 0;
    std::optional<std::string> screenshot_ref;

    bool operator==(const WebState&) const = default;
};

struct Extraction {
    std::vector<FeasibleAction> actions;
    std::vector<std::string> warnings;
};

// One action per visible, interactable candidate element, in document order.
// Candidates are the natively interactive tags plus any element render_info
// reports a user-event handler for. Options inside a <select> are folded into
// the select's single action. Elements without render facts are skipped and
// reported in `warnings`.
Extraction extract_feasible_actions(const dom::Document& doc, const RenderInfo& render_info);

// Builds the descriptor for an element (retained attributes, xpath, text).
ElementDescriptor describe_element(const dom::Node& node);

std::string bind_context(const dom::Node& node, const dom::Document& doc);

inline constexpr std::size_t kDefaultStateBudget = 20'000;
inline constexpr int kContextAncestorDepth = 5;

using Summarizer = std::function<std::string(const std::string& screenshot)>;

// Small documents become interactable-only markup; documents whose serialized
// size exceeds `budget` characters are summarized from the screenshot.
// Throws Error("state-budget-exceeded") when a summary is needed but no
// screenshot or summarizer was supplied.
WebState extract_state(const dom::Document& doc, const RenderInfo& render_info,
                       const std::optional<std::string>& screenshot, const Summarizer& summarizer,
                       std::size_t budget = kDefaultStateBudget);

// Markup form of the state for a list of already extracted actions.
std::string render_simplified_markup(const dom::Document& doc, const std::vector<FeasibleAction>& actions);

// (operation, tag, normalized text, id, class); xpath deliberately excluded.
std::string fingerprint(const FeasibleAction& action);

// Index groups (size >= 2) of actions sharing a fingerprint, ordered by
// their first member.
std::vector<std::vector<std::size_t>> detect_duplicates(const std::vector<FeasibleAction>& actions);

// Heuristic render facts for static markup, for pages that never went through
// a browser: inline display:none / visibility:hidden, the hidden attribute,
// type=hidden and disabled are honoured, on* attributes count as handlers.
RenderInfo infer_render_info(const dom::Document& doc);

// JSON forms. The action object follows the shape
// {"operation", "target object": {"attributes", "tagName", "xpath", "text"}}
// with "context" / "input_content" appended only when they carry information.
Json to_json(const FeasibleAction& action);
FeasibleAction action_from_json(const Json& j);
Json to_json(const WebState& state);
WebState state_from_json(const Json& j);
Json to_json(const RenderInfo& info);
RenderInfo render_info_from_json(const Json& j);

// Compact one-line JSON of an action, used inside prompts.
std::string compact(const FeasibleAction& action);

}  // namespace hxagent

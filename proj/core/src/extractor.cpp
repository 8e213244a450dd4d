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

#include "hxagent/extractor.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace {

constexpr std::array<std::string_view, 6> kInteractiveTags = {"a", "button", "input", "select", "textarea", "option"};
constexpr std::array<std::string_view, 7> kRetainedAttributes = {"id", "class", "name", "type", "href", "placeholder",
                                                                 "aria-label"};
constexpr std::array<std::string_view, 8> kClickInputTypes = {"checkbox", "radio", "submit", "button",
                                                              "reset",    "image", "file",  "color"};

template <std::size_t N>
bool one_of(std::string_view needle, const std::array<std::string_view, N>& set) {
    return std::find(set.begin(), set.end(), needle) != set.end();
}

bool is_form_field(const dom::Node& node) {
    const auto& t = node.tag();
    return t == "input" || t == "textarea" || t == "select";
}

bool inside_select(const dom::Node& node) { return node.closest_ancestor("select") != nullptr; }

std::optional<Operation> operation_for(const dom::Node& node, bool has_handler) {
    const auto& tag = node.tag();
    if (tag == "a" || tag == "button") return Operation::Click;
    if (tag == "option") return inside_select(node) ? std::nullopt : std::optional(Operation::Click);
    if (tag == "select") return Operation::Select;
    if (tag == "textarea") return Operation::Input;
    if (tag == "input") {
        auto type = util::to_lower(node.attribute_or("type", "text"));
        if (type == "hidden") return std::nullopt;
        return one_of(type, kClickInputTypes) ? Operation::Click : Operation::Input;
    }
    if (has_handler) return Operation::Click;
    return std::nullopt;
}

const dom::Node* selected_option(const dom::Node& select) {
    const dom::Node* first = nullptr;
    std::function<const dom::Node*(const dom::Node&)> walk = [&](const dom::Node& n) -> const dom::Node* {
        for (const auto* c : n.element_children()) {
            if (c->tag() == "option") {
                if (!first) first = c;
                if (c->has_attribute("selected")) return c;
            }
            if (const auto* hit = walk(*c)) return hit;
        }
        return nullptr;
    };
    const auto* hit = walk(select);
    return hit ? hit : first;
}

std::vector<std::string> option_texts(const dom::Node& select) {
    std::vector<std::string> out;
    std::function<void(const dom::Node&)> walk = [&](const dom::Node& n) {
        for (const auto* c : n.element_children()) {
            if (c->tag() == "option") out.push_back(dom::inner_text(*c));
            walk(*c);
        }
    };
    walk(select);
    return out;
}

std::string element_text(const dom::Node& node) {
    const auto& tag = node.tag();
    if (tag == "select") {
        const auto* opt = selected_option(node);
        return opt ? dom::inner_text(*opt) : std::string{};
    }
    if (tag == "input") {
        auto type = util::to_lower(node.attribute_or("type", "text"));
        if (type == "submit" || type == "button" || type == "reset") {
            return dom::normalize_whitespace(node.attribute_or("value"));
        }
        return {};
    }
    if (tag == "textarea") return {};
    return dom::inner_text(node);
}

// Text of a label-like element, ignoring the text of form fields nested in it.
std::string label_text(const dom::Node& label) {
    std::string raw;
    std::function<void(const dom::Node&)> walk = [&](const dom::Node& n) {
        for (const auto& c : n.children()) {
            if (c->is_text()) {
                raw += c->data();
                raw += ' ';
            } else if (c->is_element() && !is_form_field(*c) && c->tag() != "script" && c->tag() != "style") {
                walk(*c);
            }
        }
    };
    walk(label);
    return dom::normalize_whitespace(raw);
}

bool contains_node(const dom::Node& ancestor, const dom::Node& node) {
    for (const dom::Node* p = &node; p; p = p->parent()) {
        if (p == &ancestor) return true;
    }
    return false;
}

bool has_form_field(const dom::Node& node) {
    for (const auto* c : node.element_children()) {
        if (is_form_field(*c) || has_form_field(*c)) return true;
    }
    return false;
}

bool is_heading_or_label(const dom::Node& n) {
    const auto& t = n.tag();
    return t == "legend" || t == "label" || t == "caption" ||
           (t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6');
}

std::string ancestor_context(const dom::Node& node) {
    const dom::Node* current = &node;
    for (int depth = 0; depth < kContextAncestorDepth; ++depth) {
        const dom::Node* parent = current->parent();
        if (!parent || !parent->is_element()) break;
        for (const auto* sibling : parent->element_children()) {
            if (!is_heading_or_label(*sibling) || contains_node(*sibling, node)) continue;
            if (sibling->tag() == "label" && (sibling->has_attribute("for") || has_form_field(*sibling))) continue;
            auto text = label_text(*sibling);
            if (!text.empty()) return text;
        }
        if (auto aria = dom::normalize_whitespace(parent->attribute_or("aria-label")); !aria.empty()) return aria;
        current = parent;
    }
    return {};
}

std::string preceding_label(const dom::Node& node) {
    const auto* parent = node.parent();
    if (!parent) return {};
    const auto& siblings = parent->children();
    auto it = std::find_if(siblings.begin(), siblings.end(), [&](const auto& c) { return c.get() == &node; });
    while (it != siblings.begin()) {
        --it;
        const auto& sib = **it;
        if (sib.is_text()) {
            auto text = dom::normalize_whitespace(sib.data());
            if (!text.empty()) return text;
        } else if (sib.is_element()) {
            const auto& t = sib.tag();
            if (t == "label" && (sib.has_attribute("for") || has_form_field(sib))) {
                // Belongs to another control.
                return {};
            }
            if (t == "label" || t == "span" || t == "strong" || t == "b") {
                auto text = label_text(sib);
                if (!text.empty()) return text;
            } else if (is_form_field(sib) || t == "button" || t == "br") {
                if (t != "br") return {};
            }
        }
    }
    return {};
}

std::string strip_markup(std::string_view text) {
    std::string out;
    bool in_tag = false;
    for (char c : text) {
        if (c == '<') {
            in_tag = true;
        } else if (c == '>' && in_tag) {
            in_tag = false;
        } else if (!in_tag) {
            out += c;
        }
    }
    return util::trim(out);
}

bool hidden_by_style(const dom::Node& node) {
    auto style = util::to_lower(node.attribute_or("style"));
    std::erase_if(style, [](char c) { return c == ' ' || c == '\t' || c == '\n'; });
    return style.find("display:none") != std::string::npos || style.find("visibility:hidden") != std::string::npos;
}

}  // namespace

std::string_view to_string(Operation op) {
    switch (op) {
        case Operation::Click: return "click";
        case Operation::Input: return "input";
        case Operation::Select: return "select";
        case Operation::Done: return "done";
    }
    return "click";
}

Operation parse_operation(std::string_view text) {
    auto lower = util::to_lower(text);
    if (lower == "click") return Operation::Click;
    if (lower == "input") return Operation::Input;
    if (lower == "select") return Operation::Select;
    if (lower == "done") return Operation::Done;
    throw Error("unknown-operation", std::string(text));
}

std::string_view to_string(StateKind kind) {
    return kind == StateKind::SimplifiedMarkup ? "simplified_markup" : "summary";
}

StateKind parse_state_kind(std::string_view text) {
    if (text == "simplified_markup") return StateKind::SimplifiedMarkup;
    if (text == "summary") return StateKind::Summary;
    throw Error("unknown-state-kind", std::string(text));
}

FeasibleAction FeasibleAction::done() {
    FeasibleAction a;
    a.operation = Operation::Done;
    a.target.tag_name = "none";
    return a;
}

ElementDescriptor describe_element(const dom::Node& node) {
    ElementDescriptor d;
    d.tag_name = node.tag();
    for (const auto& attr : node.attributes()) {
        if (one_of(std::string_view(attr.name), kRetainedAttributes) || attr.name.rfind("data-", 0) == 0) {
            d.attributes[attr.name] = attr.value;
        }
    }
    d.xpath = dom::compute_xpath(node);
    d.text = element_text(node);
    return d;
}

std::string bind_context(const dom::Node& node, const dom::Document& doc) {
    if (is_form_field(node)) {
        if (auto id = node.attribute_or("id"); !id.empty()) {
            for (const auto* el : doc.elements()) {
                if (el->tag() == "label" && el->attribute_or("for") == id) {
                    auto text = label_text(*el);
                    if (!text.empty()) return text;
                }
            }
        }
        if (const auto* wrapping = node.closest_ancestor("label")) {
            auto text = label_text(*wrapping);
            if (!text.empty()) return text;
        }
        if (auto text = preceding_label(node); !text.empty()) return text;
        return ancestor_context(node);
    }
    if (auto text = dom::inner_text(node); !text.empty()) return text;
    for (auto attr : {"aria-label", "title", "value"}) {
        if (auto text = dom::normalize_whitespace(node.attribute_or(attr)); !text.empty()) return text;
    }
    return ancestor_context(node);
}

Extraction extract_feasible_actions(const dom::Document& doc, const RenderInfo& render_info) {
    Extraction out;
    const auto* body = doc.body();
    const dom::Node* scope = body ? body : doc.html();
    if (!scope) return out;

    std::function<void(const dom::Node&)> walk = [&](const dom::Node& n) {
        for (const auto* el : n.element_children()) {
            auto xpath = dom::compute_xpath(*el);
            auto facts = render_info.find(xpath);
            bool has_handler = facts != render_info.end() && facts->second.has_handler;
            bool candidate = (one_of(std::string_view(el->tag()), kInteractiveTags) && !(el->tag() == "option" && inside_select(*el))) ||
                             has_handler;
            if (candidate) {
                if (facts == render_info.end()) {
                    out.warnings.push_back("no render info for " + xpath + "; skipped");
                } else if (facts->second.visible && facts->second.interactable) {
                    if (auto op = operation_for(*el, has_handler)) {
                        FeasibleAction action;
                        action.operation = *op;
                        action.target = describe_element(*el);
                        action.context = bind_context(*el, doc);
                        out.actions.push_back(std::move(action));
                    }
                }
            }
            // A select's options are represented by the select itself.
            if (el->tag() != "select") walk(*el);
        }
    };
    walk(*scope);
    return out;
}

std::string render_simplified_markup(const dom::Document& doc, const std::vector<FeasibleAction>& actions) {
    std::string body;
    for (const auto& action : actions) {
        if (action.is_done()) continue;
        const auto* node = dom::resolve_xpath(doc, action.target.xpath);
        std::string line;
        if (!action.context.empty() && action.context != action.target.text) {
            line += "<label>" + dom::escape_text(action.context) + "</label> ";
        }
        line += "<" + action.target.tag_name;
        for (const auto& [name, value] : action.target.attributes) {
            line += " " + name + "=\"" + dom::escape_attribute(value) + "\"";
        }
        if (node) {
            if (const auto* value = node->attribute("value"); value && action.target.tag_name != "button") {
                line += " value=\"" + dom::escape_attribute(*value) + "\"";
            }
            if (node->has_attribute("checked")) line += " checked";
        }
        line += " data-xpath=\"" + dom::escape_attribute(action.target.xpath) + "\"";
        if (action.target.tag_name == "input") {
            line += "/>";
        } else {
            line += ">";
            if (action.target.tag_name == "select" && node) {
                const auto* chosen = selected_option(*node);
                for (const auto& text : option_texts(*node)) {
                    bool is_chosen = chosen && dom::inner_text(*chosen) == text;
                    line += std::string(is_chosen ? "<option selected>" : "<option>") + dom::escape_text(text) +
                            "</option>";
                }
            } else if (action.target.tag_name == "textarea" && node) {
                line += dom::escape_text(dom::inner_text(*node));
            } else {
                line += dom::escape_text(action.target.text);
            }
            line += "</" + action.target.tag_name + ">";
        }
        if (!body.empty()) body += '\n';
        body += line;
    }
    return body;
}

WebState extract_state(const dom::Document& doc, const RenderInfo& render_info,
                       const std::optional<std::string>& screenshot, const Summarizer& summarizer,
                       std::size_t budget) {
    WebState state;
    state.source_size = util::utf8_length(dom::serialize(doc));
    if (screenshot) state.screenshot_ref = "img-" + util::hex64(util::fnv1a64(*screenshot));
    auto actions = extract_feasible_actions(doc, render_info).actions;
    // An empty page has nothing to summarize whatever the budget.
    bool empty_page = actions.empty() && (!doc.body() || dom::inner_text(*doc.body()).empty());
    if (state.source_size <= budget || empty_page) {
        state.kind = StateKind::SimplifiedMarkup;
        state.body = render_simplified_markup(doc, actions);
        return state;
    }
    if (!screenshot || !summarizer) {
        throw Error("state-budget-exceeded", "document of " + std::to_string(state.source_size) +
                                                 " characters exceeds budget " + std::to_string(budget) +
                                                 " and no screenshot summarizer is available");
    }
    state.kind = StateKind::Summary;
    state.body = strip_markup(summarizer(*screenshot));
    return state;
}

std::string fingerprint(const FeasibleAction& action) {
    auto attr = [&](const char* name) {
        auto it = action.target.attributes.find(name);
        return it == action.target.attributes.end() ? std::string{} : it->second;
    };
    Json key = Json::array({std::string(to_string(action.operation)), action.target.tag_name,
                                                dom::normalize_whitespace(action.target.text), attr("id"),
                                                attr("class")});
    return key.dump();
}

std::vector<std::vector<std::size_t>> detect_duplicates(const std::vector<FeasibleAction>& actions) {
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        auto key = fingerprint(actions[i]);
        auto [it, inserted] = group_of.try_emplace(key, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }
    std::erase_if(groups, [](const auto& g) { return g.size() < 2; });
    return groups;
}

RenderInfo infer_render_info(const dom::Document& doc) {
    RenderInfo info;
    const auto* html = doc.html();
    if (!html) return info;
    std::function<void(const dom::Node&, bool, bool)> walk = [&](const dom::Node& n, bool hidden, bool disabled) {
        for (const auto* el : n.element_children()) {
            const auto& t = el->tag();
            bool el_hidden = hidden || t == "head" || t == "script" || t == "style" || t == "template" ||
                             el->has_attribute("hidden") || hidden_by_style(*el) ||
                             (t == "input" && util::to_lower(el->attribute_or("type")) == "hidden");
            bool el_disabled = disabled || el->has_attribute("disabled");
            bool handler = std::any_of(el->attributes().begin(), el->attributes().end(),
                                       [](const dom::Attribute& a) { return a.name.rfind("on", 0) == 0; });
            info[dom::compute_xpath(*el)] = RenderFacts{!el_hidden, !el_hidden && !el_disabled, handler};
            walk(*el, el_hidden, el_disabled);
        }
    };
    info[dom::compute_xpath(*html)] = RenderFacts{true, true, false};
    walk(*html, false, false);
    return info;
}

Json to_json(const FeasibleAction& action) {
    Json attrs = Json::object();
    for (const auto& [k, v] : action.target.attributes) attrs[k] = v;
    Json j;
    j["operation"] = std::string(to_string(action.operation));
    j["target object"] = {
        {"attributes", attrs},
        {"tagName", action.target.tag_name},
        {"xpath", action.target.xpath},
        {"text", action.target.text},
    };
    // An omitted context means "same as the element text".
    if (action.context != action.target.text) j["context"] = action.context;
    if (action.input_content) j["input_content"] = *action.input_content;
    return j;
}

FeasibleAction action_from_json(const Json& j) {
    FeasibleAction a;
    a.operation = parse_operation(j.at("operation").get<std::string>());
    const auto& t = j.at("target object");
    for (const auto& [k, v] : t.at("attributes").items()) a.target.attributes[k] = v.get<std::string>();
    a.target.tag_name = t.at("tagName").get<std::string>();
    a.target.xpath = t.at("xpath").get<std::string>();
    a.target.text = t.at("text").get<std::string>();
    a.context = j.contains("context") ? j.at("context").get<std::string>() : a.target.text;
    if (j.contains("input_content")) a.input_content = j.at("input_content").get<std::string>();
    return a;
}

Json to_json(const WebState& state) {
    Json j;
    j["kind"] = std::string(to_string(state.kind));
    j["body"] = state.body;
    j["source_size"] = state.source_size;
    if (state.screenshot_ref) j["screenshot_ref"] = *state.screenshot_ref;
    return j;
}

WebState state_from_json(const Json& j) {
    WebState s;
    s.kind = parse_state_kind(j.at("kind").get<std::string>());
    s.body = j.at("body").get<std::string>();
    s.source_size = j.at("source_size").get<std::size_t>();
    if (j.contains("screenshot_ref")) s.screenshot_ref = j.at("screenshot_ref").get<std::string>();
    return s;
}

Json to_json(const RenderInfo& info) {
    Json j = Json::object();
    for (const auto& [xpath, f] : info) {
        j[xpath] = {{"visible", f.visible}, {"interactable", f.interactable}, {"has_handler", f.has_handler}};
    }
    return j;
}

RenderInfo render_info_from_json(const Json& j) {
    RenderInfo info;
    for (const auto& [xpath, f] : j.items()) {
        info[xpath] = RenderFacts{f.value("visible", false), f.value("interactable", false),
                                  f.value("has_handler", false)};
    }
    return info;
}

std::string compact(const FeasibleAction& action) { return to_json(action).dump(); }

}  // namespace hxagent

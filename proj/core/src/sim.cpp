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

#include "hxagent/sim.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent::sim {

namespace {

const std::set<std::string, std::less<>> kClickInputTypes = {"checkbox", "radio", "submit", "button",
                                                             "reset",    "image", "file",   "color"};

[[noreturn]] void invalid(const std::string& why) { throw Error("invalid-site", why); }

std::string var_of(const Vars& vars, const std::string& name) {
    auto it = vars.find(name);
    return it == vars.end() ? std::string{} : it->second;
}

// A required value written "!x" means "anything but x".
bool holds(const Conditions& c, const Vars& vars) {
    return std::all_of(c.begin(), c.end(), [&](const auto& kv) {
        const auto& want = kv.second;
        if (!want.empty() && want.front() == '!') return var_of(vars, kv.first) != want.substr(1);
        return var_of(vars, kv.first) == want;
    });
}

std::string interpolate(const std::string& text, const Vars& vars) {
    if (text.find("{{") == std::string::npos) return text;
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("{{", pos);
        auto close = open == std::string::npos ? open : text.find("}}", open + 2);
        if (close == std::string::npos) break;
        out += text.substr(pos, open - pos);
        out += var_of(vars, text.substr(open + 2, close - open - 2));
        pos = close + 2;
    }
    return out + text.substr(pos);
}

std::string input_type(const Element& e) {
    for (const auto& [k, v] : e.attributes) {
        if (k == "type") return util::to_lower(v);
    }
    return "text";
}

enum class Kind { Click, Text, Choice };

Kind kind_of(const Element& e) {
    if (e.tag == "textarea") return Kind::Text;
    if (e.tag == "select") return Kind::Choice;
    if (e.tag == "input" && !kClickInputTypes.count(input_type(e))) return Kind::Text;
    return Kind::Click;
}

bool is_checkbox(const Element& e) { return e.tag == "input" && input_type(e) == "checkbox"; }

struct NodeRecord {
    const dom::Node* node = nullptr;
    RenderFacts facts;
    const Element* element = nullptr;
    std::vector<const Conditions*> guards;
    bool disabled = false;
};

struct Builder {
    const Vars& vars;
    std::vector<NodeRecord>& records;

    void element(const Element& e, dom::Node& parent, bool visible, bool disabled,
                 std::vector<const Conditions*> guards) {
        bool shown = visible && holds(e.visible_if, vars);
        bool off = disabled || e.disabled;
        if (!e.visible_if.empty()) guards.push_back(&e.visible_if);

        std::vector<dom::Attribute> attrs;
        std::string style;
        for (const auto& [k, v] : e.attributes) {
            if (k == "style") style = interpolate(v, vars);
            else attrs.push_back({k, interpolate(v, vars)});
        }
        if (!e.bind.empty()) {
            auto value = var_of(vars, e.bind);
            if (is_checkbox(e)) {
                if (value == "on") attrs.push_back({"checked", ""});
            } else if (e.tag == "input") {
                attrs.push_back({"value", value});
            }
        }
        if (e.handler) attrs.push_back({"onclick", "void(0)"});
        if (e.disabled) attrs.push_back({"disabled", ""});
        if (!holds(e.visible_if, vars)) style += style.empty() ? "display:none" : ";display:none";
        if (!style.empty()) attrs.push_back({"style", style});

        auto& node = parent.append_child(dom::make_element(e.tag, std::move(attrs)));
        records.push_back({&node, {shown, shown && !off, e.handler}, &e, guards, off});

        if (e.tag == "input") return;
        auto text = interpolate(e.text, vars);
        if (e.tag == "textarea" && !e.bind.empty()) text = var_of(vars, e.bind);
        if (!text.empty()) node.append_child(dom::make_text(text));
        if (e.tag == "select") {
            auto current = var_of(vars, e.bind);
            for (const auto& o : e.options) {
                std::vector<dom::Attribute> oa{{"value", o}};
                if (o == current) oa.push_back({"selected", ""});
                auto& opt = node.append_child(dom::make_element("option", std::move(oa)));
                opt.append_child(dom::make_text(o));
                records.push_back({&opt, {shown, shown && !off, false}, nullptr, guards, off});
            }
        }
        for (const auto& c : e.children) element(c, node, shown, off, guards);
    }
};

dom::Document build_page(const Page& page, const Vars& vars, std::vector<NodeRecord>& records) {
    dom::Document doc;
    auto& html = doc.node().append_child(dom::make_element("html"));
    auto& head = html.append_child(dom::make_element("head"));
    auto& title = head.append_child(dom::make_element("title"));
    title.append_child(dom::make_text(interpolate(page.title, vars)));
    auto& body = html.append_child(dom::make_element("body"));
    records.push_back({&html, {true, true, false}, nullptr, {}, false});
    records.push_back({&head, {false, false, false}, nullptr, {}, false});
    records.push_back({&title, {false, false, false}, nullptr, {}, false});
    records.push_back({&body, {true, true, false}, nullptr, {}, false});
    Builder b{vars, records};
    for (const auto& e : page.body) b.element(e, body, true, false, {});
    return doc;
}

void collect_keys(const Element& e, std::set<std::string>& keys, const std::string& page) {
    if (e.tag.empty() || util::to_lower(e.tag) != e.tag) invalid("page " + page + ": bad tag '" + e.tag + "'");
    if (!e.key.empty() && !keys.insert(e.key).second) invalid("page " + page + ": duplicate key '" + e.key + "'");
    if (e.tag == "select" && e.options.empty()) invalid("page " + page + ": select without options");
    if (e.tag == "input" && (!e.children.empty() || !e.text.empty())) {
        invalid("page " + page + ": input elements cannot have content");
    }
    for (const auto& c : e.children) collect_keys(c, keys, page);
}

Json conditions_json(const Conditions& c) {
    Json j = Json::object();
    for (const auto& [k, v] : c) j[k] = v;
    return j;
}

Conditions conditions_from(const Json& j, const char* key) {
    Conditions c;
    if (!j.contains(key)) return c;
    for (const auto& [k, v] : j.at(key).items()) c[k] = v.get<std::string>();
    return c;
}

Json element_json(const Element& e) {
    Json j;
    j["tag"] = e.tag;
    if (!e.key.empty()) j["key"] = e.key;
    if (!e.attributes.empty()) {
        Json a = Json::object();
        for (const auto& [k, v] : e.attributes) a[k] = v;
        j["attributes"] = std::move(a);
    }
    if (!e.text.empty()) j["text"] = e.text;
    if (!e.visible_if.empty()) j["visible_if"] = conditions_json(e.visible_if);
    if (!e.bind.empty()) j["bind"] = e.bind;
    if (!e.options.empty()) j["options"] = e.options;
    if (e.handler) j["handler"] = true;
    if (e.disabled) j["disabled"] = true;
    if (!e.children.empty()) {
        Json c = Json::array();
        for (const auto& child : e.children) c.push_back(element_json(child));
        j["children"] = std::move(c);
    }
    return j;
}

Element element_from(const Json& j) {
    Element e;
    e.tag = j.at("tag").get<std::string>();
    e.key = j.value("key", "");
    if (j.contains("attributes")) {
        for (const auto& [k, v] : j.at("attributes").items()) e.attributes.emplace_back(k, v.get<std::string>());
    }
    e.text = j.value("text", "");
    e.visible_if = conditions_from(j, "visible_if");
    e.bind = j.value("bind", "");
    if (j.contains("options")) e.options = j.at("options").get<std::vector<std::string>>();
    e.handler = j.value("handler", false);
    e.disabled = j.value("disabled", false);
    if (j.contains("children")) {
        for (const auto& c : j.at("children")) e.children.push_back(element_from(c));
    }
    return e;
}

void snapshot_lines(const Element& e, const Vars& vars, std::vector<std::string>& out) {
    if (!holds(e.visible_if, vars)) return;
    auto text = dom::normalize_whitespace(interpolate(e.text, vars));
    if (e.tag == "input") {
        auto value = e.bind.empty() ? std::string{} : var_of(vars, e.bind);
        if (is_checkbox(e)) out.push_back(std::string("[") + (value == "on" ? "x" : " ") + "]");
        else out.push_back("[input: " + value + "]");
    } else if (e.tag == "select") {
        out.push_back("[select: " + var_of(vars, e.bind) + "]");
    } else if (e.tag == "a" || e.tag == "button" || e.handler) {
        out.push_back("[" + text + "]");
    } else if (!text.empty()) {
        out.push_back(text);
    }
    for (const auto& c : e.children) snapshot_lines(c, vars, out);
}

}  // namespace

void validate(const Site& site) {
    if (site.pages.empty()) invalid("site has no pages");
    std::map<std::string, std::set<std::string>> keys;
    for (const auto& p : site.pages) {
        if (p.name.empty()) invalid("page without a name");
        if (keys.count(p.name)) invalid("duplicate page '" + p.name + "'");
        auto& k = keys[p.name];
        for (const auto& e : p.body) collect_keys(e, k, p.name);
    }
    if (!keys.count(site.start_page)) invalid("unknown start page '" + site.start_page + "'");
    for (std::size_t i = 0; i < site.transitions.size(); ++i) {
        const auto& t = site.transitions[i];
        auto where = "transition " + std::to_string(i) + ": ";
        if (!keys.count(t.page)) invalid(where + "unknown page '" + t.page + "'");
        if (!keys[t.page].count(t.element)) invalid(where + "no element '" + t.element + "' on page '" + t.page + "'");
        if (t.operation == Operation::Done) invalid(where + "done is not an operation on elements");
        if (!t.go_to.empty() && !keys.count(t.go_to)) invalid(where + "unknown target page '" + t.go_to + "'");
    }
    if (!site.goal.page.empty() && !keys.count(site.goal.page)) invalid("goal names unknown page '" + site.goal.page + "'");
}

Json to_json(const Site& site) {
    Json j;
    j["name"] = site.name;
    j["task"] = site.task;
    j["vars"] = conditions_json(site.initial_vars);
    j["start_page"] = site.start_page;
    Json pages = Json::array();
    for (const auto& p : site.pages) {
        Json body = Json::array();
        for (const auto& e : p.body) body.push_back(element_json(e));
        pages.push_back({{"name", p.name}, {"title", p.title}, {"body", std::move(body)}});
    }
    j["pages"] = std::move(pages);
    Json transitions = Json::array();
    for (const auto& t : site.transitions) {
        Json tj;
        tj["page"] = t.page;
        tj["element"] = t.element;
        tj["operation"] = std::string(to_string(t.operation));
        if (!t.when.empty()) tj["when"] = conditions_json(t.when);
        if (!t.set.empty()) tj["set"] = conditions_json(t.set);
        if (!t.go_to.empty()) tj["goto"] = t.go_to;
        transitions.push_back(std::move(tj));
    }
    j["transitions"] = std::move(transitions);
    Json goal;
    if (!site.goal.page.empty()) goal["page"] = site.goal.page;
    goal["vars"] = conditions_json(site.goal.vars);
    j["goal"] = std::move(goal);
    return j;
}

Site site_from_json(const Json& j) {
    Site s;
    try {
        s.name = j.value("name", "");
        s.task = j.value("task", "");
        s.initial_vars = conditions_from(j, "vars");
        s.start_page = j.at("start_page").get<std::string>();
        for (const auto& pj : j.at("pages")) {
            Page p;
            p.name = pj.at("name").get<std::string>();
            p.title = pj.value("title", "");
            for (const auto& e : pj.at("body")) p.body.push_back(element_from(e));
            s.pages.push_back(std::move(p));
        }
        if (j.contains("transitions")) {
            for (const auto& tj : j.at("transitions")) {
                Transition t;
                t.page = tj.at("page").get<std::string>();
                t.element = tj.at("element").get<std::string>();
                t.operation = parse_operation(tj.at("operation").get<std::string>());
                t.when = conditions_from(tj, "when");
                t.set = conditions_from(tj, "set");
                t.go_to = tj.value("goto", "");
                s.transitions.push_back(std::move(t));
            }
        }
        if (j.contains("goal")) {
            s.goal.page = j.at("goal").value("page", "");
            s.goal.vars = conditions_from(j.at("goal"), "vars");
        }
    } catch (const Json::exception& e) {
        invalid(e.what());
    }
    validate(s);
    return s;
}

Site load_site(const std::filesystem::path& path) {
    auto j = Json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) invalid(path.string() + " is not valid JSON");
    return site_from_json(j);
}

Machine::Machine(Site site) : site_(std::move(site)) {
    validate(site_);
    for (std::size_t i = 0; i < site_.pages.size(); ++i) {
        const auto& p = site_.pages[i];
        page_index_[p.name] = i;
        std::vector<NodeRecord> records;
        auto doc = build_page(p, site_.initial_vars, records);
        auto& slots = slots_[p.name];
        auto& keys = key_xpath_[p.name];
        for (const auto& r : records) {
            if (!r.element) continue;
            auto xpath = dom::compute_xpath(*r.node);
            slots[xpath] = Slot{r.element, r.guards, r.disabled};
            if (!r.element->key.empty()) keys[r.element->key] = xpath;
        }
    }
}

const Page& Machine::page(const std::string& name) const {
    auto it = page_index_.find(name);
    if (it == page_index_.end()) throw Error("unknown-page", name);
    return site_.pages[it->second];
}

const Machine::Slot* Machine::slot_at(const std::string& page, const std::string& xpath) const {
    auto p = slots_.find(page);
    if (p == slots_.end()) return nullptr;
    std::string key = xpath;
    if (!key.empty() && key.front() == '/') key.erase(0, 1);
    auto it = p->second.find(key);
    return it == p->second.end() ? nullptr : &it->second;
}

State Machine::initial() const { return State{site_.start_page, site_.initial_vars}; }

bool Machine::goal_reached(const State& state) const {
    return (site_.goal.page.empty() || site_.goal.page == state.page) && holds(site_.goal.vars, state.vars);
}

RenderedPage Machine::render(const State& state) const {
    const auto& p = page(state.page);
    std::vector<NodeRecord> records;
    RenderedPage out{build_page(p, state.vars, records), {}, interpolate(p.title, state.vars)};
    for (const auto& r : records) out.render_info[dom::compute_xpath(*r.node)] = r.facts;
    return out;
}

std::string Machine::snapshot_text(const State& state) const {
    const auto& p = page(state.page);
    std::vector<std::string> lines{"# " + interpolate(p.title, state.vars)};
    for (const auto& e : p.body) snapshot_lines(e, state.vars, lines);
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::variant<State, ExecStatus> Machine::apply(const State& state, const FeasibleAction& action) const {
    if (action.is_done()) throw Error("not-executable", "the done pseudo-action is never executed");
    if (action.operation != Operation::Click && !action.input_content) {
        throw Error("not-executable", std::string(to_string(action.operation)) + " without input content");
    }
    const Slot* slot = slot_at(state.page, action.target.xpath);
    if (!slot) return ExecStatus::ElementNotFound;
    bool visible = std::all_of(slot->guards.begin(), slot->guards.end(),
                               [&](const Conditions* c) { return holds(*c, state.vars); });
    if (!visible || slot->disabled) return ExecStatus::NotInteractable;

    const Element& e = *slot->element;
    auto kind = kind_of(e);
    State next = state;
    switch (action.operation) {
        case Operation::Input:
            if (kind != Kind::Text) return ExecStatus::NotInteractable;
            if (!e.bind.empty()) next.vars[e.bind] = *action.input_content;
            break;
        case Operation::Select:
            if (kind != Kind::Choice) return ExecStatus::NotInteractable;
            if (std::find(e.options.begin(), e.options.end(), *action.input_content) == e.options.end()) {
                return ExecStatus::NotInteractable;
            }
            if (!e.bind.empty()) next.vars[e.bind] = *action.input_content;
            break;
        case Operation::Click:
            if (kind != Kind::Click) return ExecStatus::NotInteractable;
            if (is_checkbox(e) && !e.bind.empty()) {
                next.vars[e.bind] = var_of(next.vars, e.bind) == "on" ? "" : "on";
            }
            break;
        case Operation::Done:
            break;
    }
    if (!e.key.empty()) {
        for (const auto& t : site_.transitions) {
            if (t.page != state.page || t.element != e.key || t.operation != action.operation) continue;
            if (!holds(t.when, next.vars)) continue;
            for (const auto& [k, v] : t.set) next.vars[k] = v;
            if (!t.go_to.empty()) next.page = t.go_to;
            break;
        }
    }
    return next;
}

std::vector<std::string> Machine::vocabulary(const std::string& var) const {
    std::set<std::string> words;
    for (const auto& t : site_.transitions) {
        if (auto it = t.when.find(var); it != t.when.end()) words.insert(it->second);
    }
    if (auto it = site_.goal.vars.find(var); it != site_.goal.vars.end()) words.insert(it->second);
    std::erase_if(words, [](const std::string& w) { return w.empty() || w.front() == '!'; });
    return {words.begin(), words.end()};
}

std::vector<FeasibleAction> Machine::moves(const State& state) const {
    auto page = render(state);
    auto extraction = extract_feasible_actions(page.document, page.render_info);
    std::vector<FeasibleAction> out;
    for (auto& a : extraction.actions) {
        if (a.operation == Operation::Click) {
            out.push_back(std::move(a));
            continue;
        }
        const Slot* slot = slot_at(state.page, a.target.xpath);
        if (!slot) continue;
        const auto& e = *slot->element;
        auto values = a.operation == Operation::Select ? e.options : vocabulary(e.bind);
        for (const auto& v : values) {
            if (a.operation == Operation::Select && v == var_of(state.vars, e.bind)) continue;
            auto m = a;
            m.input_content = v;
            out.push_back(std::move(m));
        }
    }
    return out;
}

SimEnvironment::SimEnvironment(Site site) : machine_(std::make_shared<const Machine>(std::move(site))) {
    entry_ = "sim:" + machine_->site().name;
    fixed_ = true;
}

PageObservation SimEnvironment::load(const std::string& entry) {
    if (!fixed_ && (!machine_ || entry != entry_)) machine_ = std::make_shared<const Machine>(resolve_entry(entry));
    if (!entry.empty()) entry_ = entry;
    state_ = machine_->initial();
    return observe();
}

PageObservation SimEnvironment::observe() {
    const auto& s = state();
    auto page = machine_->render(s);
    PageObservation obs{std::move(page.document), std::move(page.render_info), std::move(page.title),
                        entry_ + "#" + s.page, machine_->snapshot_text(s)};
    return obs;
}

ExecutionResult SimEnvironment::execute(const FeasibleAction& action) {
    auto result = machine_->apply(state(), action);
    if (auto* status = std::get_if<ExecStatus>(&result)) {
        return ExecutionResult{*status, std::nullopt, action.target.xpath};
    }
    state_ = std::get<State>(std::move(result));
    return ExecutionResult{ExecStatus::Ok, observe(), {}};
}

bool SimEnvironment::goal_reached() const { return machine_->goal_reached(state()); }

const State& SimEnvironment::state() const {
    if (!state_) throw Error("not-loaded", "load() has not been called");
    return *state_;
}

const Machine& SimEnvironment::machine() const {
    if (!machine_) throw Error("not-loaded", "no site");
    return *machine_;
}

std::vector<FeasibleAction> oracle_shortest_sequence(const Site& site, std::size_t max_states) {
    Machine machine(site);
    struct Visit {
        State state;
        std::size_t parent;
        FeasibleAction action;
    };
    auto start = machine.initial();
    if (machine.goal_reached(start)) return {};
    std::vector<Visit> visits{{start, 0, {}}};
    std::set<State> seen{start};
    for (std::size_t head = 0; head < visits.size(); ++head) {
        auto moves = machine.moves(visits[head].state);
        for (auto& m : moves) {
            auto r = machine.apply(visits[head].state, m);
            auto* next = std::get_if<State>(&r);
            if (!next || !seen.insert(*next).second) continue;
            visits.push_back({*next, head, std::move(m)});
            if (machine.goal_reached(*next)) {
                std::vector<FeasibleAction> path;
                for (std::size_t i = visits.size() - 1; i != 0; i = visits[i].parent) path.push_back(visits[i].action);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (visits.size() > max_states) throw Error("goal-unreachable", "state budget exhausted");
        }
    }
    throw Error("goal-unreachable", site.name);
}

std::string export_static_html(const Machine& machine, const State& state) {
    return "<!DOCTYPE html>\n" + dom::serialize(machine.render(state).document) + "\n";
}

std::map<std::string, std::string> export_static_html(const Site& site) {
    Machine machine(site);
    std::map<std::string, std::string> out;
    for (const auto& p : site.pages) out[p.name] = export_static_html(machine, State{p.name, site.initial_vars});
    return out;
}

}  // namespace hxagent::sim

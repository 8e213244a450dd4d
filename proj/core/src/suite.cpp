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

#include "hxagent/suite.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace sim {

namespace {

const std::vector<std::string> kNames = {"Leonie", "Dannie", "Myron", "Macie", "Jess",  "Marcella",
                                         "Deanna", "Kasie",  "Betty", "Alma",  "Rolf",  "Tova",
                                         "Ines",   "Omar",   "Pia",   "Quinn", "Ravi",  "Sade",
                                         "Teo",    "Uma",    "Vito",  "Wren",  "Yara",  "Zeno"};
const std::vector<std::string> kWords = {
    "et",    "ut",     "nunc",  "sed",   "amet",   "dolor", "magna", "vitae", "proin",  "lectus", "morbi", "odio",
    "nisl",  "eros",   "justo", "felis", "risus",  "augue", "urna",  "purus", "massa",  "metus",  "porta", "neque",
    "ante",  "arcu",   "dui",   "elit",  "enim",   "erat",  "est",   "leo",   "ligula", "lorem",  "mauris", "mi",
    "nam",   "nibh",   "nulla", "orci",  "pede",   "quam",  "sem",   "sit",   "tempus", "tellus", "turpis", "velit"};
const std::vector<std::string> kSurnames = {"Smith", "Garcia", "Chen",  "Okafor", "Novak", "Silva",
                                            "Kowalski", "Haddad", "Larsen", "Moreau", "Tanaka", "Rossi"};
const std::vector<std::string> kCountries = {"Canada", "Chile", "Denmark", "Egypt",  "France", "Ghana",
                                             "India",  "Japan", "Kenya",   "Mexico", "Norway", "Peru"};
const std::vector<std::string> kSecrets = {"lotus", "cedar", "maple", "quartz", "ember", "delta", "nimbus", "orchid"};
const std::vector<std::string> kOrdinals = {"1st", "2nd", "3rd", "4th", "5th", "6th", "7th", "8th", "9th"};

constexpr int kResultsPerPage = 3;
constexpr int kResults = 9;
constexpr int kTabs = 9;
constexpr int kTabsPerStrip = 3;
constexpr int kLinksPerTab = 3;
constexpr int kBoxes = 6;

using Attrs = std::vector<std::pair<std::string, std::string>>;

Element el(std::string tag, Attrs attrs = {}, std::string text = {}, std::vector<Element> children = {}) {
    Element e;
    e.tag = std::move(tag);
    e.attributes = std::move(attrs);
    e.text = std::move(text);
    e.children = std::move(children);
    return e;
}

Element keyed(Element e, std::string key) {
    e.key = std::move(key);
    return e;
}

Element shown_if(Element e, Conditions c) {
    e.visible_if = std::move(c);
    return e;
}

Element bound(Element e, std::string var) {
    e.bind = std::move(var);
    return e;
}

class Dice {
public:
    explicit Dice(const std::string& seed) : rng_(static_cast<std::uint32_t>(util::fnv1a64(seed))) {}
    std::size_t below(std::size_t n) { return rng_() % n; }
    // k distinct indices from [0, n) excluding `skip`, in draw order.
    std::vector<std::size_t> distinct(std::size_t n, std::size_t k, std::vector<std::size_t> skip = {}) {
        std::vector<std::size_t> out;
        while (out.size() < k) {
            auto v = below(n);
            if (std::find(out.begin(), out.end(), v) == out.end() &&
                std::find(skip.begin(), skip.end(), v) == skip.end()) {
                out.push_back(v);
            }
        }
        return out;
    }

private:
    std::mt19937 rng_;
};

Element task_banner(const std::string& task) { return el("div", {{"id", "query"}}, task); }

std::string lower(const std::string& s) { return util::to_lower(s); }

Site login_form(int n) {
    auto i = static_cast<std::size_t>(n) % kNames.size();
    Dice dice("login-form/" + std::to_string(i));
    auto user = lower(kNames[i]);
    auto pass = kSecrets[dice.below(kSecrets.size())] + std::to_string(10 + dice.below(90));

    Site s;
    s.name = "login-form/" + std::to_string(n);
    s.task = "Enter the username \"" + user + "\" and the password \"" + pass +
             "\" into the text fields and press login.";
    s.initial_vars = {{"user", ""}, {"pass", ""}};
    Page login{"login", "Login", {}};
    login.body.push_back(el("div", {{"id", "wrap"}}, {},
                            {task_banner(s.task),
                             el("div", {{"id", "area"}}, {},
                                {el("label", {{"for", "username"}}, "Username"),
                                 bound(keyed(el("input", {{"id", "username"}, {"type", "text"}}), "user"), "user"),
                                 el("label", {{"for", "password"}}, "Password"),
                                 bound(keyed(el("input", {{"id", "password"}, {"type", "password"}}), "pass"), "pass"),
                                 keyed(el("button", {{"id", "subbtn"}, {"class", "secondary-action"}}, "Login"),
                                       "login")})}));
    Page home{"home", "Welcome", {el("div", {{"id", "wrap"}}, {}, {el("h1", {}, "Welcome, {{user}}!")})}};
    s.pages = {std::move(login), std::move(home)};
    s.start_page = "login";
    s.transitions.push_back({"login", "login", Operation::Click, {{"user", user}, {"pass", pass}}, {}, "home"});
    s.goal = {"home", {}};
    return s;
}

Site search_engine(int n) {
    auto i = static_cast<std::size_t>(n) % kNames.size();
    std::vector<std::string> results;
    std::string query;
    int target = 0;
    if (i == 0) {
        results = {"Leonie", "Dannie", "Myron", "Macie", "Jess", "Marcella", "Deanna", "Macie", "Kasie"};
        query = "Macie";
        target = 8;
    } else {
        Dice dice("search-engine/" + std::to_string(i));
        query = kNames[i];
        target = 4 + static_cast<int>(dice.below(kResults - 3));
        auto others = dice.distinct(kNames.size(), kResults - 2, {i});
        int decoy = 1 + static_cast<int>(dice.below(static_cast<std::size_t>(target - 1)));
        std::size_t next = 0;
        for (int r = 1; r <= kResults; ++r) {
            results.push_back(r == target || r == decoy ? query : kNames[others[next++]]);
        }
    }

    Site s;
    s.name = "search-engine/" + std::to_string(n);
    s.task = "Use the textbox to enter \"" + query + "\" and press \"Search\", then find and click the " +
             kOrdinals[static_cast<std::size_t>(target - 1)] + " search result.";
    s.initial_vars = {{"query", ""}, {"searched", ""}, {"rpage", ""}, {"clicked", ""}};

    std::vector<Element> content;
    content.push_back(shown_if(el("div", {{"class", "search-empty"}}, "No results found."), {{"searched", ""}}));
    for (int r = 1; r <= kResults; ++r) {
        const auto& name = results[static_cast<std::size_t>(r - 1)];
        auto page_no = std::to_string((r - 1) / kResultsPerPage + 1);
        content.push_back(shown_if(
            el("div", {{"class", "search-result"}}, {},
               {keyed(el("a", {{"href", "#"}, {"data-result", std::to_string(r - 1)}}, name), "result-" + std::to_string(r)),
                el("div", {{"class", "search-url"}}, "https://www." + lower(name) + ".com"),
                el("div", {{"class", "search-desc"}}, "Profile and recent posts of " + name + ".")}),
            {{"searched", "1"}, {"rpage", page_no}}));
    }
    Page page{"search", "Search Engine", {}};
    page.body.push_back(el(
        "div", {{"id", "wrap"}}, {},
        {task_banner(s.task),
         el("div", {{"id", "area"}}, {},
            {el("div", {}, {},
                {bound(keyed(el("input", {{"id", "search-text"}, {"type", "text"}}), "query"), "query"),
                 keyed(el("button", {{"id", "search"}, {"class", ""}, {"data-tampered", "e0"}}, "Search"), "search")}),
             el("div", {{"id", "page-content"}}, {}, std::move(content)),
             shown_if(el("div", {{"id", "pagination"}}, {},
                         {keyed(el("a", {{"href", "#"}, {"class", "prev"}}, "\xE2\x89\xA4"), "prev"),
                          keyed(el("a", {{"href", "#"}, {"class", "next"}}, "\xE2\x89\xA5"), "next")}),
                      {{"searched", "1"}})})}));
    s.pages = {std::move(page)};
    s.start_page = "search";
    s.transitions.push_back({"search", "search", Operation::Click, {{"query", query}}, {{"searched", "1"}, {"rpage", "1"}}, {}});
    int pages = kResults / kResultsPerPage;
    for (int p = 1; p < pages; ++p) {
        s.transitions.push_back({"search", "next", Operation::Click, {{"rpage", std::to_string(p)}},
                                 {{"rpage", std::to_string(p + 1)}}, {}});
        s.transitions.push_back({"search", "prev", Operation::Click, {{"rpage", std::to_string(p + 1)}},
                                 {{"rpage", std::to_string(p)}}, {}});
    }
    for (int r = 1; r <= kResults; ++r) {
        s.transitions.push_back(
            {"search", "result-" + std::to_string(r), Operation::Click, {}, {{"clicked", std::to_string(r)}}, {}});
    }
    s.goal = {"", {{"clicked", std::to_string(target)}}};
    return s;
}

Site tabbed_links(int n) {
    auto i = static_cast<std::size_t>(n) % kWords.size();
    Dice dice("tabbed-links/" + std::to_string(i));
    int target_tab = i == 0 ? 7 : 1 + static_cast<int>(dice.below(kTabs));
    int target_pos = 1 + static_cast<int>(dice.below(kLinksPerTab));
    auto fillers = dice.distinct(kWords.size(), kTabs * kLinksPerTab - 1, {i});

    Site s;
    s.name = "tabbed-links/" + std::to_string(n);
    s.task = "Switch between the tabs to find and click on the link \"" + kWords[i] + "\".";
    s.initial_vars = {{"active", "1"}, {"strip", "0"}, {"clicked", ""}};

    std::vector<Element> strip;
    for (int t = 1; t <= kTabs; ++t) {
        strip.push_back(shown_if(keyed(el("a", {{"href", "#tabs-" + std::to_string(t)}, {"class", "tab"}},
                                          "Tab #" + std::to_string(t)),
                                       "tab-" + std::to_string(t)),
                                 {{"strip", std::to_string((t - 1) / kTabsPerStrip)}}));
    }
    int last_strip = (kTabs - 1) / kTabsPerStrip;
    strip.push_back(shown_if(keyed(el("a", {{"href", "#"}, {"class", "scroll"}}, "\xC2\xBB"), "scroll"),
                             {{"strip", "!" + std::to_string(last_strip)}}));

    std::vector<Element> panels;
    std::size_t next = 0;
    for (int t = 1; t <= kTabs; ++t) {
        std::vector<Element> links;
        for (int j = 1; j <= kLinksPerTab; ++j) {
            bool hit = t == target_tab && j == target_pos;
            const auto& word = hit ? kWords[i] : kWords[fillers[next++]];
            links.push_back(keyed(el("a", {{"href", "#"}}, word), "link-" + std::to_string(t) + "-" + std::to_string(j)));
        }
        panels.push_back(shown_if(el("div", {{"id", "tabs-" + std::to_string(t)}, {"class", "panel"}}, {},
                                     {el("p", {}, {}, std::move(links))}),
                                  {{"active", std::to_string(t)}}));
    }

    Page page{"tabs", "Tabs", {}};
    page.body.push_back(el("div", {{"id", "wrap"}}, {},
                           {task_banner(s.task),
                            el("div", {{"id", "area"}}, {},
                               {el("div", {{"class", "tab-strip"}}, {}, std::move(strip)),
                                el("div", {{"class", "panels"}}, {}, std::move(panels))})}));
    s.pages = {std::move(page)};
    s.start_page = "tabs";
    for (int t = 1; t <= kTabs; ++t) {
        s.transitions.push_back({"tabs", "tab-" + std::to_string(t), Operation::Click, {}, {{"active", std::to_string(t)}}, {}});
        for (int j = 1; j <= kLinksPerTab; ++j) {
            auto id = std::to_string(t) + "-" + std::to_string(j);
            s.transitions.push_back({"tabs", "link-" + id, Operation::Click, {}, {{"clicked", id}}, {}});
        }
    }
    for (int p = 0; p < last_strip; ++p) {
        s.transitions.push_back({"tabs", "scroll", Operation::Click, {{"strip", std::to_string(p)}},
                                 {{"strip", std::to_string(p + 1)}}, {}});
    }
    s.goal = {"", {{"clicked", std::to_string(target_tab) + "-" + std::to_string(target_pos)}}};
    return s;
}

Site checkbox_set(int n) {
    auto i = static_cast<std::size_t>(n) % kNames.size();
    Dice dice("checkbox-set/" + std::to_string(i));
    auto labels = dice.distinct(kWords.size(), kBoxes);
    auto count = 1 + dice.below(3);
    auto picked = dice.distinct(kBoxes, count);
    std::sort(picked.begin(), picked.end());

    std::string list;
    for (std::size_t k = 0; k < picked.size(); ++k) {
        if (k > 0) list += k + 1 == picked.size() ? " and " : ", ";
        list += kWords[labels[picked[k]]];
    }
    Site s;
    s.name = "checkbox-set/" + std::to_string(n);
    s.task = "Select " + list + " and click Submit.";

    std::vector<Element> boxes;
    Conditions when;
    for (int b = 0; b < kBoxes; ++b) {
        auto var = "cb" + std::to_string(b + 1);
        s.initial_vars[var] = "";
        bool want = std::find(picked.begin(), picked.end(), static_cast<std::size_t>(b)) != picked.end();
        when[var] = want ? "on" : "";
        auto box = bound(keyed(el("input", {{"id", "ch" + std::to_string(b)}, {"type", "checkbox"}}), var), var);
        boxes.push_back(el("label", {}, {}, {std::move(box), el("span", {}, kWords[labels[static_cast<std::size_t>(b)]])}));
    }
    s.initial_vars["submitted"] = "";
    Page page{"form", "Checkboxes", {}};
    page.body.push_back(el("div", {{"id", "wrap"}}, {},
                           {task_banner(s.task),
                            el("div", {{"id", "area"}}, {},
                               {el("div", {{"id", "boxes"}}, {}, std::move(boxes)),
                                keyed(el("button", {{"id", "subbtn"}}, "Submit"), "submit")})}));
    s.pages = {std::move(page)};
    s.start_page = "form";
    s.transitions.push_back({"form", "submit", Operation::Click, when, {{"submitted", "1"}}, {}});
    s.goal = {"", {{"submitted", "1"}}};
    return s;
}

Site form_wizard(int n) {
    auto i = static_cast<std::size_t>(n) % kNames.size();
    Dice dice("form-wizard/" + std::to_string(i));
    const auto& first = kNames[i];
    const auto& last = kSurnames[dice.below(kSurnames.size())];
    auto offered = dice.distinct(kCountries.size(), 5);
    const auto& country = kCountries[offered[dice.below(offered.size())]];
    std::sort(offered.begin(), offered.end());
    const std::string placeholder = "Choose a country";

    Site s;
    s.name = "form-wizard/" + std::to_string(n);
    s.task = "Enter the first name \"" + first + "\" and the last name \"" + last + "\", press Next, then choose \"" +
             country + "\" as the country and press Submit.";
    s.initial_vars = {{"first", ""}, {"last", ""}, {"country", placeholder}};

    Page step1{"names", "Sign up", {}};
    step1.body.push_back(el(
        "div", {{"id", "wrap"}}, {},
        {task_banner(s.task),
         el("div", {{"id", "area"}}, {},
            {el("fieldset", {}, {},
                {el("legend", {}, "Your name"), el("label", {{"for", "first"}}, "First name"),
                 bound(keyed(el("input", {{"id", "first"}, {"type", "text"}}), "first"), "first"),
                 el("label", {{"for", "last"}}, "Last name"),
                 bound(keyed(el("input", {{"id", "last"}, {"type", "text"}}), "last"), "last")}),
             keyed(el("button", {{"id", "next"}}, "Next"), "next")})}));

    Element select = bound(keyed(el("select", {{"id", "country"}}), "country"), "country");
    select.options.push_back(placeholder);
    for (auto k : offered) select.options.push_back(kCountries[k]);
    Page step2{"country", "Sign up", {}};
    step2.body.push_back(el("div", {{"id", "wrap"}}, {},
                            {task_banner(s.task),
                             el("div", {{"id", "area"}}, {},
                                {el("label", {{"for", "country"}}, "Country"), std::move(select),
                                 keyed(el("button", {{"id", "submit"}}, "Submit"), "submit")})}));
    Page done{"done", "Thank you", {el("div", {{"id", "wrap"}}, {}, {el("h1", {}, "Thank you, {{first}}!")})}};
    s.pages = {std::move(step1), std::move(step2), std::move(done)};
    s.start_page = "names";
    s.transitions.push_back({"names", "next", Operation::Click, {{"first", first}, {"last", last}}, {}, "country"});
    s.transitions.push_back({"country", "submit", Operation::Click, {{"country", country}}, {}, "done"});
    s.goal = {"done", {}};
    return s;
}

void add_filler(Site& site, std::size_t filler) {
    if (filler == 0) return;
    std::vector<Element> buttons;
    for (std::size_t k = 1; k <= filler; ++k) {
        buttons.push_back(el("button", {{"class", "filler"}}, "Extra " + std::to_string(k)));
    }
    auto& page = *std::find_if(site.pages.begin(), site.pages.end(),
                               [&](const Page& p) { return p.name == site.start_page; });
    page.body.push_back(el("div", {{"id", "filler"}}, {}, std::move(buttons)));
}

std::optional<long> parse_number(std::string_view text) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0) return std::nullopt;
    return v;
}

}  // namespace

Site make_builtin_site(std::string_view family, int instance, std::size_t filler) {
    if (instance < 0) throw Error("load-failure", "negative instance");
    Site s;
    if (family == "login-form") s = login_form(instance);
    else if (family == "search-engine") s = search_engine(instance);
    else if (family == "tabbed-links") s = tabbed_links(instance);
    else if (family == "checkbox-set") s = checkbox_set(instance);
    else if (family == "form-wizard") s = form_wizard(instance);
    else throw Error("load-failure", "unknown builtin site '" + std::string(family) + "'");
    add_filler(s, filler);
    validate(s);
    return s;
}

Site resolve_entry(const std::string& entry) {
    constexpr std::string_view kScheme = "sim:";
    if (entry.rfind(kScheme, 0) != 0) {
        std::error_code ec;
        if (!entry.empty() && std::filesystem::is_regular_file(entry, ec)) {
            try {
                return load_site(entry);
            } catch (const Error& e) {
                throw Error("load-failure", e.what());
            }
        }
        throw Error("load-failure", "cannot open '" + entry + "'");
    }
    std::string rest = entry.substr(kScheme.size());
    std::size_t filler = 0;
    if (auto q = rest.find('?'); q != std::string::npos) {
        auto query = rest.substr(q + 1);
        rest.erase(q);
        if (query.rfind("filler=", 0) != 0) throw Error("load-failure", "unknown option in '" + entry + "'");
        auto v = parse_number(std::string_view(query).substr(7));
        if (!v) throw Error("load-failure", "bad filler count in '" + entry + "'");
        filler = static_cast<std::size_t>(*v);
    }
    if (rest == "search-8th-result") return make_builtin_site("search-engine", 0, filler);
    if (rest == "click-tab-2") return make_builtin_site("tabbed-links", 0, filler);
    auto slash = rest.find('/');
    std::string family = rest.substr(0, slash);
    int instance = 0;
    if (slash != std::string::npos) {
        auto v = parse_number(std::string_view(rest).substr(slash + 1));
        if (!v) throw Error("load-failure", "bad instance in '" + entry + "'");
        instance = static_cast<int>(*v);
    }
    return make_builtin_site(family, instance, filler);
}

}  // namespace sim

Json to_json(const TaskSuite& suite) {
    auto instances = [](const std::vector<TaskInstance>& v) {
        Json a = Json::array();
        for (const auto& i : v) a.push_back({{"id", i.id}, {"entry", i.entry}, {"task", i.task}});
        return a;
    };
    Json tasks = Json::array();
    for (const auto& t : suite.tasks) {
        tasks.push_back({{"task_id", t.task_id}, {"training", instances(t.training)}, {"evaluation", instances(t.evaluation)}});
    }
    return Json{{"tasks", std::move(tasks)}};
}

TaskSuite suite_from_json(const Json& j) {
    TaskSuite suite;
    try {
        auto instances = [](const Json& a) {
            std::vector<TaskInstance> out;
            for (const auto& i : a) {
                out.push_back({i.at("id").get<std::string>(), i.at("entry").get<std::string>(),
                               i.at("task").get<std::string>()});
            }
            return out;
        };
        for (const auto& t : j.at("tasks")) {
            TaskSpec spec;
            spec.task_id = t.at("task_id").get<std::string>();
            if (t.contains("training")) spec.training = instances(t.at("training"));
            if (t.contains("evaluation")) spec.evaluation = instances(t.at("evaluation"));
            suite.tasks.push_back(std::move(spec));
        }
    } catch (const Json::exception& e) {
        throw Error("invalid-suite", e.what());
    }
    return suite;
}

TaskSuite load_suite(const std::filesystem::path& path) {
    auto j = Json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error("invalid-suite", path.string() + " is not valid JSON");
    return suite_from_json(j);
}

TaskSuite builtin_suite(std::size_t training, std::size_t evaluation) {
    TaskSuite suite;
    for (auto family : kBuiltinFamilies) {
        TaskSpec spec;
        spec.task_id = std::string(family);
        auto make = [&](int n) {
            auto site = sim::make_builtin_site(family, n);
            return TaskInstance{site.name, "sim:" + site.name, site.task};
        };
        for (std::size_t k = 0; k < training; ++k) spec.training.push_back(make(kTrainingInstanceBase + static_cast<int>(k)));
        for (std::size_t k = 0; k < evaluation; ++k) spec.evaluation.push_back(make(static_cast<int>(k)));
        suite.tasks.push_back(std::move(spec));
    }
    return suite;
}

}  // namespace hxagent

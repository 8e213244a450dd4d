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

#include <random>

#include "hxagent/dom.hpp"
#include "hxagent/error.hpp"

namespace {

using namespace hxagent;
using dom::Node;

// Path written the long way: walk to the root, count earlier same-tag siblings.
std::string brute_xpath(const Node& node) {
    std::vector<std::string> segments;
    for (const Node* n = &node; n && n->is_element(); n = n->parent()) {
        if (n->tag() == "html" || n->tag() == "head" || n->tag() == "body") {
            segments.push_back(n->tag());
            continue;
        }
        int index = 1;
        for (const auto& sibling : n->parent()->children()) {
            if (sibling.get() == n) break;
            if (sibling->is_element() && sibling->tag() == n->tag()) ++index;
        }
        segments.push_back(n->tag() + "[" + std::to_string(index) + "]");
    }
    std::string out;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        if (!out.empty()) out += "/";
        out += *it;
    }
    return out;
}

std::string random_tree(std::mt19937& rng, int& budget, int depth) {
    static const char* tags[] = {"div", "span", "a", "p", "ul", "li", "section"};
    std::string out;
    std::uniform_int_distribution<int> tag_pick(0, 6), kids(0, 4);
    int n = depth > 5 ? 0 : kids(rng);
    for (int i = 0; i < n && budget > 0; ++i) {
        --budget;
        std::string tag = tags[tag_pick(rng)];
        out += "<" + tag + ">t" + std::to_string(budget) + random_tree(rng, budget, depth + 1) + "</" + tag + ">";
    }
    return out;
}

TEST(Dom, ParsesNestedMarkup) {
    auto doc = dom::parse_html("<html><head><title> A  title </title></head><body><div id=x>hi</div></body></html>");
    ASSERT_NE(doc.body(), nullptr);
    EXPECT_EQ(doc.title(), "A title");
    auto els = doc.elements();
    ASSERT_EQ(els.size(), 5u);
    EXPECT_EQ(els[4]->tag(), "div");
    EXPECT_EQ(els[4]->attribute_or("id"), "x");
}

TEST(Dom, FragmentGetsHtmlRoot) {
    auto doc = dom::parse_html("<p>loose");
    ASSERT_NE(doc.html(), nullptr);
    ASSERT_NE(doc.body(), nullptr);
    EXPECT_EQ(dom::inner_text(*doc.body()), "loose");
}

TEST(Dom, VoidAndRawTextElements) {
    auto doc = dom::parse_html("<body><input type=text><br><script>if (a < b) {}</script><p>x</p></body>");
    auto els = doc.elements();
    std::vector<std::string> tags;
    for (auto* e : els) tags.push_back(e->tag());
    EXPECT_EQ(tags, (std::vector<std::string>{"html", "head", "body", "input", "br", "script", "p"}));
    EXPECT_EQ(dom::inner_text(*doc.body()), "x");
}

TEST(Dom, ImpliedEndTags) {
    auto doc = dom::parse_html("<ul><li>a<li>b</ul><p>one<p>two");
    int li = 0, p = 0;
    for (auto* e : doc.elements()) {
        li += e->tag() == "li";
        p += e->tag() == "p";
        if (e->tag() == "li" || e->tag() == "p") {
            EXPECT_EQ(e->element_children().size(), 0u);
        }
    }
    EXPECT_EQ(li, 2);
    EXPECT_EQ(p, 2);
}

TEST(Dom, CharacterReferences) {
    EXPECT_EQ(dom::decode_entities("a&amp;b&lt;&gt;&quot;&#8805;&#x2264;&nbsp;"), "a&b<>\"≥≤ ");
    EXPECT_EQ(dom::decode_entities("&unknown; &amp"), "&unknown; &amp");
}

TEST(Dom, WhitespaceNormalization) {
    EXPECT_EQ(dom::normalize_whitespace("  a \n\t b  c  "), "a b c");
    EXPECT_EQ(dom::normalize_whitespace(""), "");
}

TEST(Dom, SerializeRoundTrip) {
    const std::string html = "<div class=\"a &amp; b\" id=\"x\"><span>1 &lt; 2</span><input value=\"q\"></div>";
    auto doc = dom::parse_html(html);
    auto once = dom::serialize(doc);
    auto twice = dom::serialize(dom::parse_html(once));
    EXPECT_EQ(once, twice);
    EXPECT_NE(once.find("class=\"a &amp; b\" id=\"x\""), std::string::npos);
}

TEST(Dom, RootXpath) {
    auto doc = dom::parse_html("<p>x</p>");
    EXPECT_EQ(dom::compute_xpath(*doc.html()), "html");
    EXPECT_EQ(dom::resolve_xpath(doc, "html"), doc.html());
    EXPECT_EQ(dom::resolve_xpath(doc, "/html/body"), doc.body());
    EXPECT_EQ(dom::resolve_xpath(doc, "html[1]/body[1]"), doc.body());
}

TEST(Dom, SearchButtonXpath) {
    auto doc = dom::parse_html(
        "<body><div><div>q</div><div><div><input><button id=search>Search</button></div></div></div></body>");
    const Node* button = nullptr;
    for (auto* e : doc.elements()) {
        if (e->tag() == "button") button = e;
    }
    ASSERT_NE(button, nullptr);
    EXPECT_EQ(dom::compute_xpath(*button), "html/body/div[1]/div[2]/div[1]/button[1]");
}

TEST(Dom, XpathMissesReturnNull) {
    auto doc = dom::parse_html("<div></div>");
    EXPECT_EQ(dom::resolve_xpath(doc, "html/body/div[2]"), nullptr);
    EXPECT_EQ(dom::resolve_xpath(doc, "html/body/span[1]"), nullptr);
    EXPECT_EQ(dom::resolve_xpath(doc, "html/body/div[0]"), nullptr);
    EXPECT_EQ(dom::resolve_xpath(doc, ""), nullptr);
}

TEST(Dom, DetachedNodeHasNoXpath) {
    auto orphan = dom::make_element("div");
    try {
        dom::compute_xpath(*orphan);
        FAIL() << "expected detached-node";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "detached-node");
    }
}

TEST(Dom, RandomTreesRoundTripEveryNode) {
    std::mt19937 rng(7);
    for (int round = 0; round < 20; ++round) {
        int budget = 50;
        std::string html = "<body>";
        while (budget > 0) html += random_tree(rng, budget, 0);
        html += "</body>";
        auto doc = dom::parse_html(html);
        auto els = doc.elements();
        ASSERT_GE(els.size(), 52u);
        for (const Node* e : els) {
            auto xpath = dom::compute_xpath(*e);
            EXPECT_EQ(xpath, brute_xpath(*e));
            EXPECT_EQ(dom::resolve_xpath(doc, xpath), e) << xpath;
        }
    }
}

TEST(Dom, InnerTextSkipsScriptAndStyle) {
    auto doc = dom::parse_html("<div> a <style>.x{}</style><b>b</b>\n<script>var c;</script> c </div>");
    EXPECT_EQ(dom::inner_text(*doc.body()), "a b c");
}

TEST(Dom, ClosestAncestor) {
    auto doc = dom::parse_html("<form><fieldset><div><input></div></fieldset></form>");
    const Node* in = nullptr;
    for (auto* e : doc.elements()) {
        if (e->tag() == "input") in = e;
    }
    ASSERT_NE(in, nullptr);
    ASSERT_NE(in->closest_ancestor("fieldset"), nullptr);
    EXPECT_EQ(in->closest_ancestor("fieldset")->tag(), "fieldset");
    EXPECT_EQ(in->closest_ancestor("table"), nullptr);
}

}  // namespace

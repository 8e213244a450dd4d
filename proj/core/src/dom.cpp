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

#include "hxagent/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <functional>

#include "hxagent/error.hpp"

namespace hxagent::dom {

namespace {

constexpr std::array<std::string_view, 14> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array<std::string_view, 4> kRawTextElements = {"script", "style", "textarea", "title"};

constexpr std::array<std::string_view, 18> kInlineElements = {
    "a", "abbr", "b", "bdi", "code", "em", "font", "i", "label",
    "mark", "q", "s", "small", "span", "strong", "sub", "sup", "u"};

template <std::size_t N>
bool one_of(std::string_view needle, const std::array<std::string_view, N>& set) {
    return std::find(set.begin(), set.end(), needle) != set.end();
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

struct NamedEntity {
    std::string_view name;
    std::uint32_t codepoint;
};

constexpr std::array<NamedEntity, 26> kNamedEntities = {{
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
    {"apos", '\''},    {"nbsp", 0xA0},    {"ge", 0x2265},    {"le", 0x2264},
    {"copy", 0xA9},    {"reg", 0xAE},     {"hellip", 0x2026}, {"mdash", 0x2014},
    {"ndash", 0x2013}, {"laquo", 0xAB},   {"raquo", 0xBB},   {"lsaquo", 0x2039},
    {"rsaquo", 0x203A}, {"times", 0xD7},  {"middot", 0xB7},  {"bull", 0x2022},
    {"euro", 0x20AC},  {"larr", 0x2190},  {"rarr", 0x2192},  {"uarr", 0x2191},
    {"darr", 0x2193},  {"trade", 0x2122},
}};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Document run() {
        Document doc;
        stack_.push_back(&doc.node());
        while (pos_ < src_.size()) {
            if (starts_with("<!--")) {
                parse_comment();
            } else if (starts_with("</")) {
                parse_end_tag();
            } else if (starts_with("<!") || starts_with("<?")) {
                skip_past('>');
            } else if (src_[pos_] == '<' && pos_ + 1 < src_.size() &&
                       std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))) {
                parse_start_tag();
            } else {
                parse_text();
            }
        }
        ensure_html_root(doc);
        return doc;
    }

private:
    bool starts_with(std::string_view prefix) const {
        return src_.substr(pos_, prefix.size()) == prefix;
    }

    void skip_past(char c) {
        auto end = src_.find(c, pos_);
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
    }

    Node& top() { return *stack_.back(); }

    void parse_comment() {
        auto end = src_.find("-->", pos_ + 4);
        auto body_end = end == std::string_view::npos ? src_.size() : end;
        auto node = std::make_unique<Node>(NodeKind::Comment, std::string(src_.substr(pos_ + 4, body_end - pos_ - 4)));
        top().append_child(std::move(node));
        pos_ = end == std::string_view::npos ? src_.size() : end + 3;
    }

    std::string read_name() {
        auto start = pos_;
        while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>' && src_[pos_] != '/' &&
               src_[pos_] != '=') {
            ++pos_;
        }
        return to_lower(src_.substr(start, pos_ - start));
    }

    void skip_spaces() {
        while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
    }

    void parse_end_tag() {
        pos_ += 2;
        auto name = read_name();
        skip_past('>');
        if (name.empty()) return;
        for (auto i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag() == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    void close_implied(const std::string& name) {
        auto top_is = [&](std::string_view t) { return stack_.size() > 1 && top().tag() == t; };
        if (name == "li") {
            for (auto i = stack_.size(); i-- > 1;) {
                const auto& t = stack_[i]->tag();
                if (t == "ul" || t == "ol") break;
                if (t == "li") {
                    stack_.resize(i);
                    break;
                }
            }
        } else if (name == "option" || name == "optgroup") {
            if (top_is("option")) stack_.pop_back();
        } else if (name == "td" || name == "th") {
            if (top_is("td") || top_is("th")) stack_.pop_back();
        } else if (name == "tr") {
            if (top_is("td") || top_is("th")) stack_.pop_back();
            if (top_is("tr")) stack_.pop_back();
        } else if (name == "dt" || name == "dd") {
            if (top_is("dt") || top_is("dd")) stack_.pop_back();
        }
        if (name == "p" || name == "div" || name == "ul" || name == "ol" || name == "table" ||
            name == "form" || name == "h1" || name == "h2" || name == "h3" || name == "fieldset") {
            if (top_is("p")) stack_.pop_back();
        }
    }

    void parse_start_tag() {
        ++pos_;
        auto name = read_name();
        std::vector<Attribute> attrs;
        bool self_closing = false;
        while (pos_ < src_.size()) {
            skip_spaces();
            if (pos_ >= src_.size()) break;
            if (src_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (src_[pos_] == '/') {
                self_closing = true;
                ++pos_;
                continue;
            }
            auto attr_name = read_name();
            if (attr_name.empty()) {
                ++pos_;
                continue;
            }
            skip_spaces();
            std::string value;
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                skip_spaces();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    char quote = src_[pos_++];
                    auto end = src_.find(quote, pos_);
                    if (end == std::string_view::npos) end = src_.size();
                    value = decode_entities(src_.substr(pos_, end - pos_));
                    pos_ = std::min(end + 1, src_.size());
                } else {
                    auto start = pos_;
                    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
                    value = decode_entities(src_.substr(start, pos_ - start));
                }
            }
            // First occurrence wins, as in browsers.
            bool seen = std::any_of(attrs.begin(), attrs.end(), [&](const Attribute& a) { return a.name == attr_name; });
            if (!seen) attrs.push_back({std::move(attr_name), std::move(value)});
        }

        close_implied(name);
        auto& node = top().append_child(make_element(name, std::move(attrs)));
        if (one_of(name, kRawTextElements)) {
            auto close = find_close_tag(name);
            auto raw = src_.substr(pos_, close - pos_);
            if (!raw.empty()) {
                std::string text = (name == "textarea" || name == "title") ? decode_entities(raw) : std::string(raw);
                node.append_child(make_text(std::move(text)));
            }
            pos_ = close;
            if (pos_ < src_.size()) skip_past('>');
            return;
        }
        if (!self_closing && !one_of(name, kVoidElements)) stack_.push_back(&node);
    }

    std::size_t find_close_tag(const std::string& name) const {
        for (auto i = pos_; i + 2 + name.size() <= src_.size(); ++i) {
            if (src_[i] == '<' && src_[i + 1] == '/' && to_lower(src_.substr(i + 2, name.size())) == name) return i;
        }
        return src_.size();
    }

    void parse_text() {
        auto start = pos_;
        ++pos_;
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<' && pos_ + 1 < src_.size()) {
                char next = src_[pos_ + 1];
                if (next == '/' || next == '!' || next == '?' || std::isalpha(static_cast<unsigned char>(next))) break;
            }
            ++pos_;
        }
        auto text = decode_entities(src_.substr(start, pos_ - start));
        auto& parent = top();
        if (!parent.children().empty() && parent.children().back()->is_text()) {
            auto& last = *parent.children().back();
            last.set_data(last.data() + text);
        } else {
            parent.append_child(make_text(std::move(text)));
        }
    }

    static void ensure_html_root(Document& doc) {
        auto& root = doc.node();
        Node* html = nullptr;
        for (const auto& child : root.children()) {
            if (child->is_element() && child->tag() == "html") html = child.get();
        }
        if (!html) {
            auto children = root.release_children();
            auto fresh = make_element("html");
            for (auto& c : children) fresh->append_child(std::move(c));
            html = &root.append_child(std::move(fresh));
        }
        ensure_head_and_body(*html);
    }

    // Like a browser, every document gets a head and a body. Loose metadata
    // goes to the head, everything else to the body.
    static void ensure_head_and_body(Node& html) {
        bool has_head = false, has_body = false;
        for (const auto& c : html.children()) {
            has_head = has_head || (c->is_element() && c->tag() == "head");
            has_body = has_body || (c->is_element() && c->tag() == "body");
        }
        if (has_head && has_body) return;
        auto children = html.release_children();
        auto head = has_head ? nullptr : make_element("head");
        auto body = has_body ? nullptr : make_element("body");
        std::vector<std::unique_ptr<Node>> kept;
        for (auto& c : children) {
            bool metadata = c->is_element() && (c->tag() == "title" || c->tag() == "meta" || c->tag() == "link" ||
                                                c->tag() == "base");
            bool structural = c->is_element() && (c->tag() == "head" || c->tag() == "body");
            if (head && metadata) {
                head->append_child(std::move(c));
            } else if (body && !structural && !metadata) {
                body->append_child(std::move(c));
            } else {
                kept.push_back(std::move(c));
            }
        }
        if (head) html.append_child(std::move(head));
        for (auto& c : kept) html.append_child(std::move(c));
        if (body) html.append_child(std::move(body));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<Node*> stack_;
};

void serialize_into(const Node& node, std::string& out) {
    switch (node.kind()) {
        case NodeKind::Document:
            for (const auto& c : node.children()) serialize_into(*c, out);
            return;
        case NodeKind::Text: {
            const auto* parent = node.parent();
            if (parent && (parent->tag() == "script" || parent->tag() == "style")) {
                out += node.data();
            } else {
                out += escape_text(node.data());
            }
            return;
        }
        case NodeKind::Comment:
            out += "<!--" + node.data() + "-->";
            return;
        case NodeKind::Element:
            out += '<';
            out += node.tag();
            for (const auto& a : node.attributes()) {
                out += ' ';
                out += a.name;
                out += "=\"";
                out += escape_attribute(a.value);
                out += '"';
            }
            out += '>';
            if (one_of(node.tag(), kVoidElements)) return;
            for (const auto& c : node.children()) serialize_into(*c, out);
            out += "</" + node.tag() + ">";
            return;
    }
}

void collect_text(const Node& node, std::string& out) {
    for (const auto& c : node.children()) {
        if (c->is_text()) {
            out += c->data();
        } else if (c->is_element()) {
            const auto& t = c->tag();
            if (t == "script" || t == "style" || t == "template") continue;
            bool inline_el = one_of(t, kInlineElements);
            if (!inline_el) out += ' ';
            collect_text(*c, out);
            if (!inline_el) out += ' ';
        }
    }
}

bool unindexed_segment(std::string_view tag) {
    return tag == "html" || tag == "head" || tag == "body";
}

}  // namespace

Node::Node(NodeKind kind, std::string name_or_text) : kind_(kind) {
    if (kind == NodeKind::Element) {
        tag_ = to_lower(name_or_text);
    } else {
        data_ = std::move(name_or_text);
    }
}

const std::string* Node::attribute(std::string_view name) const {
    for (const auto& a : attributes_) {
        if (a.name == name) return &a.value;
    }
    return nullptr;
}

std::string Node::attribute_or(std::string_view name, std::string fallback) const {
    const auto* v = attribute(name);
    return v ? *v : std::move(fallback);
}

void Node::set_attribute(std::string name, std::string value) {
    for (auto& a : attributes_) {
        if (a.name == name) {
            a.value = std::move(value);
            return;
        }
    }
    attributes_.push_back({std::move(name), std::move(value)});
}

void Node::remove_attribute(std::string_view name) {
    std::erase_if(attributes_, [&](const Attribute& a) { return a.name == name; });
}

Node& Node::append_child(std::unique_ptr<Node> child) {
    child->parent_ = this;
    children_.push_back(std::move(child));
    return *children_.back();
}

std::vector<std::unique_ptr<Node>> Node::release_children() {
    for (auto& c : children_) c->parent_ = nullptr;
    return std::exchange(children_, {});
}

std::vector<const Node*> Node::element_children() const {
    std::vector<const Node*> out;
    for (const auto& c : children_) {
        if (c->is_element()) out.push_back(c.get());
    }
    return out;
}

const Node* Node::closest_ancestor(std::string_view tag) const {
    for (const Node* p = parent_; p; p = p->parent_) {
        if (p->is_element() && p->tag() == tag) return p;
    }
    return nullptr;
}

std::unique_ptr<Node> make_element(std::string tag, std::vector<Attribute> attributes) {
    auto node = std::make_unique<Node>(NodeKind::Element, std::move(tag));
    for (auto& a : attributes) node->set_attribute(std::move(a.name), std::move(a.value));
    return node;
}

std::unique_ptr<Node> make_text(std::string text) {
    return std::make_unique<Node>(NodeKind::Text, std::move(text));
}

Document::Document() : root_(std::make_unique<Node>(NodeKind::Document, std::string{})) {}

const Node* Document::html() const {
    for (const auto& c : root_->children()) {
        if (c->is_element() && c->tag() == "html") return c.get();
    }
    return nullptr;
}

const Node* Document::body() const {
    const auto* h = html();
    if (!h) return nullptr;
    for (const auto* c : h->element_children()) {
        if (c->tag() == "body") return c;
    }
    return nullptr;
}

const Node* Document::head() const {
    const auto* h = html();
    if (!h) return nullptr;
    for (const auto* c : h->element_children()) {
        if (c->tag() == "head") return c;
    }
    return nullptr;
}

std::string Document::title() const {
    for (const auto* el : elements()) {
        if (el->tag() == "title") return normalize_whitespace(inner_text(*el));
    }
    return {};
}

std::vector<const Node*> Document::elements() const {
    std::vector<const Node*> out;
    std::function<void(const Node&)> walk = [&](const Node& n) {
        for (const auto& c : n.children()) {
            if (c->is_element()) {
                out.push_back(c.get());
                walk(*c);
            }
        }
    };
    walk(*root_);
    return out;
}

bool Document::contains(const Node& node) const {
    const Node* n = &node;
    while (n->parent()) n = n->parent();
    return n == root_.get();
}

Document parse_html(std::string_view html) { return Parser(html).run(); }

std::string serialize(const Node& node) {
    std::string out;
    serialize_into(node, out);
    return out;
}

std::string serialize(const Document& doc) { return serialize(doc.node()); }

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out += text[i];
            continue;
        }
        auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += '&';
            continue;
        }
        auto ref = text.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (!ref.empty() && ref[0] == '#') {
            std::uint32_t cp = 0;
            bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
            auto digits = ref.substr(hex ? 2 : 1);
            bool ok = !digits.empty();
            for (char c : digits) {
                int v = -1;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                if (v < 0 || cp > 0x10FFFF) {
                    ok = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            }
            if (ok && cp > 0 && cp < 0x110000) {
                append_utf8(out, cp);
                decoded = true;
            }
        } else {
            for (const auto& e : kNamedEntities) {
                if (e.name == ref) {
                    append_utf8(out, e.codepoint);
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi;
        } else {
            out += '&';
        }
    }
    return out;
}

std::string escape_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool space = is_space(c);
        if (!space && static_cast<unsigned char>(c) == 0xC2 && i + 1 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0xA0) {
            space = true;
            ++i;
        }
        if (space) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

std::string inner_text(const Node& node) {
    std::string raw;
    if (node.is_text()) return normalize_whitespace(node.data());
    collect_text(node, raw);
    return normalize_whitespace(raw);
}

std::string compute_xpath(const Node& node) {
    if (!node.is_element()) throw Error("not-an-element", "xpath requested for a non-element node");
    std::vector<std::string> segments;
    const Node* current = &node;
    while (true) {
        const Node* parent = current->parent();
        if (!parent) throw Error("detached-node", "<" + node.tag() + "> is not attached to a document");
        if (parent->kind() == NodeKind::Document) {
            segments.push_back(current->tag());
            break;
        }
        if (unindexed_segment(current->tag())) {
            segments.push_back(current->tag());
        } else {
            int index = 0;
            for (const auto& sibling : parent->children()) {
                if (sibling->is_element() && sibling->tag() == current->tag()) ++index;
                if (sibling.get() == current) break;
            }
            segments.push_back(current->tag() + "[" + std::to_string(index) + "]");
        }
        current = parent;
    }
    std::string out;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        if (!out.empty()) out += '/';
        out += *it;
    }
    return out;
}

const Node* resolve_xpath(const Document& doc, std::string_view xpath) {
    while (!xpath.empty() && xpath.front() == '/') xpath.remove_prefix(1);
    if (xpath.empty()) return nullptr;

    const Node* current = &doc.node();
    while (!xpath.empty()) {
        auto slash = xpath.find('/');
        auto segment = xpath.substr(0, slash);
        xpath = slash == std::string_view::npos ? std::string_view{} : xpath.substr(slash + 1);

        std::string_view name = segment;
        int index = 1;
        if (auto open = segment.find('['); open != std::string_view::npos) {
            if (segment.back() != ']') return nullptr;
            name = segment.substr(0, open);
            auto digits = segment.substr(open + 1, segment.size() - open - 2);
            if (digits.empty()) return nullptr;
            index = 0;
            for (char c : digits) {
                if (c < '0' || c > '9') return nullptr;
                index = index * 10 + (c - '0');
                if (index > 1'000'000) return nullptr;
            }
            if (index < 1) return nullptr;
        }
        if (name.empty()) return nullptr;

        const Node* next = nullptr;
        int seen = 0;
        for (const auto& c : current->children()) {
            if (c->is_element() && c->tag() == name && ++seen == index) {
                next = c.get();
                break;
            }
        }
        if (!next) return nullptr;
        current = next;
    }
    return current;
}

}  // namespace hxagent::dom

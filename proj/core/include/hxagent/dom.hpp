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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hxagent::dom {

enum class NodeKind { Document, Element, Text, Comment };

struct Attribute {
    std::string name;
    std::string value;
};

// A node of a parsed HTML document. Children are owned; the parent link is a
// non-owning back pointer that is null only for the document node and for
// nodes that were never attached.
class Node {
public:
    Node(NodeKind kind, std::string name_or_text);

    NodeKind kind() const noexcept { return kind_; }
    bool is_element() const noexcept { return kind_ == NodeKind::Element; }
    bool is_text() const noexcept { return kind_ == NodeKind::Text; }

    // Lowercase tag name for elements; empty otherwise.
    const std::string& tag() const noexcept { return tag_; }
    // Character data for text and comment nodes.
    const std::string& data() const noexcept { return data_; }
    void set_data(std::string data) { data_ = std::move(data); }

    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    const std::string* attribute(std::string_view name) const;
    bool has_attribute(std::string_view name) const { return attribute(name) != nullptr; }
    std::string attribute_or(std::string_view name, std::string fallback = {}) const;
    void set_attribute(std::string name, std::string value);
    void remove_attribute(std::string_view name);

    Node* parent() const noexcept { return parent_; }
    const std::vector<std::unique_ptr<Node>>& children() const noexcept { return children_; }
    Node& append_child(std::unique_ptr<Node> child);
    std::vector<std::unique_ptr<Node>> release_children();

    // Element children only, in document order.
    std::vector<const Node*> element_children() const;

    // The nearest ancestor element with the given tag, or null.
    const Node* closest_ancestor(std::string_view tag) const;

private:
    NodeKind kind_;
    std::string tag_;
    std::string data_;
    std::vector<Attribute> attributes_;
    Node* parent_ = nullptr;
    std::vector<std::unique_ptr<Node>> children_;
};

std::unique_ptr<Node> make_element(std::string tag, std::vector<Attribute> attributes = {});
std::unique_ptr<Node> make_text(std::string text);

class Document {
public:
    Document();
    Document(Document&&) noexcept = default;
    Document& operator=(Document&&) noexcept = default;

    Node& node() noexcept { return *root_; }
    const Node& node() const noexcept { return *root_; }

    // The <html> element. Parsing always produces one.
    const Node* html() const;
    const Node* body() const;
    const Node* head() const;
    std::string title() const;

    // All element nodes in document (pre-)order.
    std::vector<const Node*> elements() const;

    // True if node belongs to this document's tree.
    bool contains(const Node& node) const;

private:
    std::unique_ptr<Node> root_;
};

// Lenient HTML parser: void elements, raw-text elements, implied end tags for
// the common auto-closing cases, character references. Never throws on
// malformed markup; the result always has an <html> root element with a
// <head> and a <body>.
Document parse_html(std::string_view html);

// Serializes a subtree back to HTML. Attribute order is preserved.
std::string serialize(const Node& node);
std::string serialize(const Document& doc);

// Decodes the character references understood by the parser.
std::string decode_entities(std::string_view text);
std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

// Collapses runs of ASCII whitespace (and U+00A0) to one space and trims.
std::string normalize_whitespace(std::string_view text);

// Normalized rendered text of an element subtree; script/style are skipped.
std::string inner_text(const Node& node);

// Indexed absolute path "html/body/div[1]/div[2]" where each index is the
// 1-based position among same-tag element siblings. The document-unique
// html, head and body segments are written without an index. Throws Error("detached-node") for nodes that are
// not connected to a document root.
std::string compute_xpath(const Node& node);

// Resolves a path produced by compute_xpath (a leading '/' and explicit
// "[1]" on the unindexed segments are accepted). Returns null if no node matches.
const Node* resolve_xpath(const Document& doc, std::string_view xpath);

}  // namespace hxagent::dom

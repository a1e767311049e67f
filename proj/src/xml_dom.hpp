#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

// Small DOM built on expat. OOXML parts are matched by local element name
// (the part after the namespace prefix) so the reader does not depend on a
// specific prefix choice.
namespace docpipe::xml {

struct Node {
    std::string name; // qualified name as written, e.g. "w:p"
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<std::unique_ptr<Node>> children;
    std::string text; // character data directly inside this element

    std::string_view local_name() const;
    // Attribute value matched by local name; nullptr when absent.
    const std::string* attr(std::string_view local) const;
    // First direct child with the given local name; nullptr when absent.
    const Node* child(std::string_view local) const;
    std::vector<const Node*> children_named(std::string_view local) const;
    // Concatenated character data of this subtree, in document order.
    std::string deep_text() const;
};

// Parses a complete XML document. Throws MalformedXmlError with the byte
// offset reported by the underlying parser.
std::unique_ptr<Node> parse(std::string_view text);

std::string_view local_name_of(std::string_view qualified);

} // namespace docpipe::xml

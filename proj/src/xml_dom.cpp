#include "xml_dom.hpp"

#include <expat.h>

#include "docpipe/errors.hpp"

namespace docpipe::xml {

std::string_view local_name_of(std::string_view qualified) {
    auto pos = qualified.rfind(':');
    return pos == std::string_view::npos ? qualified : qualified.substr(pos + 1);
}

std::string_view Node::local_name() const {
    return local_name_of(name);
}

const std::string* Node::attr(std::string_view local) const {
    for (const auto& [k, v] : attrs) {
        if (local_name_of(k) == local) return &v;
    }
    return nullptr;
}

const Node* Node::child(std::string_view local) const {
    for (const auto& c : children) {
        if (c->local_name() == local) return c.get();
    }
    return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
    std::vector<const Node*> out;
    for (const auto& c : children) {
        if (c->local_name() == local) out.push_back(c.get());
    }
    return out;
}

std::string Node::deep_text() const {
    std::string out = text;
    for (const auto& c : children) out += c->deep_text();
    return out;
}

namespace {

struct ParseState {
    std::unique_ptr<Node> root;
    std::vector<Node*> stack;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto* st = static_cast<ParseState*>(user);
    auto node = std::make_unique<Node>();
    node->name = name;
    for (int i = 0; atts[i]; i += 2) {
        node->attrs.emplace_back(atts[i], atts[i + 1]);
    }
    Node* raw = node.get();
    if (st->stack.empty()) {
        st->root = std::move(node);
    } else {
        st->stack.back()->children.push_back(std::move(node));
    }
    st->stack.push_back(raw);
}

void XMLCALL on_end(void* user, const XML_Char*) {
    auto* st = static_cast<ParseState*>(user);
    st->stack.pop_back();
}

void XMLCALL on_chardata(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<ParseState*>(user);
    if (!st->stack.empty()) {
        st->stack.back()->text.append(s, static_cast<std::size_t>(len));
    }
}

} // namespace

std::unique_ptr<Node> parse(std::string_view text) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw std::bad_alloc();

    ParseState state;
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_chardata);

    XML_Status rc = XML_Parse(parser, text.data(), static_cast<int>(text.size()), 1);
    if (rc != XML_STATUS_OK) {
        auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser));
        std::string detail = XML_ErrorString(XML_GetErrorCode(parser));
        XML_ParserFree(parser);
        throw MalformedXmlError(detail, offset);
    }
    XML_ParserFree(parser);
    if (!state.root) {
        throw MalformedXmlError("document has no root element", 0);
    }
    return std::move(state.root);
}

} // namespace docpipe::xml

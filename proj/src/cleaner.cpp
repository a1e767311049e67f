#include "docpipe/cleaner.hpp"

#include "docpipe/errors.hpp"
#include "docpipe/unicode.hpp"

namespace docpipe {

void CleanConfig::validate() const {
    if (bullet_chars.empty()) throw ConfigError("bullet_chars must not be empty");
}

namespace {

bool is_blank(const std::u32string& s) {
    for (char32_t cp : s) {
        if (!uni::is_space(cp)) return false;
    }
    return true;
}

char32_t first_non_space(const std::u32string& s) {
    for (char32_t cp : s) {
        if (!uni::is_space(cp)) return cp;
    }
    return 0;
}

char32_t last_non_space(const std::u32string& s) {
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
        if (!uni::is_space(*it)) return *it;
    }
    return 0;
}

std::u32string rstrip(const std::u32string& s) {
    std::size_t end = s.size();
    while (end > 0 && uni::is_space(s[end - 1])) --end;
    return s.substr(0, end);
}

std::u32string lstrip(const std::u32string& s) {
    std::size_t start = 0;
    while (start < s.size() && uni::is_space(s[start])) ++start;
    return s.substr(start);
}

} // namespace

std::string group_broken_paragraphs(const std::string& text) {
    std::u32string u = uni::to_u32(text);

    // Split on newlines, remembering whether each break was a blank-line
    // paragraph separator (two or more consecutive newlines).
    std::vector<std::u32string> fragments;
    std::vector<bool> hard_break; // break AFTER fragment i is a paragraph break
    std::u32string cur;
    std::size_t i = 0;
    while (i < u.size()) {
        if (u[i] == U'\n') {
            std::size_t run = 0;
            while (i < u.size() && u[i] == U'\n') {
                ++run;
                ++i;
            }
            fragments.push_back(cur);
            hard_break.push_back(run >= 2);
            cur.clear();
        } else {
            cur.push_back(u[i]);
            ++i;
        }
    }
    fragments.push_back(cur);
    hard_break.push_back(false);

    std::u32string out = fragments[0];
    for (std::size_t f = 1; f < fragments.size(); ++f) {
        const std::u32string& next = fragments[f];
        bool paragraph_break = hard_break[f - 1];
        char32_t tail = last_non_space(out);
        char32_t head = first_non_space(next);
        bool mergeable = !paragraph_break && !is_blank(out) && !is_blank(next) &&
                         (uni::is_lower_latin(head) || uni::is_cjk(head)) &&
                         !uni::is_terminal_punct(tail);
        if (mergeable) {
            bool cjk_join = uni::is_cjk(tail) && uni::is_cjk(head);
            std::u32string merged = rstrip(out);
            if (!cjk_join) merged.push_back(U' ');
            merged += lstrip(next);
            out = std::move(merged);
        } else {
            out.push_back(U'\n');
            out += next;
        }
    }
    return uni::to_utf8(out);
}

std::string clean_bullets(const std::string& text, const CleanConfig& cfg) {
    cfg.validate();
    std::u32string u = uni::to_u32(text);
    if (u.empty() || !cfg.bullet_chars.count(u[0])) return text;
    std::size_t start = 1;
    while (start < u.size() && uni::is_space(u[start])) ++start;
    return uni::to_utf8(u.substr(start));
}

std::string clean_extra_whitespace(const std::string& text, const CleanConfig& cfg) {
    std::u32string u = uni::to_u32(text);
    auto collapsible = [&](char32_t cp) {
        if (cp == U' ' || cp == U'\t') return true;
        if (cp == 0x3000) return cfg.collapse_fullwidth_space;
        return false;
    };

    std::u32string out;
    out.reserve(u.size());
    std::size_t i = 0;
    while (i < u.size()) {
        if (collapsible(u[i])) {
            while (i < u.size() && collapsible(u[i])) ++i;
            out.push_back(U' ');
        } else {
            out.push_back(u[i]);
            ++i;
        }
    }
    // Trim all leading/trailing whitespace, newlines included.
    std::size_t start = 0;
    while (start < out.size() && uni::is_space(out[start])) ++start;
    std::size_t end = out.size();
    while (end > start && uni::is_space(out[end - 1])) --end;
    return uni::to_utf8(out.substr(start, end - start));
}

std::string clean(const std::string& text, const CleanConfig& cfg) {
    cfg.validate();
    std::string cur = text;
    // Terminates: any pass that changes the string strictly decreases the
    // tuple (newline count, length, fullwidth-space count).
    for (;;) {
        std::string next =
            clean_extra_whitespace(clean_bullets(group_broken_paragraphs(cur), cfg), cfg);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

void clean_elements(std::vector<Element>& elements, const CleanConfig& cfg) {
    for (Element& el : elements) {
        if (el.kind == ElementKind::Title || el.kind == ElementKind::NarrativeText) {
            el.text = clean(el.text, cfg);
        }
    }
}

} // namespace docpipe

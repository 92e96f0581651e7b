// Minimal streaming XML scanner. Reads element tags and attributes from an
// istream without building a tree, so multi-gigabyte exports stay cheap.
// Text content is skipped (every supported format keeps data in attributes);
// nesting is still checked so damage is reported with a byte offset.
#pragma once

#include <cstddef>
#include <cstdlib>
#include <istream>
#include <string>
#include <vector>

#include "glucast/core/errors.hpp"

namespace glucast::xml {

struct Attribute {
    std::string name;
    std::string value;
};

enum class TokenKind { ElementStart, ElementEnd, EndOfDocument };

struct Token {
    TokenKind kind = TokenKind::EndOfDocument;
    std::string name;
    std::vector<Attribute> attributes;  // ElementStart only
    bool self_closing = false;          // ElementStart only
    std::size_t byte_offset = 0;        // offset of the opening '<'
};

inline const std::string* find_attribute(const Token& tok, std::string_view name) {
    for (const auto& a : tok.attributes) {
        if (a.name == name) return &a.value;
    }
    return nullptr;
}

class Scanner {
public:
    explicit Scanner(std::istream& in) : in_(in) {}

    /// Returns the next start/end element token. A self-closing element is
    /// reported as a single ElementStart with self_closing set; the matching
    /// ElementEnd is synthesized so callers see balanced pairs either way.
    Token next() {
        if (pending_end_) {
            pending_end_ = false;
            Token tok;
            tok.kind = TokenKind::ElementEnd;
            tok.name = pending_end_name_;
            tok.byte_offset = offset_;
            return tok;
        }
        for (;;) {
            skip_text();
            std::size_t tag_offset = offset_;
            int c = get();
            if (c < 0) {
                if (!stack_.empty()) {
                    fail("unexpected end of document inside <" + stack_.back() + ">",
                         tag_offset);
                }
                Token tok;
                tok.kind = TokenKind::EndOfDocument;
                tok.byte_offset = tag_offset;
                return tok;
            }
            // skip_text stops at '<' or end of input only
            c = get();
            if (c < 0) fail("truncated tag", tag_offset);
            if (c == '?') {
                skip_until("?>", tag_offset);
                continue;
            }
            if (c == '!') {
                skip_declaration(tag_offset);
                continue;
            }
            if (c == '/') {
                return read_closing_tag(tag_offset);
            }
            return read_opening_tag(static_cast<char>(c), tag_offset);
        }
    }

    std::size_t depth() const { return stack_.size(); }

private:
    static bool is_name_char(int c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
               (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == ':';
    }
    static bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) {
        throw ParseError("malformed XML at byte " + std::to_string(at) + ": " + msg);
    }

    int get() {
        if (pos_ >= len_) {
            if (!refill()) return -1;
        }
        ++offset_;
        return static_cast<unsigned char>(buf_[pos_++]);
    }

    int peek() {
        if (pos_ >= len_) {
            if (!refill()) return -1;
        }
        return static_cast<unsigned char>(buf_[pos_]);
    }

    bool refill() {
        in_.read(buf_, kBufSize);
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        return len_ > 0;
    }

    void skip_text() {
        while (peek() >= 0 && peek() != '<') get();
    }

    void skip_until(std::string_view terminator, std::size_t tag_offset) {
        std::size_t matched = 0;
        for (;;) {
            int c = get();
            if (c < 0) fail("unterminated construct", tag_offset);
            if (c == terminator[matched]) {
                if (++matched == terminator.size()) return;
            } else {
                matched = (c == terminator[0]) ? 1 : 0;
            }
        }
    }

    /// `<!` constructs: comments, CDATA, DOCTYPE. We only need to get past
    /// them without misreading a '>' inside a comment as the tag end.
    void skip_declaration(std::size_t tag_offset) {
        int c = peek();
        if (c == '-') {
            get();
            if (get() != '-') fail("stray '<!-'", tag_offset);
            skip_until("-->", tag_offset);
            return;
        }
        if (c == '[') {
            std::string head;
            for (int i = 0; i < 7 && peek() >= 0; ++i) head.push_back(static_cast<char>(get()));
            if (head != "[CDATA[") fail("unrecognized '<![' construct", tag_offset);
            skip_until("]]>", tag_offset);
            return;
        }
        // DOCTYPE without internal subset support
        skip_until(">", tag_offset);
    }

    std::string read_name(int first, std::size_t tag_offset) {
        if (!is_name_char(first)) fail("expected element or attribute name", tag_offset);
        std::string name(1, static_cast<char>(first));
        while (is_name_char(peek())) name.push_back(static_cast<char>(get()));
        return name;
    }

    std::string decode_entities(const std::string& raw, std::size_t tag_offset) {
        if (raw.find('&') == std::string::npos) return raw;
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity", tag_offset);
            std::string ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                int base = 10;
                std::size_t k = 1;
                if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
                    base = 16;
                    k = 2;
                }
                long code = std::strtol(ent.c_str() + k, nullptr, base);
                if (code <= 0 || code > 0x10ffff) fail("bad character reference", tag_offset);
                // ASCII is all the supported formats use; encode the rest as UTF-8
                if (code < 0x80) {
                    out.push_back(static_cast<char>(code));
                } else if (code < 0x800) {
                    out.push_back(static_cast<char>(0xc0 | (code >> 6)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
                } else if (code < 0x10000) {
                    out.push_back(static_cast<char>(0xe0 | (code >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3f)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
                } else {
                    out.push_back(static_cast<char>(0xf0 | (code >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3f)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3f)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
                }
            } else {
                fail("unknown entity '&" + ent + ";'", tag_offset);
            }
            i = semi;
        }
        return out;
    }

    Token read_opening_tag(char first, std::size_t tag_offset) {
        Token tok;
        tok.kind = TokenKind::ElementStart;
        tok.byte_offset = tag_offset;
        tok.name = read_name(first, tag_offset);
        for (;;) {
            while (is_space(peek())) get();
            int c = get();
            if (c < 0) fail("truncated tag <" + tok.name + ">", tag_offset);
            if (c == '>') break;
            if (c == '/') {
                if (get() != '>') fail("expected '>' after '/'", tag_offset);
                tok.self_closing = true;
                break;
            }
            Attribute attr;
            attr.name = read_name(c, tag_offset);
            while (is_space(peek())) get();
            if (get() != '=') fail("attribute '" + attr.name + "' missing '='", tag_offset);
            while (is_space(peek())) get();
            int quote = get();
            if (quote != '"' && quote != '\'') {
                fail("attribute '" + attr.name + "' value must be quoted", tag_offset);
            }
            std::string raw;
            for (;;) {
                int v = get();
                if (v < 0) fail("unterminated attribute value", tag_offset);
                if (v == quote) break;
                raw.push_back(static_cast<char>(v));
            }
            attr.value = decode_entities(raw, tag_offset);
            tok.attributes.push_back(std::move(attr));
        }
        if (tok.self_closing) {
            pending_end_ = true;
            pending_end_name_ = tok.name;
        } else {
            stack_.push_back(tok.name);
        }
        return tok;
    }

    Token read_closing_tag(std::size_t tag_offset) {
        Token tok;
        tok.kind = TokenKind::ElementEnd;
        tok.byte_offset = tag_offset;
        int c = get();
        if (c < 0) fail("truncated closing tag", tag_offset);
        tok.name = read_name(c, tag_offset);
        while (is_space(peek())) get();
        if (get() != '>') fail("malformed closing tag </" + tok.name + ">", tag_offset);
        if (stack_.empty()) fail("closing tag </" + tok.name + "> with nothing open", tag_offset);
        if (stack_.back() != tok.name) {
            fail("closing tag </" + tok.name + "> does not match open <" + stack_.back() + ">",
                 tag_offset);
        }
        stack_.pop_back();
        return tok;
    }

    static constexpr std::size_t kBufSize = 1 << 16;

    std::istream& in_;
    char buf_[kBufSize];
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::size_t offset_ = 0;
    std::vector<std::string> stack_;
    bool pending_end_ = false;
    std::string pending_end_name_;
};

}  // namespace glucast::xml

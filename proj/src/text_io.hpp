// Shared tokenizer for the line-oriented text formats (algebra, circuit, smp).
// '#' starts a comment that runs to the end of the line.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace malcev::detail {

struct Token {
    std::string text;
    std::size_t line;
};

template <typename Error>
class TokenStream {
public:
    TokenStream(std::string_view text, std::string format) : format_(std::move(format)) {
        std::size_t line = 1;
        std::size_t i = 0;
        while (i < text.size()) {
            char c = text[i];
            if (c == '\n') {
                ++line;
                ++i;
            } else if (c == '#') {
                while (i < text.size() && text[i] != '\n') ++i;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
            } else {
                std::size_t start = i;
                while (i < text.size() && !is_separator(text[i])) ++i;
                tokens_.push_back({std::string(text.substr(start, i - start)), line});
            }
        }
    }

    bool done() const { return pos_ >= tokens_.size(); }

    const Token& peek() const {
        if (done()) fail_at_end("unexpected end of input");
        return tokens_[pos_];
    }

    std::size_t line_of_next() const { return done() ? last_line() : tokens_[pos_].line; }

    std::string next(std::string_view what) {
        if (done()) fail_at_end("unexpected end of input, expected " + std::string(what));
        return tokens_[pos_++].text;
    }

    void expect(std::string_view keyword) {
        std::size_t line = line_of_next();
        std::string tok = next(keyword);
        if (tok != keyword) {
            fail(line, "expected '" + std::string(keyword) + "', found '" + tok + "'");
        }
    }

    std::uint64_t next_uint(std::string_view what) {
        std::size_t line = line_of_next();
        std::string tok = next(what);
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            fail(line, "expected a non-negative integer for " + std::string(what) + ", found '" +
                           tok + "'");
        }
        return value;
    }

    [[noreturn]] void fail(std::size_t line, const std::string& message) const {
        throw Error(format_ + " line " + std::to_string(line) + ": " + message);
    }

private:
    static bool is_separator(char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#';
    }
    std::size_t last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }
    [[noreturn]] void fail_at_end(const std::string& message) const { fail(last_line(), message); }

    std::string format_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

template <typename Error>
std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Error>
void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << contents;
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace malcev::detail

#include "teamtrace/text.hpp"

#include <algorithm>
#include <cctype>

namespace teamtrace::text {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) pos = s.size();
        auto piece = trim(s.substr(start, pos - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = pos + 1;
    }
    return out;
}

namespace {
bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '-' || c == '\'' || c >= 0x80;
}
bool is_punct_token(char c) {
    return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?';
}
}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        // strip leading/trailing hyphens and quotes ("-x-" -> "x")
        std::size_t b = 0, e = cur.size();
        while (b < e && (cur[b] == '-' || cur[b] == '\'')) ++b;
        while (e > b && (cur[e - 1] == '-' || cur[e - 1] == '\'')) --e;
        if (e > b) out.push_back(to_lower(std::string_view(cur).substr(b, e - b)));
        cur.clear();
    };
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_char(c)) {
            cur.push_back(ch);
        } else {
            flush();
            if (is_punct_token(ch)) out.emplace_back(1, ch);
        }
    }
    flush();
    return out;
}

bool contains_phrase(std::string_view haystack, std::string_view phrase) {
    auto hay = tokenize(haystack);
    auto needle = tokenize(phrase);
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    }
    return false;
}

}  // namespace teamtrace::text

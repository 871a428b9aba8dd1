#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "strconf/alphabet.hpp"
#include "strconf/error.hpp"

namespace strconf {

/// Regular expression syntax tree. Letters are indices into the owning alphabet.
struct Regex {
    enum class Kind { Letter, Dot, Epsilon, Concat, Alt, Star, Class };

    Kind kind = Kind::Epsilon;
    Letter letter = 0;            // Kind::Letter
    std::vector<Letter> letters;  // Kind::Class, sorted and unique
    std::vector<Regex> children;  // Concat/Alt: two, Star: one

    static Regex make_letter(Letter l) {
        Regex r;
        r.kind = Kind::Letter;
        r.letter = l;
        return r;
    }
    static Regex dot() {
        Regex r;
        r.kind = Kind::Dot;
        return r;
    }
    static Regex epsilon() { return Regex{}; }
    static Regex concat(Regex a, Regex b) { return binary(Kind::Concat, std::move(a), std::move(b)); }
    static Regex alt(Regex a, Regex b) { return binary(Kind::Alt, std::move(a), std::move(b)); }
    static Regex star(Regex a) {
        Regex r;
        r.kind = Kind::Star;
        r.children.push_back(std::move(a));
        return r;
    }
    static Regex make_class(std::vector<Letter> ls) {
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        Regex r;
        r.kind = Kind::Class;
        r.letters = std::move(ls);
        return r;
    }

    friend bool operator==(const Regex&, const Regex&) = default;

  private:
    static Regex binary(Kind k, Regex a, Regex b) {
        Regex r;
        r.kind = k;
        r.children.reserve(2);
        r.children.push_back(std::move(a));
        r.children.push_back(std::move(b));
        return r;
    }
};

namespace detail {

inline bool is_meta(char32_t c) {
    switch (c) {
    case U'|': case U'*': case U'(': case U')': case U'[': case U']':
    case U'.': case U'\\': case U'$':
        return true;
    default:
        return false;
    }
}

class RegexParser {
  public:
    RegexParser(std::string_view text, const Alphabet& alphabet)
        : text_(utf8::decode(text)), alphabet_(alphabet) {}

    Regex parse() {
        Regex r = parse_alt();
        if (pos_ != text_.size()) fail({"'|'", "letter", "'('", "end of input"});
        return r;
    }

  private:
    std::u32string text_;
    const Alphabet& alphabet_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= text_.size(); }
    char32_t peek() const { return text_[pos_]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = at_end() ? "end of input" : "'" + utf8::encode(peek()) + "'";
        std::string msg = "regex syntax error at offset " + std::to_string(pos_) + ": found " + found +
                          ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
        throw SyntaxError(pos_, std::move(expected), msg);
    }

    bool starts_atom() const {
        if (at_end()) return false;
        char32_t c = peek();
        return c == U'(' || c == U'[' || c == U'.' || c == U'$' || c == U'\\' || !is_meta(c);
    }

    Regex parse_alt() {
        std::vector<Regex> branches;
        branches.push_back(parse_concat());
        while (!at_end() && peek() == U'|') {
            ++pos_;
            branches.push_back(parse_concat());
        }
        // right-nested: a|b|c == Alt(a, Alt(b, c))
        Regex r = std::move(branches.back());
        for (std::size_t i = branches.size() - 1; i-- > 0;) r = Regex::alt(std::move(branches[i]), std::move(r));
        return r;
    }

    Regex parse_concat() {
        if (!starts_atom()) fail({"letter", "'.'", "'('", "'['", "'\\'"});
        Regex r = parse_rep();
        while (starts_atom()) r = Regex::concat(std::move(r), parse_rep());
        return r;
    }

    Regex parse_rep() {
        Regex r = parse_atom();
        while (!at_end() && peek() == U'*') {
            ++pos_;
            if (r.kind != Regex::Kind::Star) r = Regex::star(std::move(r));
        }
        return r;
    }

    Letter user_letter(char32_t c) {
        // EOL is never a user letter, even if the code point '$' were declared
        return alphabet_.letter(c);
    }

    Regex parse_atom() {
        char32_t c = peek();
        switch (c) {
        case U'.':
            ++pos_;
            return Regex::dot();
        case U'$':
            if (!alphabet_.eol_enabled()) throw LetterOutsideAlphabet("$");
            ++pos_;
            return Regex::make_letter(alphabet_.eol());
        case U'(': {
            ++pos_;
            if (!at_end() && peek() == U')') {
                ++pos_;
                return Regex::epsilon();
            }
            Regex inner = parse_alt();
            if (at_end() || peek() != U')') fail({"')'", "'|'"});
            ++pos_;
            return inner;
        }
        case U'[': {
            ++pos_;
            std::vector<Letter> ls;
            while (!at_end() && peek() != U']') {
                char32_t m = peek();
                if (m == U'\\') {
                    ++pos_;
                    if (at_end() || !is_meta(peek())) fail({"metacharacter after '\\'"});
                    ls.push_back(user_letter(peek()));
                } else if (is_meta(m)) {
                    fail({"letter", "']'"});
                } else {
                    ls.push_back(user_letter(m));
                }
                ++pos_;
            }
            if (at_end()) fail({"letter", "']'"});
            if (ls.empty()) fail({"letter"});
            ++pos_;
            return Regex::make_class(std::move(ls));
        }
        case U'\\': {
            ++pos_;
            if (at_end() || !is_meta(peek())) fail({"metacharacter after '\\'"});
            Letter l = user_letter(peek());
            ++pos_;
            return Regex::make_letter(l);
        }
        default:
            ++pos_;
            return Regex::make_letter(user_letter(c));
        }
    }
};

} // namespace detail

/// Parses the regex dialect: alternation `|`, concatenation, postfix `*`,
/// `.` (any user letter), `$` (end-of-line letter), `()` (empty string),
/// `[abc]` classes and `\` escapes of metacharacters.
inline Regex parse_regex(std::string_view text, const Alphabet& alphabet) {
    return detail::RegexParser(text, alphabet).parse();
}

/// S-expression form, used in diagnostics and tests.
inline std::string describe(const Regex& r, const Alphabet& alphabet) {
    switch (r.kind) {
    case Regex::Kind::Letter:
        return alphabet.render(r.letter);
    case Regex::Kind::Dot:
        return ".";
    case Regex::Kind::Epsilon:
        return "()";
    case Regex::Kind::Class: {
        std::string s = "[";
        for (Letter l : r.letters) s += alphabet.render(l);
        return s + "]";
    }
    case Regex::Kind::Concat:
        return "Concat(" + describe(r.children[0], alphabet) + "," + describe(r.children[1], alphabet) + ")";
    case Regex::Kind::Alt:
        return "Alt(" + describe(r.children[0], alphabet) + "," + describe(r.children[1], alphabet) + ")";
    case Regex::Kind::Star:
        return "Star(" + describe(r.children[0], alphabet) + ")";
    }
    return {};
}

/// Renders a letter so that parse_regex reads it back as the same letter.
inline std::string render_regex_letter(const Alphabet& alphabet, Letter l) {
    if (alphabet.is_eol(l)) return "$";
    char32_t cp = alphabet.letters().at(l);
    std::string s = detail::is_meta(cp) ? "\\" : "";
    return s + utf8::encode(cp);
}

/// Regex text for an AST; parse_regex(to_text(r)) == r up to associativity.
inline std::string to_text(const Regex& r, const Alphabet& alphabet, int min_prec = 0) {
    // precedence: 0 alternation, 1 concatenation, 2 repetition, 3 atom
    int prec = 3;
    std::string s;
    switch (r.kind) {
    case Regex::Kind::Letter:
        s = render_regex_letter(alphabet, r.letter);
        break;
    case Regex::Kind::Dot:
        s = ".";
        break;
    case Regex::Kind::Epsilon:
        s = "()";
        break;
    case Regex::Kind::Class:
        s = "[";
        for (Letter l : r.letters) s += render_regex_letter(alphabet, l);
        s += "]";
        break;
    case Regex::Kind::Concat:
        prec = 1;
        s = to_text(r.children[0], alphabet, 1) + to_text(r.children[1], alphabet, 2);
        break;
    case Regex::Kind::Alt:
        prec = 0;
        s = to_text(r.children[0], alphabet, 1) + "|" + to_text(r.children[1], alphabet, 0);
        break;
    case Regex::Kind::Star:
        prec = 2;
        s = to_text(r.children[0], alphabet, 3) + "*";
        break;
    }
    return prec < min_prec ? "(" + s + ")" : s;
}

} // namespace strconf

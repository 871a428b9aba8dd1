#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "strconf/error.hpp"
#include "strconf/utf8.hpp"

namespace strconf {

/// Dense index of a letter in an alphabet's effective letter order.
using Letter = std::uint32_t;
using Word = std::vector<Letter>;

/// Ordered finite alphabet. Letter indices follow declaration order; when the
/// end-of-line letter is enabled it takes the last index and renders as `$`.
class Alphabet {
  public:
    Alphabet(std::vector<char32_t> letters, bool eol_enabled)
        : letters_(std::move(letters)), eol_enabled_(eol_enabled) {
        if (letters_.empty()) throw InvalidProblem("alphabet must not be empty");
        for (Letter i = 0; i < letters_.size(); ++i) {
            if (!index_.emplace(letters_[i], i).second)
                throw InvalidProblem("duplicate letter in alphabet: '" + utf8::encode(letters_[i]) + "'");
        }
    }

    /// Builds an alphabet from a UTF-8 string, one letter per code point.
    static std::shared_ptr<const Alphabet> from_string(std::string_view letters, bool eol_enabled = false) {
        auto cps = utf8::decode(letters);
        return std::make_shared<const Alphabet>(std::vector<char32_t>(cps.begin(), cps.end()), eol_enabled);
    }

    /// Number of letters transitions are defined on (user letters plus EOL).
    std::size_t size() const noexcept { return letters_.size() + (eol_enabled_ ? 1 : 0); }
    std::size_t user_size() const noexcept { return letters_.size(); }
    bool eol_enabled() const noexcept { return eol_enabled_; }

    Letter eol() const {
        if (!eol_enabled_) throw CompletionDisabled();
        return static_cast<Letter>(letters_.size());
    }
    bool is_eol(Letter l) const noexcept { return eol_enabled_ && l == letters_.size(); }

    const std::vector<char32_t>& letters() const noexcept { return letters_; }

    std::optional<Letter> find(char32_t cp) const {
        auto it = index_.find(cp);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    Letter letter(char32_t cp) const {
        if (auto l = find(cp)) return *l;
        throw LetterOutsideAlphabet(utf8::encode(cp));
    }

    /// Encodes user text. `$` is never read as EOL here; EOL enters a value only via completion.
    Word encode(std::string_view text) const {
        Word w;
        for (char32_t cp : utf8::decode(text)) w.push_back(letter(cp));
        return w;
    }

    std::string render(Letter l) const {
        if (is_eol(l)) return "$";
        return utf8::encode(letters_.at(l));
    }

    std::string render(std::span<const Letter> w) const {
        std::string out;
        for (Letter l : w) out += render(l);
        return out;
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.eol_enabled_ == b.eol_enabled_ && a.letters_ == b.letters_;
    }

  private:
    std::vector<char32_t> letters_;
    bool eol_enabled_;
    std::unordered_map<char32_t, Letter> index_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

inline bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
    return a == b || (a && b && *a == *b);
}

} // namespace strconf

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "strconf/dfa.hpp"
#include "strconf/error.hpp"
#include "strconf/regex.hpp"
#include "strconf/utf8.hpp"

namespace strconf {

/// Boolean formula over match atoms. And/Implies/Iff are kept as nodes but mean
/// their usual expansions into Or and Not.
struct Formula {
    enum class Kind { Match, Not, Or, And, Implies, Iff };
    Kind kind = Kind::Match;
    std::size_t atom = 0; // Kind::Match: index into Problem::atoms()
    std::vector<Formula> children;

    static Formula match(std::size_t atom) {
        Formula f;
        f.atom = atom;
        return f;
    }
    static Formula unary(Kind k, Formula a) {
        Formula f;
        f.kind = k;
        f.children.push_back(std::move(a));
        return f;
    }
    static Formula binary(Kind k, Formula a, Formula b) {
        Formula f;
        f.kind = k;
        f.children.push_back(std::move(a));
        f.children.push_back(std::move(b));
        return f;
    }
};

/// Evaluates a formula given the truth value of every atom.
inline bool evaluate(const Formula& f, const std::vector<bool>& atom_truth) {
    using K = Formula::Kind;
    switch (f.kind) {
    case K::Match:
        return atom_truth[f.atom];
    case K::Not:
        return !evaluate(f.children[0], atom_truth);
    case K::Or:
        return evaluate(f.children[0], atom_truth) || evaluate(f.children[1], atom_truth);
    case K::And:
        return evaluate(f.children[0], atom_truth) && evaluate(f.children[1], atom_truth);
    case K::Implies:
        return !evaluate(f.children[0], atom_truth) || evaluate(f.children[1], atom_truth);
    case K::Iff:
        return evaluate(f.children[0], atom_truth) == evaluate(f.children[1], atom_truth);
    }
    return false;
}

/// One occurrence of match(variable, regex) in the constraints.
struct Atom {
    std::size_t variable = 0;
    std::size_t index_in_variable = 0; // position j within the variable's atom block
    std::string regex;
    Dfa dfa; // minimized match-DFA
};

class Problem;

namespace detail {

class ConstraintParser {
  public:
    using AtomSink = std::function<std::size_t(const std::string& var, std::size_t var_pos, const std::string& regex,
                                               std::size_t regex_pos)>;

    ConstraintParser(std::string_view text, AtomSink sink) : text_(utf8::decode(text)), sink_(std::move(sink)) {}

    Formula parse() {
        Formula f = parse_iff();
        skip_ws();
        if (pos_ != text_.size()) fail({"'<->'", "'->'", "'||'", "'&&'", "end of input"});
        return f;
    }

  private:
    std::u32string text_;
    AtomSink sink_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = pos_ >= text_.size() ? "end of input" : "'" + utf8::encode(text_[pos_]) + "'";
        std::string msg = "constraint syntax error at offset " + std::to_string(pos_) + ": found " + found +
                          ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
        throw SyntaxError(pos_, std::move(expected), msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == U' ' || text_[pos_] == U'\t' || text_[pos_] == U'\n' ||
                                       text_[pos_] == U'\r'))
            ++pos_;
    }

    bool accept(std::u32string_view tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::u32string_view tok, const char* name) {
        if (!accept(tok)) fail({name});
    }

    // precedence, loosest first: <->, -> (right assoc), ||, &&, !
    Formula parse_iff() {
        Formula f = parse_implies();
        while (accept(U"<->")) f = Formula::binary(Formula::Kind::Iff, std::move(f), parse_implies());
        return f;
    }

    Formula parse_implies() {
        Formula f = parse_or();
        if (accept(U"->")) return Formula::binary(Formula::Kind::Implies, std::move(f), parse_implies());
        return f;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (accept(U"||")) f = Formula::binary(Formula::Kind::Or, std::move(f), parse_and());
        return f;
    }

    Formula parse_and() {
        Formula f = parse_not();
        while (accept(U"&&")) f = Formula::binary(Formula::Kind::And, std::move(f), parse_not());
        return f;
    }

    Formula parse_not() {
        if (accept(U"!")) return Formula::unary(Formula::Kind::Not, parse_not());
        if (accept(U"(")) {
            Formula f = parse_iff();
            expect(U")", "')'");
            return f;
        }
        if (accept(U"match")) {
            expect(U"(", "'('");
            skip_ws();
            std::size_t var_pos = pos_;
            std::string var = ident();
            expect(U",", "','");
            skip_ws();
            std::size_t regex_pos = pos_;
            std::string regex = string_literal();
            expect(U")", "')'");
            return Formula::match(sink_(var, var_pos, regex, regex_pos));
        }
        fail({"'!'", "'('", "'match'"});
    }

    std::string ident() {
        auto is_start = [](char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'_'; };
        auto is_cont = [&](char32_t c) { return is_start(c) || (c >= U'0' && c <= U'9'); };
        if (pos_ >= text_.size() || !is_start(text_[pos_])) fail({"variable name"});
        std::size_t begin = pos_;
        while (pos_ < text_.size() && is_cont(text_[pos_])) ++pos_;
        return utf8::encode(std::u32string_view(text_).substr(begin, pos_ - begin));
    }

    // "..." with \" and \\ unescaped; any other backslash pair is kept for the regex
    std::string string_literal() {
        if (pos_ >= text_.size() || text_[pos_] != U'"') fail({"string literal"});
        ++pos_;
        std::u32string out;
        while (true) {
            if (pos_ >= text_.size()) fail({"'\"'"});
            char32_t c = text_[pos_++];
            if (c == U'"') break;
            if (c == U'\\' && pos_ < text_.size() && (text_[pos_] == U'"' || text_[pos_] == U'\\')) {
                // keep "\\" as a regex escape of backslash, drop the escape of a quote
                if (text_[pos_] == U'\\') out.push_back(U'\\');
                out.push_back(text_[pos_++]);
                continue;
            }
            out.push_back(c);
        }
        return utf8::encode(out);
    }
};

} // namespace detail

/// A string CSP: ordered variables, an alphabet, and formulas over match atoms.
/// Immutable once built; the match-DFAs of all atoms are compiled on construction.
class Problem {
  public:
    Problem(AlphabetPtr alphabet, std::vector<std::string> variables, std::vector<std::string> constraints)
        : alphabet_(std::move(alphabet)), variables_(std::move(variables)), constraints_(std::move(constraints)) {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (variables_[i] == variables_[j]) throw InvalidProblem("duplicate variable: " + variables_[i]);
        atoms_of_.resize(variables_.size());
        for (const auto& text : constraints_) {
            detail::ConstraintParser parser(text, [this](const std::string& var, std::size_t, const std::string& regex,
                                                         std::size_t) { return add_atom(var, regex); });
            formulas_.push_back(parser.parse());
        }
    }

    /// Parses the problem file format:
    /// `{"alphabet": [...], "eol": bool, "variables": [...], "constraints": [...]}`.
    static Problem from_json(const nlohmann::json& j) {
        try {
            if (!j.is_object()) throw InvalidProblem("problem must be a JSON object");
            std::vector<char32_t> letters;
            for (const auto& l : j.at("alphabet")) {
                auto cps = utf8::decode(l.get<std::string>());
                if (cps.size() != 1) throw InvalidProblem("alphabet entries must be single letters");
                letters.push_back(cps[0]);
            }
            bool eol = j.value("eol", false);
            auto vars = j.at("variables").get<std::vector<std::string>>();
            auto cons = j.value("constraints", std::vector<std::string>{});
            return Problem(std::make_shared<const Alphabet>(std::move(letters), eol), std::move(vars),
                           std::move(cons));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidProblem(std::string("malformed problem file: ") + e.what());
        }
    }

    static Problem parse(std::string_view json_text) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidProblem(std::string("malformed JSON: ") + e.what());
        }
        return from_json(j);
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        auto& letters = j["alphabet"] = nlohmann::ordered_json::array();
        for (char32_t c : alphabet_->letters()) letters.push_back(utf8::encode(c));
        j["eol"] = alphabet_->eol_enabled();
        j["variables"] = variables_;
        j["constraints"] = constraints_;
        return j;
    }

    const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::vector<std::string>& constraints() const noexcept { return constraints_; }
    const std::vector<Formula>& formulas() const noexcept { return formulas_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    /// Atom ids on variable i in block order.
    const std::vector<std::size_t>& atoms_of(std::size_t variable) const { return atoms_of_.at(variable); }

    std::size_t variable_index(std::string_view name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == name) return i;
        throw UnknownVariable(std::string(name));
    }

    /// True iff every formula holds when atom j has truth value atom_truth[j].
    bool satisfied_by(const std::vector<bool>& atom_truth) const {
        for (const auto& f : formulas_)
            if (!evaluate(f, atom_truth)) return false;
        return true;
    }

  private:
    AlphabetPtr alphabet_;
    std::vector<std::string> variables_;
    std::vector<std::string> constraints_;
    std::vector<Formula> formulas_;
    std::vector<Atom> atoms_;
    std::vector<std::vector<std::size_t>> atoms_of_;

    std::size_t add_atom(const std::string& var, const std::string& regex) {
        Atom a;
        try {
            a.variable = variable_index(var);
        } catch (const UnknownVariable&) {
            throw InvalidProblem("constraint refers to unknown variable: " + var);
        }
        a.index_in_variable = atoms_of_[a.variable].size();
        a.regex = regex;
        a.dfa = compile_dfa(parse_regex(regex, *alphabet_), alphabet_);
        if (alphabet_->eol_enabled()) check_eol_is_final(a);
        atoms_of_[a.variable].push_back(atoms_.size());
        atoms_.push_back(std::move(a));
        return atoms_.size() - 1;
    }

    /// A completed value ends with EOL and never grows, so a language with EOL
    /// anywhere but last could never be matched by a completed value.
    void check_eol_is_final(const Atom& a) const {
        const Dfa& d = a.dfa;
        auto live = co_reachable(d);
        Letter eol = alphabet_->eol();
        for (State q = 0; q < d.num_states(); ++q) {
            State t = d.step(q, eol);
            for (Letter l = 0; l < d.width(); ++l)
                if (live[d.step(t, l)])
                    throw InvalidProblem("regex \"" + a.regex + "\" admits letters after the end-of-line marker '$'");
        }
    }
};

} // namespace strconf

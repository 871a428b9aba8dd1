#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "strconf/engine.hpp"
#include "strconf/problem.hpp"

namespace strconf {

/// The monolithic product automaton over single-variable append letters.
/// Coordinates are the match-DFAs of all atoms, followed (with EOL enabled) by one
/// well-formedness automaton per variable. Only the reachable part is built.
struct BigDfa {
    std::shared_ptr<const Problem> problem;
    std::vector<Dfa> coords;
    std::vector<std::size_t> owner;        // coordinate -> variable
    std::vector<std::vector<State>> tuples; // state -> coordinate states
    std::vector<State> delta;               // delta[(q * n + var) * width + letter]
    std::vector<bool> accepting;
    std::vector<bool> live;                 // no coordinate is in a dead state
    State source = 0;

    std::size_t num_vars() const { return problem->variables().size(); }
    std::size_t width() const { return problem->alphabet()->size(); }
    std::size_t num_states() const { return tuples.size(); }
    State step(State q, std::size_t var, Letter l) const { return delta[(q * num_vars() + var) * width() + l]; }

    State run(State q, std::size_t var, std::span<const Letter> w) const {
        for (Letter l : w) q = step(q, var, l);
        return q;
    }

    /// The state reached by any interleaving of the per-variable values.
    State run(const std::vector<Word>& values) const {
        State q = source;
        for (std::size_t i = 0; i < values.size(); ++i) q = run(q, i, values[i]);
        return q;
    }

    std::size_t live_count() const { return static_cast<std::size_t>(std::count(live.begin(), live.end(), true)); }

    std::size_t accepting_live_count() const {
        std::size_t c = 0;
        for (State q = 0; q < num_states(); ++q) c += accepting[q] && live[q];
        return c;
    }

    /// Product of the live state counts of all coordinates.
    std::uint64_t total_combinations() const {
        std::uint64_t c = 1;
        for (const auto& d : coords) c *= live_state_count(d);
        return c;
    }

    /// States from which an accepting state is reachable.
    std::vector<bool> extensible() const {
        std::vector<std::vector<State>> pred(num_states());
        for (State q = 0; q < num_states(); ++q)
            for (std::size_t i = 0; i < num_vars(); ++i)
                for (Letter l = 0; l < width(); ++l) pred[step(q, i, l)].push_back(q);
        std::vector<bool> out(num_states(), false);
        std::vector<State> stack;
        for (State q = 0; q < num_states(); ++q)
            if (accepting[q]) {
                out[q] = true;
                stack.push_back(q);
            }
        while (!stack.empty()) {
            State q = stack.back();
            stack.pop_back();
            for (State p : pred[q])
                if (!out[p]) {
                    out[p] = true;
                    stack.push_back(p);
                }
        }
        return out;
    }

    /// Coordinate states of q, e.g. `(1,0,2)`.
    std::string describe(State q) const {
        std::string s = "(";
        for (std::size_t j = 0; j < tuples[q].size(); ++j) s += (j ? "," : "") + std::to_string(tuples[q][j]);
        return s + ")";
    }
};

inline BigDfa build_big_dfa(std::shared_ptr<const Problem> p, std::size_t max_states = 1'000'000) {
    BigDfa b;
    b.problem = p;
    for (const auto& a : p->atoms()) {
        b.coords.push_back(a.dfa);
        b.owner.push_back(a.variable);
    }
    const std::size_t num_atoms = b.coords.size();
    if (p->alphabet()->eol_enabled())
        for (std::size_t i = 0; i < p->variables().size(); ++i) {
            b.coords.push_back(well_formed_dfa(p->alphabet()));
            b.owner.push_back(i);
        }

    std::vector<std::vector<bool>> coord_live;
    for (const auto& d : b.coords) coord_live.push_back(co_reachable(d));

    const std::size_t n = b.num_vars(), width = b.width();
    std::map<std::vector<State>, State> ids;
    auto intern = [&](std::vector<State> t) {
        auto [it, fresh] = ids.emplace(t, static_cast<State>(b.tuples.size()));
        if (fresh) {
            if (b.tuples.size() >= max_states) throw BudgetExceeded("product automaton exceeds state budget");
            std::vector<bool> truth(num_atoms);
            bool shaped = true, live = true;
            for (std::size_t j = 0; j < t.size(); ++j) {
                bool acc = b.coords[j].accepting[t[j]];
                if (j < num_atoms)
                    truth[j] = acc;
                else
                    shaped = shaped && acc;
                live = live && coord_live[j][t[j]];
            }
            b.accepting.push_back(shaped && b.problem->satisfied_by(truth));
            b.live.push_back(live);
            b.tuples.push_back(std::move(t));
            b.delta.resize(b.delta.size() + n * width);
        }
        return it->second;
    };

    std::vector<State> start;
    for (const auto& d : b.coords) start.push_back(d.source);
    b.source = intern(std::move(start));
    for (State q = 0; q < b.tuples.size(); ++q)
        for (std::size_t i = 0; i < n; ++i)
            for (Letter l = 0; l < width; ++l) {
                auto t = b.tuples[q];
                for (std::size_t j = 0; j < t.size(); ++j)
                    if (b.owner[j] == i) t[j] = b.coords[j].step(t[j], l);
                State r = intern(std::move(t));
                b.delta[(q * n + i) * width + l] = r;
            }
    return b;
}

inline BigDfa build_big_dfa(const Problem& p, std::size_t max_states = 1'000'000) {
    return build_big_dfa(std::make_shared<const Problem>(p), max_states);
}

/// Valid domain of variable `var` by re-sourcing at the assignment and projecting
/// every other variable's letters to epsilon.
inline Dfa big_dfa_valid_domain(const BigDfa& b, const std::vector<Word>& values, std::size_t var) {
    const std::size_t n = b.num_vars(), width = b.width();
    std::vector<std::vector<std::pair<Letter, State>>> edges(b.num_states());
    std::vector<std::vector<State>> eps(b.num_states());
    for (State q = 0; q < b.num_states(); ++q)
        for (std::size_t i = 0; i < n; ++i)
            for (Letter l = 0; l < width; ++l) {
                State t = b.step(q, i, l);
                if (i == var)
                    edges[q].emplace_back(l, t);
                else if (t != q)
                    eps[q].push_back(t);
            }
    return minimize_dfa(determinize(b.problem->alphabet(), edges, eps, {b.run(values)}, b.accepting));
}

/// Every assignment with values of length at most max_len that satisfies all formulas.
/// With EOL enabled, values are user letters optionally closed by EOL.
inline std::vector<std::vector<Word>> enumerate_solutions(const Problem& p, std::size_t max_len,
                                                          std::size_t budget = 2'000'000) {
    const auto& alphabet = *p.alphabet();
    std::vector<Word> words{{}};
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() >= max_len || (alphabet.eol_enabled() && !words[i].empty() &&
                                           alphabet.is_eol(words[i].back())))
            continue;
        for (Letter l = 0; l < alphabet.size(); ++l) {
            Word w = words[i];
            w.push_back(l);
            words.push_back(std::move(w));
            if (words.size() > budget) throw BudgetExceeded("too many candidate values");
        }
    }
    const std::size_t n = p.variables().size();
    double combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= static_cast<double>(words.size());
    if (combos > static_cast<double>(budget)) throw BudgetExceeded("too many candidate assignments");

    // atom truth per (atom, word)
    std::vector<std::vector<bool>> truth(p.atoms().size());
    for (std::size_t a = 0; a < p.atoms().size(); ++a)
        for (const auto& w : words) truth[a].push_back(dfa_accepts(p.atoms()[a].dfa, w));

    std::vector<std::vector<Word>> out;
    std::vector<std::size_t> pick(n, 0);
    std::vector<bool> atom_truth(p.atoms().size());
    while (true) {
        for (std::size_t a = 0; a < p.atoms().size(); ++a) atom_truth[a] = truth[a][pick[p.atoms()[a].variable]];
        if (p.satisfied_by(atom_truth)) {
            std::vector<Word> rho;
            for (auto k : pick) rho.push_back(words[k]);
            out.push_back(std::move(rho));
        }
        std::size_t i = 0;
        while (i < n && ++pick[i] == words.size()) pick[i++] = 0;
        if (i == n) break;
    }
    return out;
}

/// One step of a differential trace.
struct Action {
    enum class Op { Append, Complete };
    Op op = Op::Append;
    std::size_t var = 0;
    std::string text; // Append only

    nlohmann::ordered_json to_json(const Problem& p) const {
        nlohmann::ordered_json j;
        j["op"] = op == Op::Append ? "append" : "complete";
        j["variable"] = p.variables().at(var);
        j["text"] = text;
        return j;
    }
};

/// Disagreement between engine and oracle. action_index is -1 for the initial state.
struct Divergence {
    std::uint64_t problem_hash = 0;
    long action_index = -1;
    std::string variable;
    std::string witness;
    std::string expected; // oracle
    std::string actual;   // engine

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["problem_hash"] = problem_hash;
        j["action_index"] = action_index;
        j["variable"] = variable;
        j["witness"] = witness;
        j["expected"] = expected;
        j["actual"] = actual;
        return j;
    }
};

/// FNV-1a over the canonical problem JSON.
inline std::uint64_t problem_hash(const Problem& p) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : p.to_json().dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Replays the trace on a fresh session and on the product automaton, comparing
/// append feasibility and every variable's valid domain after each step.
inline std::vector<Divergence> check_equivalence(std::shared_ptr<const Problem> p, const std::vector<Action>& trace,
                                                 std::size_t max_states = 1'000'000) {
    std::vector<Divergence> report;
    const auto hash = problem_hash(*p);
    auto diverge = [&](long index, std::string var, std::string witness, std::string expected, std::string actual) {
        report.push_back({hash, index, std::move(var), std::move(witness), std::move(expected), std::move(actual)});
    };

    BigDfa big = build_big_dfa(p, max_states);
    auto extensible = big.extensible();
    std::unique_ptr<Session> session;
    try {
        session = std::make_unique<Session>(build(p));
    } catch (const InfeasibleProblem&) {
    }
    bool oracle_feasible = extensible[big.source];
    if (oracle_feasible != static_cast<bool>(session)) {
        diverge(-1, "", "", oracle_feasible ? "feasible" : "No feasible solutions",
                session ? "feasible" : "No feasible solutions");
        return report;
    }
    if (!session) return report;

    const auto& alphabet = *p->alphabet();
    std::vector<Word> values(p->variables().size());
    std::vector<bool> completed(values.size(), false);

    auto compare_domains = [&](long index) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            Dfa e = session->valid_domain(i);
            Dfa o = big_dfa_valid_domain(big, values, i);
            if (auto w = distinguishing_word(o, e)) {
                bool in_oracle = dfa_accepts(o, *w);
                diverge(index, p->variables()[i], alphabet.render(*w), in_oracle ? "in domain" : "not in domain",
                        in_oracle ? "not in domain" : "in domain");
            }
        }
    };

    compare_domains(-1);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& act = trace[k];
        const auto index = static_cast<long>(k);
        const std::string& name = p->variables().at(act.var);
        Word w = act.op == Action::Op::Append ? alphabet.encode(act.text) : Word{alphabet.eol()};
        std::string text = act.op == Action::Op::Append ? act.text : "$";

        std::string expected;
        if (completed[act.var])
            expected = "variable completed";
        else if (w.empty())
            expected = "nothing to append";
        else
            expected = extensible[big.run(big.run(values), act.var, w)] ? "ok" : "invalid append";

        std::string actual = "ok";
        try {
            if (act.op == Action::Op::Append)
                session->append(act.var, act.text);
            else
                session->complete(act.var);
        } catch (const InvalidAppend&) {
            actual = "invalid append";
        } catch (const VariableCompleted&) {
            actual = "variable completed";
        } catch (const Error& e) {
            actual = w.empty() ? "nothing to append" : e.what();
        }
        if (expected != actual) {
            diverge(index, name, text, expected, actual);
            return report;
        }
        if (actual != "ok") continue;
        values[act.var].insert(values[act.var].end(), w.begin(), w.end());
        if (act.op == Action::Op::Complete) completed[act.var] = true;
        compare_domains(index);
    }
    return report;
}

inline std::vector<Divergence> check_equivalence(const Problem& p, const std::vector<Action>& trace) {
    return check_equivalence(std::make_shared<const Problem>(p), trace);
}

/// Shape limits for random problems.
struct RandomShape {
    std::size_t max_vars = 3;
    std::size_t max_letters = 3;
    std::size_t max_atoms = 4;
    std::size_t max_depth = 3;
    double eol_probability = 0.25;
};

namespace detail {

inline Regex random_regex(std::mt19937_64& rng, const Alphabet& alphabet, std::size_t depth) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<Letter> letter(0, static_cast<Letter>(alphabet.user_size() - 1));
    if (depth == 0 || u(rng) < 0.3) {
        double r = u(rng);
        if (r < 0.6) return Regex::make_letter(letter(rng));
        if (r < 0.75) return Regex::dot();
        if (r < 0.85) return Regex::epsilon();
        std::vector<Letter> ls;
        for (Letter l = 0; l < alphabet.user_size(); ++l)
            if (u(rng) < 0.5) ls.push_back(l);
        if (ls.empty()) ls.push_back(letter(rng));
        return Regex::make_class(std::move(ls));
    }
    double r = u(rng);
    if (r < 0.4) return Regex::concat(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
    if (r < 0.75) return Regex::alt(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
    return Regex::star(random_regex(rng, alphabet, depth - 1));
}

inline std::string quote_regex(const std::string& regex) {
    std::string out = "\"";
    for (char c : regex) {
        if (c == '"') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline Problem random_problem(std::mt19937_64& rng, const RandomShape& shape = {}) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<char32_t> letters;
    for (std::size_t i = 0, n = pick(1, shape.max_letters); i < n; ++i) letters.push_back(U'a' + static_cast<char32_t>(i));
    bool eol = u(rng) < shape.eol_probability;
    auto alphabet = std::make_shared<const Alphabet>(letters, eol);

    std::vector<std::string> vars;
    for (std::size_t i = 0, n = pick(1, shape.max_vars); i < n; ++i) vars.push_back("x" + std::to_string(i + 1));

    std::vector<std::string> atoms;
    for (std::size_t i = 0, n = pick(1, shape.max_atoms); i < n; ++i) {
        Regex r = detail::random_regex(rng, *alphabet, shape.max_depth);
        std::string text = to_text(r, *alphabet);
        if (eol && u(rng) < 0.3) text = "(" + text + ")$";
        std::string a = "match(" + vars[pick(0, vars.size() - 1)] + "," + detail::quote_regex(text) + ")";
        if (u(rng) < 0.3) a = "!" + a;
        atoms.push_back(std::move(a));
    }

    static const char* ops[] = {" || ", " && ", " -> ", " <-> "};
    std::vector<std::string> constraints;
    std::size_t groups = pick(1, std::min<std::size_t>(atoms.size(), 3));
    std::size_t next = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        std::size_t take = g + 1 == groups ? atoms.size() - next : pick(1, atoms.size() - next - (groups - g - 1));
        std::string f = atoms[next++];
        for (std::size_t t = 1; t < take; ++t) f = "(" + f + ops[pick(0, 3)] + atoms[next++] + ")";
        constraints.push_back(std::move(f));
    }
    return Problem(alphabet, std::move(vars), std::move(constraints));
}

inline std::vector<Action> random_trace(std::mt19937_64& rng, const Problem& p, std::size_t max_actions = 5) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    const auto& alphabet = *p.alphabet();
    std::vector<Action> out;
    for (std::size_t k = 0, n = pick(1, max_actions); k < n; ++k) {
        Action a;
        a.var = pick(0, p.variables().size() - 1);
        if (alphabet.eol_enabled() && pick(0, 4) == 0) {
            a.op = Action::Op::Complete;
        } else {
            for (std::size_t i = 0, len = pick(1, 2); i < len; ++i)
                a.text += alphabet.render(static_cast<Letter>(pick(0, alphabet.user_size() - 1)));
        }
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace strconf

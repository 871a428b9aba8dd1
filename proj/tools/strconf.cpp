// strconf: check, explore and serve string configuration problems.

#include <csignal>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>

#include "strconf/oracle.hpp"
#include "strconf/service.hpp"

namespace {

using namespace strconf;

constexpr int kOk = 0;
constexpr int kDivergence = 1;
constexpr int kUsage = 2;

std::shared_ptr<const Problem> load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProblem("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return std::make_shared<const Problem>(Problem::parse(buf.str()));
}

struct CheckRow {
    std::string name;
    std::size_t engine_states = 0;
    std::size_t oracle_states = 0;
    std::size_t oracle_live = 0;
    std::size_t divergences = 0;
};

CheckRow check_one(const std::string& name, const std::shared_ptr<const Problem>& p,
                   const std::vector<std::vector<Action>>& traces, std::ostream* report) {
    CheckRow row{name};
    auto big = build_big_dfa(p);
    row.oracle_states = big.num_states();
    row.oracle_live = big.live_count();
    try {
        auto cp = build(p);
        for (const auto& v : cp->vars) row.engine_states += v.mdfa.num_states();
    } catch (const InfeasibleProblem&) {
    }
    for (const auto& trace : traces) {
        auto found = check_equivalence(p, trace);
        row.divergences += found.size();
        for (const auto& d : found) {
            std::cout << d.to_json().dump() << '\n';
            if (report) *report << d.to_json().dump() << '\n';
        }
    }
    return row;
}

void print_table(const std::vector<CheckRow>& rows) {
    std::cout << "problem\tengine_mdfa_states\toracle_states\toracle_live_states\tdivergences\n";
    for (const auto& r : rows)
        std::cout << r.name << '\t' << r.engine_states << '\t' << r.oracle_states << '\t' << r.oracle_live << '\t'
                  << r.divergences << '\n';
}

int cmd_check(const std::string& file, std::size_t random, std::uint64_t seed, std::size_t traces,
              const std::string& report_path) {
    std::unique_ptr<std::ofstream> report;
    if (!report_path.empty()) report = std::make_unique<std::ofstream>(report_path);
    std::mt19937_64 rng(seed);
    std::vector<CheckRow> rows;
    if (!file.empty()) {
        auto p = load_problem(file);
        std::vector<std::vector<Action>> ts{{}};
        for (std::size_t t = 0; t < traces; ++t) ts.push_back(random_trace(rng, *p));
        rows.push_back(check_one(file, p, ts, report.get()));
    }
    for (std::size_t k = 0; k < random; ++k) {
        auto p = std::make_shared<const Problem>(random_problem(rng));
        rows.push_back(check_one("random#" + std::to_string(k), p, {random_trace(rng, *p)}, report.get()));
    }
    print_table(rows);
    std::size_t total = 0;
    for (const auto& r : rows) total += r.divergences;
    std::cout << (total == 0 ? "no divergences" : std::to_string(total) + " divergences") << '\n';
    return total == 0 ? kOk : kDivergence;
}

std::string value_set_text(const ValueSet& set) {
    std::string s = "{";
    for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ", " : "") + to_string(set[i]);
    return s + "}";
}

int cmd_inspect(const std::string& file, const std::string& var, bool keep_dead) {
    auto p = load_problem(file);
    std::size_t i;
    try {
        i = p->variable_index(var);
    } catch (const UnknownVariable& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    }
    std::cout << "variable " << var << ", k=" << p->atoms_of(i).size() << '\n';
    for (auto a : p->atoms_of(i)) std::cout << "  atom " << p->atoms()[a].index_in_variable + 1 << ": " << p->atoms()[a].regex << '\n';

    auto show = [&](const Mdfa& m, const ReachSets& r) {
        auto live = mdfa_live_states(m);
        std::istringstream lines(dump(m));
        std::string line;
        for (State q = 0; std::getline(lines, line); ++q)
            if (keep_dead || live[q]) std::cout << line << '\n';
        std::cout << "reachable acceptance values:\n";
        for (State q = 0; q < m.num_states(); ++q)
            if (keep_dead || live[q]) std::cout << "  R(" << q << ") = " << value_set_text(r[q]) << '\n';
    };

    Mdfa raw = variable_mdfa(*p, i);
    std::cout << "MDFA as constructed (" << raw.num_states() << " states, " << mdfa_live_state_count(raw)
              << " live):\n";
    show(raw, compute_reachable_acceptance_values(raw));
    try {
        auto cp = build(p);
        const auto& v = cp->vars[i];
        std::cout << "MDFA after build (" << v.mdfa.num_states() << " states):\n";
        show(v.mdfa, v.reach);
    } catch (const InfeasibleProblem& e) {
        std::cout << e.what() << '\n';
    }
    return kOk;
}

void print_domains(const Session& s, std::ostream& out) {
    for (std::size_t i = 0; i < s.num_vars(); ++i)
        out << s.problem().variables()[i] << ": " << s.valid_domain_regex(i) << '\n';
}

int cmd_repl(const std::string& file) {
    auto p = load_problem(file);
    std::unique_ptr<Session> session;
    try {
        session = std::make_unique<Session>(build(p));
    } catch (const InfeasibleProblem& e) {
        std::cout << e.what() << '\n';
        return kOk;
    }
    Session& s = *session;
    const bool interactive = isatty(0);
    std::string line;
    while (true) {
        if (interactive) std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        std::istringstream in(line);
        std::string cmd, var;
        in >> cmd;
        if (cmd.empty() || cmd[0] == '#') continue;
        try {
            if (cmd == "quit" || cmd == "exit") break;
            if (cmd == "append") {
                in >> var;
                std::string text;
                std::getline(in, text);
                if (!text.empty() && text[0] == ' ') text.erase(0, 1);
                s.append(var, text);
                print_domains(s, std::cout);
            } else if (cmd == "complete") {
                in >> var;
                s.complete(var);
                print_domains(s, std::cout);
            } else if (cmd == "undo") {
                s.undo();
                print_domains(s, std::cout);
            } else if (cmd == "domain") {
                in >> var;
                std::cout << s.valid_domain_regex(var) << '\n';
            } else if (cmd == "suggest") {
                std::size_t k = 5;
                in >> var >> k;
                for (const auto& w : s.suggestions(s.index(var), k, 32)) std::cout << '"' << w << "\"\n";
            } else if (cmd == "state") {
                for (std::size_t i = 0; i < s.num_vars(); ++i)
                    std::cout << s.problem().variables()[i] << " = \"" << s.value_text(i) << '"'
                              << (s.completed(i) ? " (completed)" : "") << ", domain " << s.valid_domain_regex(i)
                              << '\n';
            } else {
                std::cout << "unknown command: " << cmd << '\n';
            }
        } catch (const Error& e) {
            std::cout << e.what() << '\n';
        }
    }
    return kOk;
}

int cmd_serve(const std::string& addr, int port, const std::string& snapshot_dir, const std::string& static_dir) {
    // SIGINT/SIGTERM are taken by a watcher thread so shutdown can flush snapshots.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Service::Options options;
    if (!snapshot_dir.empty()) options.snapshot_dir = snapshot_dir;
    if (!static_dir.empty()) options.static_dir = static_dir;
    Service service(options);
    if (!service.bind(addr, port)) {
        std::cerr << "cannot bind " << addr << ":" << port << '\n';
        return kUsage;
    }
    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
    });
    watcher.detach();
    std::cout << "listening on " << addr << ":" << port << std::endl;
    service.listen();
    service.store().flush();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"String configuration engine"};
    app.require_subcommand(1);

    std::string file, var, report, snapshot_dir, static_dir, addr = "127.0.0.1";
    std::size_t random = 0, traces = 20;
    std::uint64_t seed = 1;
    bool keep_dead = false;
    int port = 8080;

    auto* check = app.add_subcommand("check", "differential check of engine against the product automaton");
    check->add_option("file", file, "problem file");
    check->add_option("--random", random, "number of random problems");
    check->add_option("--seed", seed, "random seed");
    check->add_option("--traces", traces, "random traces per problem file");
    check->add_option("--report", report, "write divergences as JSON lines");

    auto* repl = app.add_subcommand("repl", "interactive session");
    repl->add_option("file", file, "problem file")->required();

    auto* inspect = app.add_subcommand("inspect", "dump a variable's MDFA and reachable values");
    inspect->add_option("file", file, "problem file")->required();
    inspect->add_option("--var", var, "variable name")->required();
    inspect->add_flag("--keep-dead", keep_dead, "also list states with no acceptance reachable");

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--addr", addr, "bind address");
    serve->add_option("--port", port, "port");
    serve->add_option("--snapshot-dir", snapshot_dir, "persist sessions here");
    serve->add_option("--static-dir", static_dir, "serve files from here at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*check) {
            if (file.empty() && random == 0) {
                std::cerr << "check needs a problem file or --random n\n";
                return kUsage;
            }
            return cmd_check(file, random, seed, traces, report);
        }
        if (*repl) return cmd_repl(file);
        if (*inspect) return cmd_inspect(file, var, keep_dead);
        if (*serve) return cmd_serve(addr, port, snapshot_dir, static_dir);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "strconf/engine.hpp"

namespace strconf {

/// An error with an HTTP status and the `{"error", "detail"}` body the API returns.
struct HttpError : Error {
    int status;
    nlohmann::ordered_json detail;

    HttpError(int status, const std::string& error, nlohmann::ordered_json detail = nlohmann::ordered_json::object())
        : Error(error), status(status), detail(std::move(detail)) {}
};

/// Per-variable payload shared by every state-returning endpoint.
inline nlohmann::ordered_json session_state(const Session& s) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    const auto& vars = s.problem().variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        nlohmann::ordered_json v;
        v["value"] = s.value_text(i);
        v["completed"] = s.completed(i);
        v["can_complete"] = s.can_complete(i);
        v["domain_regex"] = s.valid_domain_regex(i);
        out[vars[i]] = std::move(v);
    }
    return out;
}

/// Problems and sessions by id, with optional write-through snapshots of sessions.
class SessionStore {
  public:
    struct ProblemEntry {
        std::shared_ptr<const CompiledProblem> compiled;
        nlohmann::ordered_json source;
    };

    struct SessionEntry {
        std::string id;
        std::string problem_id;
        std::shared_ptr<ProblemEntry> problem;
        std::unique_ptr<Session> session;
        nlohmann::ordered_json trace = nlohmann::ordered_json::array();
        std::mutex mu; // serializes mutations
    };

    explicit SessionStore(std::optional<std::filesystem::path> snapshot_dir = std::nullopt)
        : snapshot_dir_(std::move(snapshot_dir)), rng_(std::random_device{}()) {
        if (snapshot_dir_) std::filesystem::create_directories(*snapshot_dir_);
    }

    /// Validates and builds a problem file; returns its id.
    std::string add_problem(const nlohmann::json& body) {
        auto entry = compile(body);
        std::lock_guard lock(mu_);
        std::string id = fresh_id();
        problems_.emplace(id, std::move(entry));
        return id;
    }

    std::shared_ptr<ProblemEntry> problem(const std::string& id) const {
        std::lock_guard lock(mu_);
        auto it = problems_.find(id);
        if (it == problems_.end()) throw HttpError(404, "unknown problem", {{"problem_id", id}});
        return it->second;
    }

    std::shared_ptr<SessionEntry> create_session(const std::string& problem_id) {
        auto p = problem(problem_id);
        auto entry = std::make_shared<SessionEntry>();
        entry->problem_id = problem_id;
        entry->problem = p;
        entry->session = std::make_unique<Session>(p->compiled);
        {
            std::lock_guard lock(mu_);
            entry->id = fresh_id();
            sessions_.emplace(entry->id, entry);
        }
        persist(*entry);
        return entry;
    }

    std::shared_ptr<SessionEntry> session(const std::string& id) const {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw HttpError(404, "unknown session", {{"session_id", id}});
        return it->second;
    }

    /// Runs one mutation under the session's lock and records it in the trace.
    /// `op` is "append", "complete" or "undo".
    void mutate(SessionEntry& e, const std::string& op, const std::string& variable, const std::string& text) {
        std::lock_guard lock(e.mu);
        apply(e, op, variable, text);
        persist(e);
    }

    /// Writes every session snapshot now.
    void flush() {
        std::vector<std::shared_ptr<SessionEntry>> all;
        {
            std::lock_guard lock(mu_);
            for (auto& [id, e] : sessions_) all.push_back(e);
        }
        for (auto& e : all) {
            std::lock_guard lock(e->mu);
            persist(*e);
        }
    }

    /// Loads every snapshot in the snapshot directory by replaying its trace.
    std::size_t restore() {
        if (!snapshot_dir_) return 0;
        std::size_t n = 0;
        for (const auto& file : std::filesystem::directory_iterator(*snapshot_dir_)) {
            if (file.path().extension() != ".json") continue;
            std::ifstream in(file.path());
            auto snap = nlohmann::ordered_json::parse(in, nullptr, false);
            if (snap.is_discarded() || !snap.contains("problem") || !snap.contains("trace")) continue;
            std::string pid = snap.value("problem_id", std::string());
            std::shared_ptr<ProblemEntry> p;
            {
                std::lock_guard lock(mu_);
                if (auto it = problems_.find(pid); it != problems_.end()) p = it->second;
            }
            if (!p) {
                p = compile(snap["problem"]);
                std::lock_guard lock(mu_);
                if (pid.empty()) pid = fresh_id();
                p = problems_.emplace(pid, p).first->second;
            }
            auto entry = std::make_shared<SessionEntry>();
            entry->id = file.path().stem().string();
            entry->problem_id = pid;
            entry->problem = p;
            entry->session = std::make_unique<Session>(p->compiled);
            for (const auto& step : snap["trace"])
                apply(*entry, step.value("op", std::string()), step.value("variable", std::string()),
                      step.value("text", std::string()));
            std::lock_guard lock(mu_);
            sessions_[entry->id] = entry;
            ++n;
        }
        return n;
    }

  private:
    std::optional<std::filesystem::path> snapshot_dir_;
    mutable std::mutex mu_;
    std::mt19937_64 rng_;
    std::map<std::string, std::shared_ptr<ProblemEntry>> problems_;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;

    std::string fresh_id() {
        static const char* hex = "0123456789abcdef";
        std::string id;
        for (int half = 0; half < 2; ++half) {
            auto r = rng_();
            for (int i = 0; i < 16; ++i, r >>= 4) id += hex[r & 15];
        }
        return id;
    }

    static std::shared_ptr<ProblemEntry> compile(const nlohmann::json& body) {
        auto entry = std::make_shared<ProblemEntry>();
        auto problem = std::make_shared<const Problem>(Problem::from_json(body));
        entry->source = problem->to_json();
        entry->compiled = build(problem);
        return entry;
    }

    static void apply(SessionEntry& e, const std::string& op, const std::string& variable, const std::string& text) {
        Session& s = *e.session;
        if (op == "undo") {
            s.undo();
            if (!e.trace.empty()) e.trace.erase(e.trace.end() - 1);
            return;
        }
        std::size_t i = s.index(variable);
        if (op == "append")
            s.append(i, text);
        else if (op == "complete")
            s.complete(i);
        else
            throw HttpError(400, "unknown operation", {{"op", op}});
        e.trace.push_back({{"op", op}, {"variable", variable}, {"text", text}});
    }

    void persist(const SessionEntry& e) const {
        if (!snapshot_dir_) return;
        nlohmann::ordered_json snap;
        snap["problem"] = e.problem->source;
        snap["problem_id"] = e.problem_id;
        snap["trace"] = e.trace;
        auto path = *snapshot_dir_ / (e.id + ".json");
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << snap.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path);
    }
};

struct ServiceOptions {
    std::optional<std::filesystem::path> snapshot_dir;
    std::optional<std::filesystem::path> static_dir;
    std::size_t default_suggestions = 5;
    std::size_t default_max_len = 32;
};

/// The HTTP API over a SessionStore.
class Service {
  public:
    using Options = ServiceOptions;

    explicit Service(Options options = {}) : options_(std::move(options)), store_(options_.snapshot_dir) {
        store_.restore();
        routes();
    }

    httplib::Server& server() { return server_; }
    SessionStore& store() { return store_; }

    bool bind(const std::string& addr, int port) { return server_.bind_to_port(addr, port); }
    int bind_any(const std::string& addr) { return server_.bind_to_any_port(addr); }
    bool listen() { return server_.listen_after_bind(); }
    void stop() {
        server_.stop();
        store_.flush();
    }

  private:
    Options options_;
    SessionStore store_;
    httplib::Server server_;

    static constexpr const char* kJson = "application/json; charset=utf-8";

    static void send(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
        res.status = status;
        res.set_content(body.dump(), kJson);
    }

    static void send_error(httplib::Response& res, int status, const std::string& error,
                           nlohmann::ordered_json detail = nlohmann::ordered_json::object()) {
        nlohmann::ordered_json body;
        body["error"] = error;
        body["detail"] = std::move(detail);
        send(res, status, body);
    }

    /// Runs a handler, translating library errors to status codes.
    template <class F>
    static void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const HttpError& e) {
            send_error(res, e.status, e.what(), e.detail);
        } catch (const SyntaxError& e) {
            send_error(res, 400, e.what(), {{"position", e.position()}, {"expected", e.expected()}});
        } catch (const LetterOutsideAlphabet& e) {
            send_error(res, 400, e.what(), {{"letter", e.letter()}});
        } catch (const InfeasibleProblem& e) {
            send_error(res, 422, e.what());
        } catch (const InvalidAppend& e) {
            send_error(res, 409, e.what());
        } catch (const VariableCompleted& e) {
            send_error(res, 409, e.what());
        } catch (const CompletionDisabled& e) {
            send_error(res, 409, e.what());
        } catch (const NothingToUndo& e) {
            send_error(res, 409, e.what());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, 400, "malformed request body", {{"message", e.what()}});
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        }
    }

    static nlohmann::json body_of(const httplib::Request& req) {
        auto j = nlohmann::json::parse(req.body, nullptr, false);
        if (j.is_discarded()) throw HttpError(400, "malformed JSON");
        return j;
    }

    static std::string field(const nlohmann::json& j, const char* name) {
        if (!j.is_object() || !j.contains(name) || !j[name].is_string())
            throw HttpError(400, std::string("missing string field: ") + name);
        return j[name].get<std::string>();
    }

    static std::size_t count_param(const httplib::Request& req, const char* name, std::size_t fallback) {
        if (!req.has_param(name)) return fallback;
        const std::string v = req.get_param_value(name);
        std::size_t n = 0;
        std::istringstream in(v);
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || !(in >> n) || n == 0 ||
            n > 1'000'000)
            throw HttpError(400, std::string("bad parameter: ") + name, {{name, v}});
        return n;
    }

    nlohmann::ordered_json mutation(const httplib::Request& req, const std::string& op) {
        auto e = store_.session(req.path_params.at("id"));
        std::string variable, text;
        if (op != "undo") {
            auto body = body_of(req);
            variable = field(body, "variable");
            if (op == "append") text = field(body, "text");
            try {
                e->session->index(variable);
            } catch (const UnknownVariable& u) {
                throw HttpError(400, u.what(), {{"variable", variable}});
            }
        }
        store_.mutate(*e, op, variable, text);
        return session_state(*e->session);
    }

    void routes() {
        server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            send(res, 200, {{"ok", true}});
        });

        server_.Post("/v1/problems", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto body = body_of(req);
                std::string id;
                try {
                    id = store_.add_problem(body);
                } catch (const InvalidProblem& e) {
                    throw HttpError(400, e.what());
                }
                const auto& cp = *store_.problem(id)->compiled;
                nlohmann::ordered_json stats;
                stats["vars"] = cp.num_vars();
                stats["atoms"] = cp.problem->atoms().size();
                stats["mdfa_states"] = nlohmann::ordered_json::array();
                for (const auto& v : cp.vars) stats["mdfa_states"].push_back(v.mdfa.num_states());
                send(res, 201, {{"problem_id", id}, {"stats", stats}});
            });
        });

        server_.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto e = store_.create_session(field(body_of(req), "problem_id"));
                nlohmann::ordered_json out;
                out["session_id"] = e->id;
                out["state"] = session_state(*e->session);
                send(res, 201, out);
            });
        });

        for (const char* op : {"append", "complete", "undo"}) {
            server_.Post(std::string("/v1/sessions/:id/") + op,
                         [this, op = std::string(op)](const httplib::Request& req, httplib::Response& res) {
                             guarded(res, [&] { send(res, 200, mutation(req, op)); });
                         });
        }

        server_.Get("/v1/sessions/:id/domain/:variable", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto e = store_.session(req.path_params.at("id"));
                const std::string& name = req.path_params.at("variable");
                std::size_t k = count_param(req, "suggest", options_.default_suggestions);
                std::size_t max_len = count_param(req, "max_len", options_.default_max_len);
                const Session& s = *e->session;
                std::size_t i;
                try {
                    i = s.index(name);
                } catch (const UnknownVariable& u) {
                    throw HttpError(404, u.what(), {{"variable", name}});
                }
                std::lock_guard lock(e->mu);
                nlohmann::ordered_json out;
                out["regex"] = s.valid_domain_regex(i);
                out["can_complete"] = s.can_complete(i);
                auto& letters = out["next_letters"] = nlohmann::ordered_json::array();
                for (Letter l : s.next_letters(i)) letters.push_back(s.alphabet()->render(l));
                out["suggestions"] = s.suggestions(i, k, max_len);
                send(res, 200, out);
            });
        });

        if (options_.static_dir) server_.set_mount_point("/", options_.static_dir->string());
    }
};

} // namespace strconf

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "strconf/service.hpp"

using namespace strconf;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(STRCONF_DATA_DIR) + "/" + name);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// A service on an ephemeral port with a client pointed at it.
class Live {
  public:
    explicit Live(ServiceOptions options = {}) : service_(std::move(options)) {
        port_ = service_.bind_any("127.0.0.1");
        thread_ = std::thread([this] { service_.listen(); });
        service_.server().wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }
    ~Live() {
        service_.stop();
        thread_.join();
    }

    httplib::Result post(const std::string& path, const std::string& body) {
        return client_->Post(path, body, "application/json");
    }
    httplib::Result get(const std::string& path) { return client_->Get(path); }

    std::string problem(const std::string& file) {
        auto r = post("/v1/problems", fixture(file));
        EXPECT_EQ(r->status, 201) << r->body;
        return json::parse(r->body)["problem_id"];
    }

    std::string session(const std::string& problem_id) {
        auto r = post("/v1/sessions", json{{"problem_id", problem_id}}.dump());
        EXPECT_EQ(r->status, 201) << r->body;
        return json::parse(r->body)["session_id"];
    }

    httplib::Result append(const std::string& sid, const std::string& var, const std::string& text) {
        return post("/v1/sessions/" + sid + "/append", json{{"variable", var}, {"text", text}}.dump());
    }

    Service& service() { return service_; }
    int port() const { return port_; }

  private:
    Service service_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

bool regex_is(const std::string& regex, const std::string& expect, const AlphabetPtr& a) {
    return dfa_language_equivalent(compile_dfa(regex, a), compile_dfa(expect, a));
}

} // namespace

TEST(Service, Health) {
    Live live;
    auto r = live.get("/v1/health");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "application/json; charset=utf-8");
}

TEST(Service, CreateProblem) {
    Live live;
    auto r = live.post("/v1/problems", fixture("worked_example.json"));
    ASSERT_EQ(r->status, 201);
    auto body = json::parse(r->body);
    EXPECT_EQ(body["stats"]["atoms"], 3);
    EXPECT_EQ(body["stats"]["vars"], 2);
    EXPECT_EQ(body["stats"]["mdfa_states"].size(), 2u);
    EXPECT_EQ(body["problem_id"].get<std::string>().size(), 32u);

    r = live.post("/v1/problems", fixture("contradiction.json"));
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(json::parse(r->body)["error"], "No feasible solutions");

    r = live.post("/v1/problems", R"j({"alphabet":["a"],"variables":["x"],"constraints":["match(x,\"a|\")"]})j");
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(json::parse(r->body)["detail"]["position"], 2);

    r = live.post("/v1/problems", "{not json");
    EXPECT_EQ(r->status, 400);
    EXPECT_TRUE(json::parse(r->body).contains("error"));
}

TEST(Service, Sessions) {
    Live live;
    auto pid = live.problem("worked_example.json");
    auto r = live.post("/v1/sessions", json{{"problem_id", pid}}.dump());
    ASSERT_EQ(r->status, 201);
    auto body = json::parse(r->body);
    auto a = Alphabet::from_string("abcd");
    EXPECT_TRUE(regex_is(body["state"]["x2"]["domain_regex"], "abd*", a));
    EXPECT_EQ(body["state"]["x2"]["value"], "");
    EXPECT_EQ(body["state"]["x2"]["completed"], false);
    EXPECT_NE(live.session(pid), live.session(pid));
    EXPECT_EQ(live.post("/v1/sessions", json{{"problem_id", "nope"}}.dump())->status, 404);
}

TEST(Service, AppendAndDomain) {
    Live live;
    auto sid = live.session(live.problem("big_dfa_example.json"));
    auto a = Alphabet::from_string("abcd");
    EXPECT_EQ(live.append(sid, "x1", "a")->status, 200);
    auto r = live.append(sid, "x2", "ab");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body)["x2"]["value"], "ab");

    auto before = live.get("/v1/sessions/" + sid + "/domain/x2?suggest=2");
    ASSERT_EQ(before->status, 200);
    auto d = json::parse(before->body);
    EXPECT_TRUE(regex_is(d["regex"], "d*", a));
    EXPECT_EQ(d["next_letters"], json::array({"d"}));
    EXPECT_EQ(d["suggestions"], json::array({"", "d"}));
    EXPECT_EQ(d["can_complete"], false);

    r = live.append(sid, "x2", "c");
    EXPECT_EQ(r->status, 409);
    EXPECT_EQ(json::parse(r->body)["error"], "invalid append");
    auto after = live.get("/v1/sessions/" + sid + "/domain/x2?suggest=2");
    EXPECT_EQ(after->body, before->body);

    EXPECT_EQ(live.append(sid, "x2", "e")->status, 400);
    EXPECT_EQ(live.append(sid, "nope", "a")->status, 400);
    EXPECT_EQ(live.append("missing", "x2", "a")->status, 404);
    EXPECT_EQ(live.post("/v1/sessions/" + sid + "/append", "{}")->status, 400);
    EXPECT_EQ(live.get("/v1/sessions/" + sid + "/domain/nope")->status, 404);
    EXPECT_EQ(live.get("/v1/sessions/" + sid + "/domain/x2?suggest=0")->status, 400);
    EXPECT_EQ(live.get("/v1/sessions/" + sid + "/domain/x2?max_len=x")->status, 400);
    EXPECT_EQ(live.get("/v1/sessions/missing/domain/x2")->status, 404);
}

TEST(Service, Unconstrained) {
    Live live;
    auto r = live.post("/v1/problems", R"({"alphabet":["a","b"],"variables":["x"]})");
    auto sid = live.session(json::parse(r->body)["problem_id"]);
    auto d = json::parse(live.get("/v1/sessions/" + sid + "/domain/x")->body);
    EXPECT_EQ(d["next_letters"], json::array({"a", "b"}));
}

TEST(Service, CompleteAndUndo) {
    Live live;
    auto sid = live.session(live.problem("complete_example.json"));
    EXPECT_EQ(live.post("/v1/sessions/" + sid + "/undo", "")->status, 409);
    EXPECT_EQ(live.append(sid, "x", "a")->status, 200);
    auto complete = [&] { return live.post("/v1/sessions/" + sid + "/complete", json{{"variable", "x"}}.dump()); };
    EXPECT_EQ(complete()->status, 409);
    EXPECT_EQ(live.append(sid, "x", "b")->status, 200);
    auto r = complete();
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body)["x"]["completed"], true);
    EXPECT_EQ(json::parse(r->body)["x"]["value"], "ab$");
    EXPECT_EQ(live.append(sid, "x", "a")->status, 409);
    r = live.post("/v1/sessions/" + sid + "/undo", "");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body)["x"]["completed"], false);
    EXPECT_EQ(json::parse(r->body)["x"]["can_complete"], true);

    auto other = live.session(live.problem("worked_example.json"));
    EXPECT_EQ(live.post("/v1/sessions/" + other + "/complete", json{{"variable", "x1"}}.dump())->status, 409);
}

TEST(Service, ConcurrentAppendsAreSerialized) {
    Live live;
    auto r = live.post("/v1/problems", R"({"alphabet":["a","b"],"variables":["x"]})");
    auto sid = live.session(json::parse(r->body)["problem_id"]);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] {
            httplib::Client c("127.0.0.1", live.port());
            const std::string body = json{{"variable", "x"}, {"text", t % 2 ? "ab" : "ba"}}.dump();
            for (int k = 0; k < 10; ++k) c.Post("/v1/sessions/" + sid + "/append", body, "application/json");
        });
    for (auto& t : threads) t.join();
    auto value = json::parse(live.append(sid, "x", "a")->body)["x"]["value"].get<std::string>();
    ASSERT_EQ(value.size(), 161u);
    for (std::size_t i = 0; i + 1 < value.size(); i += 2) EXPECT_NE(value[i], value[i + 1]);
}

TEST(Service, SnapshotsSurviveRestart) {
    auto dir = std::filesystem::temp_directory_path() / ("strconf-snap-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::string sid, before;
    {
        Live live(ServiceOptions{dir, std::nullopt});
        sid = live.session(live.problem("worked_example.json"));
        live.append(sid, "x1", "a");
        live.append(sid, "x2", "ab");
        live.append(sid, "x2", "d");
        live.post("/v1/sessions/" + sid + "/undo", "");
        before = live.get("/v1/sessions/" + sid + "/domain/x2")->body;
        std::ifstream in(dir / (sid + ".json"));
        auto snap = json::parse(in);
        EXPECT_EQ(snap["trace"].size(), 2u);
        EXPECT_TRUE(snap.contains("problem"));
    }
    {
        Live live(ServiceOptions{dir, std::nullopt});
        EXPECT_EQ(live.get("/v1/sessions/" + sid + "/domain/x2")->body, before);
        auto r = live.append(sid, "x2", "d");
        ASSERT_EQ(r->status, 200);
        EXPECT_EQ(json::parse(r->body)["x2"]["value"], "abd");
    }
    std::filesystem::remove_all(dir);
}

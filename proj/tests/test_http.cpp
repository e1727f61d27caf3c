// Loopback-server tests for the two HTTP surfaces: remote news fetch and the
// chat-completion backend.

#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fslab/agents/backend.hpp"
#include "fslab/error.hpp"
#include "fslab/experiment.hpp"
#include "fslab/market_data.hpp"
#include "test_support.hpp"

using namespace fslab;
using nlohmann::json;

namespace {

class LocalServer {
public:
    LocalServer() = default;
    ~LocalServer() { stop(); }

    std::string start() {
        port_ = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
        return "http://127.0.0.1:" + std::to_string(port_);
    }

    void stop() {
        if (thread_.joinable()) {
            server.stop();
            thread_.join();
        }
    }

    httplib::Server server;

private:
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST_CASE("fetch_news_remote") {
    LocalServer srv;
    json seen_params;
    srv.server.Get("/news", [&](const httplib::Request& req, httplib::Response& res) {
        seen_params = json::object();
        for (const auto& [k, v] : req.params) seen_params[k] = v;
        const json articles = json::array(
            {{{"date", "2024-01-24"}, {"title", "up"}, {"body", "b"}, {"source", "Wire"}},
             {{"date", "2024-01-25"}, {"title", "down"}, {"body", "b"}, {"source", "Blog"}}});
        res.set_content(articles.dump(), "application/json");
    });
    srv.server.Get("/limited", [](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "7");
    });
    srv.server.Get("/empty", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("", "application/json");
    });
    const auto base = srv.start();

    const market::DateRange range{Date::from_iso("2024-01-24"), Date::from_iso("2024-01-31")};

    SUBCASE("passes the documented query parameters and returns the feed") {
        const auto feed = market::fetch_news_remote("BTC", range, base + "/news");
        CHECK(feed.size() == 2);
        CHECK(seen_params.at("keyword") == "BTC");
        CHECK(seen_params.at("from") == "2024-01-24");
        CHECK(seen_params.at("to") == "2024-01-31");
        CHECK(seen_params.at("lang") == "en");
    }
    SUBCASE("source allowlist filters publishers") {
        const std::vector<std::string> allow{"Wire"};
        const auto feed = market::fetch_news_remote("BTC", range, base + "/news", allow);
        REQUIRE(feed.size() == 1);
        CHECK(feed.articles()[0].source == "Wire");
    }
    SUBCASE("articles outside the requested range are dropped") {
        const market::DateRange narrow{Date::from_iso("2024-01-25"),
                                       Date::from_iso("2024-01-25")};
        const auto feed = market::fetch_news_remote("BTC", narrow, base + "/news");
        REQUIRE(feed.size() == 1);
        CHECK(feed.articles()[0].title == "down");
    }
    SUBCASE("rate limits surface with the advertised wait") {
        try {
            market::fetch_news_remote("BTC", range, base + "/limited");
            FAIL("expected RateLimitError");
        } catch (const RateLimitError& e) {
            CHECK(e.retry_after_seconds() == 7);
        }
    }
    SUBCASE("empty body is an empty feed") {
        CHECK(market::fetch_news_remote("BTC", range, base + "/empty").size() == 0);
    }
    SUBCASE("unreachable endpoint is a transport error") {
        CHECK_THROWS_AS(market::fetch_news_remote("BTC", range, "http://127.0.0.1:1/news"),
                        BackendError);
    }
    SUBCASE("empty range is rejected") {
        const market::DateRange bad{Date::from_iso("2024-01-25"), Date::from_iso("2024-01-24")};
        CHECK_THROWS_AS(market::fetch_news_remote("BTC", bad, base + "/news"), DomainError);
    }
}

TEST_CASE("http backend") {
    LocalServer srv;
    json seen_body;
    std::string seen_auth;
    srv.server.Post("/v1/chat/completions",
                    [&](const httplib::Request& req, httplib::Response& res) {
                        seen_body = json::parse(req.body);
                        seen_auth = req.get_header_value("Authorization");
                        const json reply = {
                            {"choices",
                             json::array({{{"message", {{"role", "assistant"},
                                                        {"content", "Action: 0.2"}}}}})}};
                        res.set_content(reply.dump(), "application/json");
                    });
    srv.server.Post("/plain", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(json({{"content", "plain text reply"}}).dump(), "application/json");
    });
    srv.server.Post("/limited", [](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "3");
    });
    srv.server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    srv.server.Post("/notjson", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>", "text/html");
    });
    const auto base = srv.start();

    SUBCASE("posts the documented body and bearer token") {
        setenv("FSLAB_TEST_KEY", "sekrit", 1);
        agents::HttpBackend backend(base + "/v1/chat/completions", "model-x", "FSLAB_TEST_KEY");
        agents::ChatRequest request;
        request.system = "sys";
        request.user = "hello";
        request.temperature = 0.0;
        CHECK(backend.complete(request) == "Action: 0.2");
        CHECK(seen_auth == "Bearer sekrit");
        CHECK(seen_body.at("model") == "model-x");
        CHECK(seen_body.at("temperature") == 0.0);
        REQUIRE(seen_body.at("messages").size() == 2);
        CHECK(seen_body.at("messages")[0].at("role") == "system");
        CHECK(seen_body.at("messages")[1].at("content") == "hello");
        unsetenv("FSLAB_TEST_KEY");
    }
    SUBCASE("system message is omitted when empty") {
        agents::HttpBackend backend(base + "/v1/chat/completions", "model-x", "FSLAB_TEST_KEY");
        agents::ChatRequest request;
        request.user = "hi";
        backend.complete(request);
        REQUIRE(seen_body.at("messages").size() == 1);
        CHECK(seen_body.at("messages")[0].at("role") == "user");
    }
    SUBCASE("top-level content fallback") {
        agents::HttpBackend backend(base + "/plain", "m");
        CHECK(backend.complete({}) == "plain text reply");
    }
    SUBCASE("429 surfaces as a rate limit") {
        agents::HttpBackend backend(base + "/limited", "m");
        try {
            backend.complete({});
            FAIL("expected RateLimitError");
        } catch (const RateLimitError& e) {
            CHECK(e.retry_after_seconds() == 3);
        }
    }
    SUBCASE("HTTP errors and junk replies are backend errors") {
        agents::HttpBackend broken(base + "/broken", "m");
        CHECK_THROWS_AS(broken.complete({}), BackendError);
        agents::HttpBackend notjson(base + "/notjson", "m");
        CHECK_THROWS_AS(notjson.complete({}), BackendError);
    }
}

TEST_CASE("agent backtest through a live-style backend") {
    LocalServer srv;
    int calls = 0;
    srv.server.Post("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                        ++calls;
                        const json reply = {
                            {"choices",
                             json::array({{{"message",
                                            {{"role", "assistant"},
                                             {"content", "All reports considered. Action: 0.1"}}}}})}};
                        res.set_content(reply.dump(), "application/json");
                    });
    const auto base = srv.start();

    json config;
    config["asset"] = "BTC";
    config["split"] = {{"kind", "validation"},
                       {"start_date", "2024-01-24"},
                       {"end_date", "2024-01-27"},
                       {"start_price", 39877.59},
                       {"end_price", 40000.0}};
    config["market_csv"] = testsupport::repo_path("data/btc_test_bull.csv").string();
    config["strategy"] = "agent";
    config["backend"] = {{"kind", "http"},
                         {"endpoint", base + "/v1/chat/completions"},
                         {"model", "test-model"}};

    const auto report = fslab::experiment::run_backtest(config);
    CHECK(report.at("records").size() == 3);
    // three days: 6 calls cold start, then 7 and 7
    CHECK(calls == 6 + 7 + 7);
    CHECK(report.at("counters").at("backend_calls") == calls);
    for (const auto& d : report.at("decisions")) CHECK(d.at("action") == 0.1);
}

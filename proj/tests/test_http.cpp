#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sgp/http_backends.hpp"

using namespace sgp;
using nlohmann::json;

namespace {

// Local stub service implementing the wire contract, with a scripted number
// of transient failures before success.
class StubService {
public:
    StubService() {
        server_.Post("/v1/generate", [this](const httplib::Request& req,
                                            httplib::Response& res) {
            ++generate_calls;
            last_auth = req.get_header_value("Authorization");
            if (fail_next > 0) {
                --fail_next;
                res.status = 503;
                return;
            }
            json body = json::parse(req.body);
            json out = {{"output", "person:elise | feels | emotion:joy\n"}};
            res.set_content(out.dump(), "application/json");
            (void)body;
        });
        server_.Post("/v1/embed", [this](const httplib::Request& req,
                                         httplib::Response& res) {
            ++embed_calls;
            json body = json::parse(req.body);
            json embeddings = json::array();
            for (size_t i = 0; i < body.at("inputs").size(); ++i) {
                embeddings.push_back(std::vector<double>{1.0, 0.0, static_cast<double>(i)});
            }
            res.set_content(json{{"embeddings", embeddings}}.dump(), "application/json");
        });
        server_.Post("/v1/denied", [](const httplib::Request&, httplib::Response& res) {
            res.status = 403;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubService() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> generate_calls{0};
    std::atomic<int> embed_calls{0};
    std::atomic<int> fail_next{0};
    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

HttpBackendConfig generator_config(const StubService& service) {
    HttpBackendConfig cfg;
    cfg.base_url = service.base_url();
    cfg.path = "/v1/generate";
    cfg.model = "stub-model";
    cfg.backoff_ms = 1;
    return cfg;
}

}  // namespace

TEST_CASE("http generator round-trips the wire contract with retries and cache") {
    StubService service;
    HttpBackendConfig cfg = generator_config(service);

    SUBCASE("basic request") {
        HttpGenerator gen(cfg);
        GenParams params;
        CHECK(gen.generate("prompt text", params) ==
              "person:elise | feels | emotion:joy\n");
        CHECK(service.generate_calls == 1);
    }
    SUBCASE("transient 5xx failures are retried") {
        service.fail_next = 2;
        HttpGenerator gen(cfg);
        CHECK(gen.generate("prompt", {}) == "person:elise | feels | emotion:joy\n");
        CHECK(service.generate_calls == 3);
    }
    SUBCASE("retry budget exhausts into a BackendError") {
        service.fail_next = 10;
        cfg.max_retries = 1;
        HttpGenerator gen(cfg);
        CHECK_THROWS_WITH_AS(gen.generate("prompt", {}), doctest::Contains("2 attempts"),
                             BackendError);
    }
    SUBCASE("authorization failures surface immediately") {
        cfg.path = "/v1/denied";
        HttpGenerator gen(cfg);
        CHECK_THROWS_WITH_AS(gen.generate("prompt", {}),
                             doctest::Contains("authorization"), BackendError);
    }
    SUBCASE("responses are cached by (fingerprint, input hash)") {
        auto cache_dir = std::filesystem::temp_directory_path() / "sgp_http_cache_test";
        std::filesystem::remove_all(cache_dir);
        cfg.cache_dir = cache_dir.string();
        HttpGenerator gen(cfg);
        const std::string a = gen.generate("cached prompt", {});
        const std::string b = gen.generate("cached prompt", {});
        CHECK(a == b);
        CHECK(service.generate_calls == 1);  // second hit served from disk
        GenParams other;
        other.seed = 9;
        gen.generate("cached prompt", other);
        CHECK(service.generate_calls == 2);  // seed participates in the key
        std::filesystem::remove_all(cache_dir);
    }
    SUBCASE("request log records hashes only unless full payloads are enabled") {
        auto log_path = std::filesystem::temp_directory_path() / "sgp_http_log_test.txt";
        std::filesystem::remove(log_path);
        cfg.log_file = log_path.string();
        HttpGenerator gen(cfg);
        gen.generate("a very private prompt", {});
        {
            std::ifstream in(log_path);
            std::string all((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
            CHECK(all.find("status=ok") != std::string::npos);
            CHECK(all.find("input_hash=") != std::string::npos);
            CHECK(all.find("private prompt") == std::string::npos);
        }
        cfg.log_full_payloads = true;
        HttpGenerator verbose(cfg);
        verbose.generate("a very private prompt", {});
        {
            std::ifstream in(log_path);
            std::string all((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
            CHECK(all.find("private prompt") != std::string::npos);
        }
        std::filesystem::remove(log_path);
    }
    SUBCASE("credential env is sent and its absence is an error before any query") {
        cfg.api_key_env = "SGP_TEST_API_KEY";
        unsetenv("SGP_TEST_API_KEY");
        CHECK_THROWS_WITH_AS(HttpGenerator{cfg}, doctest::Contains("SGP_TEST_API_KEY"),
                             BackendError);
        CHECK(service.generate_calls == 0);

        setenv("SGP_TEST_API_KEY", "sekret", 1);
        HttpGenerator gen(cfg);
        gen.generate("p", {});
        CHECK(service.last_auth == "Bearer sekret");
        unsetenv("SGP_TEST_API_KEY");
    }
}

TEST_CASE("http embedder validates shape and preserves batch order") {
    StubService service;
    HttpBackendConfig cfg;
    cfg.base_url = service.base_url();
    cfg.path = "/v1/embed";
    cfg.model = "stub-embed";
    cfg.backoff_ms = 1;

    SUBCASE("dimension declaration is required") {
        CHECK_THROWS_AS(HttpEmbedder{cfg}, BackendError);
    }
    SUBCASE("batch order preserved") {
        cfg.embedding_dimension = 3;
        HttpEmbedder emb(cfg);
        auto vs = emb.embed({"a", "b", "c"});
        REQUIRE(vs.size() == 3);
        CHECK(vs[0] == std::vector<double>{1.0, 0.0, 0.0});
        CHECK(vs[2] == std::vector<double>{1.0, 0.0, 2.0});
    }
    SUBCASE("declared dimension mismatch is an error") {
        cfg.embedding_dimension = 5;
        HttpEmbedder emb(cfg);
        CHECK_THROWS_WITH_AS(emb.embed({"a"}), doctest::Contains("dimension mismatch"),
                             BackendError);
    }
}

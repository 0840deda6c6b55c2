#include "support.hpp"

#include "symdist/service.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

namespace symdist {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
protected:
    ServiceTest() : service_(config(), test::fixture_kb()) {}

    static ServiceConfig config() {
        ServiceConfig cfg;
        cfg.bundle_dir = test::fixture_dir();
        cfg.port = 0;
        cfg.admin_token = "secret";
        cfg.max_body_bytes = 4096;
        return cfg;
    }

    json call(std::string_view method, std::string_view path, const json& body, int expected,
              std::string_view token = {}) {
        const HttpResponse r = service_.handle(method, path, body.is_null() ? "" : body.dump(), token);
        EXPECT_EQ(r.status, expected) << path << ": " << r.body;
        return json::parse(r.body);
    }

    Service service_;
};

TEST_F(ServiceTest, HealthCarriesVersions) {
    const json h = call("GET", "/v1/health", nullptr, 200);
    EXPECT_EQ(h.at("status"), "ok");
    EXPECT_EQ(h.at("bundle_version"), test::fixture_kb().bundle_version());
    EXPECT_EQ(h.at("engine_version"), "1.0.0");
    EXPECT_EQ(call("GET", "/health", nullptr, 200), h);
}

TEST_F(ServiceTest, SchemaAndOntology) {
    EXPECT_EQ(call("GET", "/v1/schema", nullptr, 200).at("total_width"), 8);
    const json o = call("GET", "/v1/ontology", nullptr, 200);
    EXPECT_EQ(o.at("tree").at(0).at("code"), "100");
    EXPECT_EQ(o.at("tree").at(0).at("label"), "head");
}

TEST_F(ServiceTest, EncodeDecode) {
    EXPECT_EQ(call("POST", "/v1/encode", {{"values", {100, 2, 3, 4}}}, 200).at("code"), "10000234");
    const json iris = call("POST", "/v1/encode", {{"values", {123, 2, 3, 4}}}, 200);
    EXPECT_EQ(iris.at("code"), "12300234");
    const json d = call("POST", "/v1/decode", {{"code", "60040302"}}, 200);
    EXPECT_EQ(d.at("values"), json({600, 403, 0, 2}));
    EXPECT_EQ(d.at("labels").at(0), "limbs");
    const json bad = call("POST", "/v1/encode", {{"values", {999, 2, 3, 4}}}, 422);
    EXPECT_EQ(bad.at("error").at("kind"), "VALIDATION");
    EXPECT_EQ(bad.at("error").at("witness").at("element_index"), 1);
    EXPECT_EQ(call("POST", "/v1/decode", {{"code", "123456789"}}, 422).at("error").at("kind"), "RANGE");
}

TEST_F(ServiceTest, Distance) {
    EXPECT_EQ(call("POST", "/v1/distance", {{"a", "10000234"}, {"b", "10000234"}}, 200).at("distance"), 0.0);
    const json d = call("POST", "/v1/distance", {{"a", {620, 0, 0, 0}}, {"b", "62100000"}}, 200);
    EXPECT_EQ(d.at("distance"), 2.0);
    EXPECT_EQ(d.at("a"), "62000000");
}

TEST_F(ServiceTest, DiagnoseAndErrors) {
    const json r = call("POST", "/v1/diagnose", {{"symptoms", {"10000234"}}, {"k", 2}}, 200);
    EXPECT_EQ(r.at("case_id"), "anonymous");
    EXPECT_EQ(r.at("entries").size(), 2u);
    EXPECT_EQ(r.at("entries").at(0).at("disease_id"), "D001");

    const json empty = call("POST", "/v1/diagnose", {{"symptoms", json::array()}}, 422);
    EXPECT_EQ(empty.at("error").at("kind"), "VALIDATION");
    EXPECT_TRUE(empty.contains("bundle_version"));
    call("POST", "/v1/diagnose", {{"symptoms", {"10000234"}}, {"k", 0}}, 422);
    call("POST", "/v1/diagnose", {{"symptoms", {"10000234"}}, {"lambda", -2}}, 422);
    EXPECT_EQ(service_.handle("POST", "/v1/diagnose", "{not json").status, 400);
    EXPECT_EQ(service_.handle("POST", "/v1/diagnose", std::string(5000, ' ')).status, 413);
}

TEST_F(ServiceTest, DiseasesAndRouting) {
    EXPECT_EQ(call("GET", "/v1/diseases/D002", nullptr, 200).at("name"), "Esophagitis");
    EXPECT_EQ(call("GET", "/v1/diseases/D999", nullptr, 404).at("error").at("kind"), "NOT_FOUND");
    call("GET", "/v1/nowhere", nullptr, 404);
    call("DELETE", "/v1/health", nullptr, 404);
}

TEST_F(ServiceTest, ReloadNeedsToken) {
    call("POST", "/v1/admin/reload", nullptr, 403);
    call("POST", "/v1/admin/reload", nullptr, 403, "wrong");
    const json ok = call("POST", "/v1/admin/reload", nullptr, 200, "secret");
    EXPECT_EQ(ok.at("bundle_version"), test::fixture_kb().bundle_version());
}

TEST_F(ServiceTest, ServesOverHttp) {
    const int port = service_.bind();
    ASSERT_GT(port, 0);
    std::thread server([&] { service_.listen_after_bind(); });
    httplib::Client client("127.0.0.1", port);
    std::vector<std::thread> clients;
    std::vector<std::string> versions(8);
    for (std::size_t i = 0; i < versions.size(); ++i) {
        clients.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", port);
            if (auto res = c.Get("/v1/health")) {
                versions[i] = json::parse(res->body).at("bundle_version").get<std::string>();
            }
        });
    }
    for (auto& t : clients) t.join();
    for (const std::string& v : versions) EXPECT_EQ(v, test::fixture_kb().bundle_version());

    const auto res = client.Post("/v1/diagnose", R"({"symptoms": []})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 422);
    EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
    service_.stop();
    server.join();
}

}  // namespace
}  // namespace symdist

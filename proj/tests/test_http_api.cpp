// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "skingen/diagnosis.hpp"
#include "skingen/http_api.hpp"
#include "test_support.hpp"

namespace skingen {
namespace {

using nlohmann::json;
using testing::random_image;
using testing::TempDir;

class HttpApi : public ::testing::Test {
protected:
    void SetUp() override {
        ServiceConfig config;
        config.data_dir = dir_.path();
        const auto& vocab = ConditionVocabulary::fitzpatrick17k();
        auto backends = BackendSet::stubs(vocab, 2);
        auto diag = std::make_shared<StubDiagnoser>(vocab, 2);
        diag->script(std::string(kPrimaryPrompt), "Most likely acne.");
        diag->script(std::string(kAlternativesPrompt), R"(["eczema"])");
        backends.diagnoser = diag;
        backends.generator = std::make_shared<StubGenerator>("base", 24, 24);
        service_ = std::make_unique<ChatService>(config, backends, CaseDatabase(), vocab);
        register_routes(server_, *service_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    httplib::Result post(const std::string& path, const json& body) {
        return client_->Post(path, body.dump(), "application/json");
    }

    std::string new_session(const std::string& variant = "FULL") {
        auto r = post("/sessions", {{"variant", variant}});
        EXPECT_EQ(r->status, 201);
        return json::parse(r->body).at("session_id").get<std::string>();
    }

    static std::string png() {
        const auto bytes = encode_png(random_image("http", 32, 32, 4));
        return {bytes.begin(), bytes.end()};
    }

    static void expect_error(const httplib::Result& r, int status, const std::string& code) {
        ASSERT_TRUE(r);
        EXPECT_EQ(r->status, status);
        const auto j = json::parse(r->body);
        EXPECT_EQ(j.at("error").at("code"), code);
        EXPECT_TRUE(j.at("error").at("message").is_string());
    }

    TempDir dir_;
    std::unique_ptr<ChatService> service_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

TEST(HttpStatus, Mapping) {
    EXPECT_EQ(http_status(ErrorCode::invalid_argument), 400);
    EXPECT_EQ(http_status(ErrorCode::schema_error), 400);
    EXPECT_EQ(http_status(ErrorCode::not_found), 404);
    EXPECT_EQ(http_status(ErrorCode::precondition_failed), 409);
    EXPECT_EQ(http_status(ErrorCode::unsupported_media), 415);
    EXPECT_EQ(http_status(ErrorCode::insufficient_data), 422);
    EXPECT_EQ(http_status(ErrorCode::backend_error), 502);
    EXPECT_EQ(http_status(ErrorCode::io_error), 500);
}

TEST_F(HttpApi, FullConversation) {
    const auto id = new_session();
    auto up = client_->Post("/sessions/" + id + "/image", png(), "image/png");
    ASSERT_TRUE(up);
    EXPECT_EQ(up->status, 201);
    const auto hash = json::parse(up->body).at("media").get<std::string>();
    EXPECT_EQ(json::parse(up->body).at("url"), "/media/" + hash);

    auto media = client_->Get("/media/" + hash);
    EXPECT_EQ(media->status, 200);
    EXPECT_EQ(media->get_header_value("Content-Type"), "image/png");
    EXPECT_EQ(media->body, png());

    auto ask = post("/sessions/" + id + "/ask", {{"text", "what is it?"}, {"demo_intent", false}});
    EXPECT_EQ(ask->status, 200);
    EXPECT_EQ(json::parse(ask->body).at("messages").size(), 2u);

    expect_error(client_->Get("/sessions/" + id + "/gallery"), 404, "not-found");
    auto demo = post("/sessions/" + id + "/ask", {{"text", "show me"}, {"demo_intent", true}});
    EXPECT_EQ(demo->status, 200);
    auto gallery = client_->Get("/sessions/" + id + "/gallery");
    EXPECT_EQ(gallery->status, 200);
    const auto g = json::parse(gallery->body);
    ASSERT_EQ(g.at("entries").size(), 2u);
    for (const auto& e : g.at("entries")) {
        EXPECT_EQ(e.at("source"), "generated");
        EXPECT_EQ(client_->Get("/media/" + e.at("media").get<std::string>())->status, 200);
    }

    auto history = client_->Get("/sessions/" + id + "/history");
    EXPECT_EQ(history->status, 200);
    EXPECT_EQ(json::parse(history->body).at("messages").size(), 6u);
}

TEST_F(HttpApi, MultipartUpload) {
    const auto id = new_session();
    const httplib::MultipartFormDataItems items{{"image", png(), "lesion.png", "image/png"}};
    auto r = client_->Post("/sessions/" + id + "/image", items);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 201);
    const httplib::MultipartFormDataItems wrong{{"file", png(), "lesion.png", "image/png"}};
    expect_error(client_->Post("/sessions/" + id + "/image", wrong), 415, "unsupported-media");
}

TEST_F(HttpApi, ErrorStatuses) {
    expect_error(post("/sessions", {{"variant", "HALF"}}), 400, "invalid-argument");
    expect_error(client_->Post("/sessions", "{not json", "application/json"), 400, "schema-error");
    expect_error(client_->Get("/sessions/missing/history"), 404, "not-found");
    expect_error(client_->Get("/media/" + std::string(64, '0')), 404, "not-found");

    const auto id = new_session("TEXT_ONLY");
    expect_error(post("/sessions/" + id + "/ask", {{"text", "hi"}}), 409, "precondition-failed");
    expect_error(client_->Post("/sessions/" + id + "/image", "plain text", "text/plain"), 415, "unsupported-media");
}

TEST_F(HttpApi, StudyFlow) {
    auto p = post("/study/participants", {{"gender", "female"}, {"medical_background", true}});
    ASSERT_EQ(p->status, 201);
    const auto pid = json::parse(p->body).at("participant_id").get<std::string>();
    EXPECT_EQ(pid, "p0001");

    auto s = post("/sessions", {{"condition", "SYS2"}, {"participant_id", pid}});
    EXPECT_EQ(s->status, 201);
    EXPECT_EQ(json::parse(s->body).at("variant"), "RETRIEVAL");
    expect_error(post("/sessions", {{"condition", "SYS2"}, {"variant", "FULL"}}), 400, "invalid-argument");

    EXPECT_EQ(post("/study/responses",
                   {{"participant_id", pid}, {"question_id", "trust"}, {"condition", "SYS3"}, {"value", 5}})
                  ->status,
              200);
    expect_error(post("/study/responses", {{"participant_id", pid}, {"question_id", "trust"}, {"value", 5}}), 400,
                 "schema-error");
    expect_error(post("/study/responses", {{"participant_id", pid}, {"question_id", "useful"}, {"value", 7}}), 400,
                 "invalid-argument");
    expect_error(post("/study/responses", {{"participant_id", pid}, {"question_id", "useful"}, {"value", "5"}}), 400,
                 "schema-error");
    expect_error(post("/study/responses", {{"participant_id", "p0999"}, {"question_id", "useful"}, {"value", 3}}),
                 404, "not-found");

    auto report = client_->Get("/study/report");
    ASSERT_EQ(report->status, 200);
    const auto j = json::parse(report->body);
    EXPECT_EQ(j.at("participants"), 1);
    EXPECT_EQ(j.at("demographics").at(1).at("option"), "Female");
    EXPECT_EQ(j.at("demographics").at(1).at("percentage"), "100.00%");
    bool saw_trust = false;
    for (const auto& c : j.at("cells"))
        if (c.at("question_id") == "trust" && c.at("condition") == "SYS3") {
            saw_trust = true;
            EXPECT_EQ(c.at("n"), 1);
            EXPECT_EQ(c.at("error"), "insufficient-data");
        }
    EXPECT_TRUE(saw_trust);

    auto csv = client_->Get("/study/report?format=csv");
    EXPECT_EQ(csv->status, 200);
    EXPECT_TRUE(csv->body.starts_with("category,option,count,percentage\n"));
}

}  // namespace
}  // namespace skingen

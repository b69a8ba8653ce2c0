// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/http_api.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fmt/format.h>

namespace skingen {

using nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument:
        case ErrorCode::schema_error:
        case ErrorCode::invalid_record:
        case ErrorCode::diagnosis_parse_error:
            return 400;
        case ErrorCode::not_found: return 404;
        case ErrorCode::precondition_failed: return 409;
        case ErrorCode::unsupported_media: return 415;
        case ErrorCode::insufficient_data: return 422;
        case ErrorCode::backend_error:
        case ErrorCode::generation_failed:
            return 502;
        default: return 500;
    }
}

namespace {

void reply_json(httplib::Response& res, const std::string& body, int status = 200) {
    res.status = status;
    res.set_content(body, "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    reply_json(res, json{{"error", {{"code", to_string(code)}, {"message", message}}}}.dump(), http_status(code));
}

// Runs a handler and maps thrown errors onto JSON error replies.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            reply_error(res, e.code(), e.what());
        } catch (const json::exception& e) {
            reply_error(res, ErrorCode::schema_error, e.what());
        } catch (const std::exception& e) {
            reply_error(res, ErrorCode::io_error, e.what());
        }
    };
}

json body_json(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) fail(ErrorCode::schema_error, "request body must be a JSON object");
    return j;
}

json session_summary(const ChatSession& s) { return json::parse(session_json(s)); }

}  // namespace

void register_routes(httplib::Server& server, ChatService& service) {
    server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const json body = body_json(req);
        std::optional<SystemCondition> condition;
        if (body.contains("condition") && !body["condition"].is_null())
            condition = system_from_string(body["condition"].get<std::string>());
        SystemVariant variant = condition ? variant_for(*condition) : SystemVariant::full;
        if (body.contains("variant")) variant = variant_from_string(body["variant"].get<std::string>());
        std::optional<std::string> participant;
        if (body.contains("participant_id") && !body["participant_id"].is_null())
            participant = body["participant_id"].get<std::string>();
        const std::string id = service.create_session(variant, condition, participant);
        reply_json(res, session_summary(service.history(id)).dump(), 201);
    }));

    server.Post("/sessions/:id/image", guarded([&](const httplib::Request& req, httplib::Response& res) {
        std::string bytes = req.body;
        if (req.is_multipart_form_data()) {
            if (!req.has_file("image")) fail(ErrorCode::unsupported_media, "multipart upload lacks an 'image' field");
            bytes = req.get_file_value("image").content;
        }
        const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
        const std::string hash = service.upload_image(req.path_params.at("id"), {data, bytes.size()});
        reply_json(res, json{{"media", hash}, {"url", MediaStore::url(hash)}}.dump(), 201);
    }));

    server.Post("/sessions/:id/ask", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const json body = body_json(req);
        const std::string text = body.value("text", std::string{});
        const bool demo = body.value("demo_intent", false);
        json messages = json::array();
        for (const auto& m : service.ask(req.path_params.at("id"), text, demo))
            messages.push_back(json::parse(message_json(m)));
        reply_json(res, json{{"messages", messages}}.dump());
    }));

    server.Get("/sessions/:id/gallery", guarded([&](const httplib::Request& req, httplib::Response& res) {
        reply_json(res, gallery_json(service.get_gallery(req.path_params.at("id"))));
    }));

    server.Get("/sessions/:id/history", guarded([&](const httplib::Request& req, httplib::Response& res) {
        reply_json(res, session_json(service.history(req.path_params.at("id"))));
    }));

    server.Post("/study/participants", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const json body = body_json(req);
        const Gender gender = gender_from_string(body.at("gender").get<std::string>());
        const bool medical = body.at("medical_background").get<bool>();
        const StudySession s = service.study().add_participant(gender, medical);
        reply_json(res, json::parse(session_to_json(s)).dump(), 201);
    }));

    server.Post("/study/responses", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const json body = body_json(req);
        const json& value = body.at("value");
        if (!value.is_number_integer()) fail(ErrorCode::schema_error, "value must be an integer 1-5");
        std::optional<SystemCondition> condition;
        if (body.contains("condition") && !body["condition"].is_null())
            condition = system_from_string(body["condition"].get<std::string>());
        const StudySession s = service.study().record(body.at("participant_id").get<std::string>(),
                                                      body.at("question_id").get<std::string>(), condition,
                                                      value.get<int>());
        reply_json(res, json::parse(session_to_json(s)).dump());
    }));

    server.Get("/study/report", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto sessions = service.study().sessions();
        const auto cells = aggregate(sessions);
        const auto demographics = demographics_table(sessions);
        if (req.get_param_value("format") == "csv") {
            res.set_content(demographics_csv(demographics) + "\n" + aggregate_csv(cells), "text/csv");
            return;
        }
        json demo = json::array();
        for (const auto& r : demographics)
            demo.push_back({{"category", r.category},
                            {"option", r.option},
                            {"count", r.count},
                            {"percentage", format_percentage(r.percentage)}});
        json out_cells = json::array();
        for (const auto& c : cells) {
            json cell = {{"question_id", c.question_id},
                         {"question", find_question(c.question_id).text},
                         {"n", c.n}};
            cell["condition"] = c.condition ? json(to_string(*c.condition)) : json(nullptr);
            if (c.summary) {
                cell["mean"] = c.summary->mean;
                cell["sd"] = c.summary->sd;
                cell["summary"] = c.summary->formatted();
            } else {
                cell["error"] = to_string(ErrorCode::insufficient_data);
            }
            out_cells.push_back(std::move(cell));
        }
        reply_json(res, json{{"participants", sessions.size()}, {"demographics", demo}, {"cells", out_cells}}.dump());
    }));

    server.Get("/media/:hash", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const Bytes bytes = service.media().get(req.path_params.at("hash"));
        const std::string type(MediaStore::content_type(bytes));
        res.set_content(std::string(bytes.begin(), bytes.end()), type);
    }));
}

bool serve(ChatService& service, const std::string& host, int port) {
    httplib::Server server;
    register_routes(server, service);
    return server.listen(host, port);
}

}  // namespace skingen

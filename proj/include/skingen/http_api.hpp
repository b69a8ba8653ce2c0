// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "skingen/error.hpp"
#include "skingen/service.hpp"

namespace httplib {
class Server;
}

namespace skingen {

// HTTP status used when an operation fails with `code`.
int http_status(ErrorCode code);

// JSON routes:
//   POST /sessions                 {"variant"} or {"condition", "participant_id"}
//   POST /sessions/{id}/image      raw PNG/JPEG body, or multipart field "image"
//   POST /sessions/{id}/ask        {"text", "demo_intent"}
//   GET  /sessions/{id}/gallery
//   GET  /sessions/{id}/history
//   POST /study/participants       {"gender", "medical_background"}
//   POST /study/responses          {"participant_id", "question_id", "condition"?, "value"}
//   GET  /study/report             ?format=csv for CSV
//   GET  /media/{hash}
// Failures answer {"error": {"code", "message"}}.
void register_routes(httplib::Server& server, ChatService& service);

// Blocks until the server stops. Returns false if binding failed.
bool serve(ChatService& service, const std::string& host, int port);

}  // namespace skingen

// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "skingen/backends.hpp"

namespace skingen {

// Adapters that forward each role to a model server over HTTP/JSON.
//
// Wire protocol (all POST, JSON in and out, images as {"id", "png"} with the
// PNG bytes base64-encoded):
//
//   /v1/diagnoser/answer         {image, prompt}                   -> {text}
//   /v1/detector/detect          {image, prompt}                   -> {boxes: [{x0,y0,x1,y1,confidence}]}
//   /v1/segmenter/segment        {image, box}                      -> {mask_png}
//   /v1/captioner/describe       {image}                           -> {text}
//   /v1/generator/generate       {prompt, image_prompt|null, strategy, seed, model} -> {image}
//   /v1/embedder/embed_image     {image, role}                     -> {values}
//   /v1/embedder/embed_text      {text, role}                      -> {values}
//
// Requests through one adapter are serialized by an internal mutex. Any
// transport failure or non-2xx status surfaces as backend_error.

class RemoteClient;

struct RemoteEndpoint {
    std::string url;  // e.g. http://127.0.0.1:9000
    double timeout_seconds = 60.0;
};

std::shared_ptr<const DiagnoserBackend> make_remote_diagnoser(const RemoteEndpoint& endpoint);
std::shared_ptr<const DetectorBackend> make_remote_detector(const RemoteEndpoint& endpoint);
std::shared_ptr<const SegmenterBackend> make_remote_segmenter(const RemoteEndpoint& endpoint);
std::shared_ptr<const CaptionerBackend> make_remote_captioner(const RemoteEndpoint& endpoint);
std::shared_ptr<const GeneratorBackend> make_remote_generator(const RemoteEndpoint& endpoint,
                                                              std::string model);
// `role` is forwarded so one server can host both the semantic and the
// structural embedder.
std::shared_ptr<const EmbedderBackend> make_remote_embedder(const RemoteEndpoint& endpoint,
                                                            std::string role);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace skingen

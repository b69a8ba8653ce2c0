// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <thread>

#include <gtest/gtest.h>

#include "skingen/diagnosis.hpp"
#include "skingen/service.hpp"
#include "test_support.hpp"

namespace skingen {
namespace {

using testing::error_code_of;
using testing::random_image;
using testing::TempDir;

const ConditionVocabulary& vocab() { return ConditionVocabulary::fitzpatrick17k(); }

BackendSet scripted_backends(std::uint64_t seed = 2) {
    auto set = BackendSet::stubs(vocab(), seed);
    auto diag = std::make_shared<StubDiagnoser>(vocab(), seed);
    diag->script(std::string(kPrimaryPrompt), "This appears to be acne on the cheek.");
    diag->script(std::string(kAlternativesPrompt), R"(["Eczema", "Psoriasis"])");
    set.diagnoser = diag;
    set.generator = std::make_shared<StubGenerator>("base", 32, 32);
    return set;
}

// Two cases per scripted condition, images kept in memory.
CaseDatabase reference_cases(const BackendSet& backends) {
    CaseDatabase db;
    int n = 0;
    for (const std::string label : {"acne", "eczema", "psoriasis"})
        for (int i = 0; i < 2; ++i) {
            const Caption caption(label, i ? "on the arm" : "on the back");
            const std::string id = label + "-" + std::to_string(i);
            db.add(CaseRecord{id, "", {{label, 1.0}}, caption,
                              backends.semantic_embedder->embed_text(caption.serialize())},
                   random_image(id, 16, 16, ++n));
        }
    return db;
}

struct Fixture {
    explicit Fixture(const std::filesystem::path& dir, bool with_cases = false) {
        ServiceConfig config;
        config.data_dir = dir;
        config.seed = 11;
        auto backends = scripted_backends();
        auto cases = with_cases ? reference_cases(backends) : CaseDatabase();
        service = std::make_unique<ChatService>(config, backends, std::move(cases), vocab());
    }
    std::unique_ptr<ChatService> service;
};

Bytes upload_bytes(const std::string& id = "upload", std::uint64_t seed = 5) {
    return encode_png(random_image(id, 48, 40, seed));
}

TEST(Variants, NamesAndStudyMapping) {
    EXPECT_EQ(to_string(SystemVariant::retrieval), "RETRIEVAL");
    EXPECT_EQ(variant_from_string("FULL"), SystemVariant::full);
    EXPECT_EQ(error_code_of([] { variant_from_string("PARTIAL"); }), ErrorCode::invalid_argument);
    EXPECT_EQ(variant_for(SystemCondition::sys1_text_only), SystemVariant::text_only);
    EXPECT_EQ(variant_for(SystemCondition::sys2_retrieval), SystemVariant::retrieval);
    EXPECT_EQ(variant_for(SystemCondition::sys3_skingen), SystemVariant::full);
}

TEST(ServiceConfig, FileThenEnvOverrides) {
    TempDir dir;
    write_file(dir / "service.json",
               std::string_view(R"({"port": 9000, "seed": 3, "retrieval_k": 5, "case_db": "cases.jsonl"})"));
    const auto env = [](const std::string& name) -> std::optional<std::string> {
        if (name == "SKINGEN_PORT") return "9100";
        if (name == "SKINGEN_DATA_DIR") return "/tmp/elsewhere";
        return std::nullopt;
    };
    const auto c = ServiceConfig::load(dir / "service.json", env);
    EXPECT_EQ(c.port, 9100);
    EXPECT_EQ(c.seed, 3u);
    EXPECT_EQ(c.retrieval_k, 5u);
    EXPECT_EQ(c.case_db, std::optional<std::filesystem::path>("cases.jsonl"));
    EXPECT_EQ(c.data_dir, "/tmp/elsewhere");
    EXPECT_EQ(c.host, "127.0.0.1");

    const auto bad_port = [](const std::string& name) -> std::optional<std::string> {
        return name == "SKINGEN_PORT" ? std::optional<std::string>("99999") : std::nullopt;
    };
    EXPECT_EQ(error_code_of([&] { ServiceConfig::load(std::nullopt, bad_port); }), ErrorCode::invalid_argument);
    write_file(dir / "broken.json", std::string_view("{port:"));
    EXPECT_EQ(error_code_of([&] { ServiceConfig::load(dir / "broken.json", {}); }), ErrorCode::invalid_argument);
}

TEST(MediaStore, ContentAddressed) {
    TempDir dir;
    MediaStore store(dir / "media");
    const auto bytes = upload_bytes();
    const auto hash = store.put(bytes);
    EXPECT_EQ(hash, sha256_hex(bytes));
    EXPECT_EQ(store.put(bytes), hash);
    EXPECT_EQ(store.get(hash), bytes);
    EXPECT_TRUE(store.contains(hash));
    EXPECT_EQ(MediaStore::url(hash), "/media/" + hash);
    EXPECT_EQ(MediaStore::content_type(bytes), "image/png");
    EXPECT_EQ(error_code_of([&] { store.get(std::string(64, 'a')); }), ErrorCode::not_found);
    EXPECT_EQ(error_code_of([&] { store.get("../../etc/passwd"); }), ErrorCode::not_found);
}

TEST(CreateSession, FreshUniqueAndPersisted) {
    TempDir dir;
    std::string a;
    {
        Fixture f(dir.path());
        a = f.service->create_session(SystemVariant::full);
        const auto b = f.service->create_session(SystemVariant::full);
        EXPECT_NE(a, b);
        EXPECT_TRUE(f.service->history(a).messages.empty());
        EXPECT_EQ(error_code_of([&] {
                      f.service->create_session(SystemVariant::full, SystemCondition::sys1_text_only);
                  }),
                  ErrorCode::invalid_argument);
    }
    Fixture restarted(dir.path());
    const auto ids = restarted.service->session_ids();
    EXPECT_NE(std::find(ids.begin(), ids.end(), a), ids.end());
    EXPECT_EQ(restarted.service->history(a).variant, SystemVariant::full);
}

TEST(UploadImage, ValidatesAndAppends) {
    TempDir dir;
    Fixture f(dir.path());
    const auto id = f.service->create_session(SystemVariant::full);
    const auto first = f.service->upload_image(id, upload_bytes("one", 1));
    EXPECT_EQ(f.service->history(id).messages.size(), 1u);
    EXPECT_EQ(f.service->history(id).messages[0].kind, MessageKind::image);
    EXPECT_EQ(f.service->history(id).messages[0].role, MessageRole::user);

    const std::string text = "hello, not an image";
    EXPECT_EQ(error_code_of([&] { f.service->upload_image(id, Bytes(text.begin(), text.end())); }),
              ErrorCode::unsupported_media);
    EXPECT_EQ(error_code_of([&] { f.service->upload_image("missing", upload_bytes()); }), ErrorCode::not_found);

    const auto second = f.service->upload_image(id, upload_bytes("two", 2));
    const auto h = f.service->history(id);
    EXPECT_EQ(h.messages.size(), 2u);
    EXPECT_EQ(h.current_image, second);
    EXPECT_EQ(h.messages[0].media, first);
}

TEST(Ask, RequiresImage) {
    TempDir dir;
    Fixture f(dir.path());
    const auto id = f.service->create_session(SystemVariant::full);
    EXPECT_EQ(error_code_of([&] { f.service->ask(id, "what is this?", false); }), ErrorCode::precondition_failed);
    EXPECT_EQ(error_code_of([&] { f.service->ask("nope", "hi", false); }), ErrorCode::not_found);
}

TEST(Ask, FullVariantDiagnosisThenGallery) {
    TempDir dir;
    Fixture f(dir.path());
    const auto id = f.service->create_session(SystemVariant::full);
    f.service->upload_image(id, upload_bytes());
    const auto first = f.service->ask(id, "what is this?", false);
    ASSERT_EQ(first.size(), 2u);
    EXPECT_EQ(first[0].kind, MessageKind::text);
    EXPECT_NE(first[0].text.find("acne"), std::string::npos);
    EXPECT_NE(first[0].text.find("Other possible conditions: eczema, psoriasis."), std::string::npos);
    EXPECT_EQ(first[1].kind, MessageKind::image);
    ASSERT_TRUE(first[1].media);
    EXPECT_EQ(error_code_of([&] { f.service->get_gallery(id); }), ErrorCode::not_found);

    const auto demo = f.service->ask(id, "what else could it be?", true);
    ASSERT_EQ(demo.size(), 1u);
    ASSERT_EQ(demo[0].kind, MessageKind::gallery);
    const auto gallery = f.service->get_gallery(id);
    EXPECT_EQ(gallery, *demo[0].gallery);
    ASSERT_EQ(gallery.entries.size(), 3u);
    EXPECT_EQ(gallery.entries[0].condition, "acne");
    for (const auto& e : gallery.entries) {
        EXPECT_EQ(e.source, "generated");
        EXPECT_EQ(e.strategy, std::optional<std::string>("LORA_TEXT"));
        EXPECT_FALSE(e.case_id);
        ASSERT_TRUE(e.media);
        EXPECT_TRUE(f.service->media().contains(*e.media));
    }

    const auto again = f.service->ask(id, "are you sure?", false);
    ASSERT_EQ(again.size(), 1u);
    EXPECT_EQ(again[0].text, "My assessment remains acne. It could also be eczema, psoriasis.");
}

TEST(Ask, GalleryMediaMatchesGeneratorOutput) {
    TempDir dir;
    Fixture f(dir.path());
    const auto id = f.service->create_session(SystemVariant::full);
    const auto hash = f.service->upload_image(id, upload_bytes());
    f.service->ask(id, "show me", true);
    const auto gallery = f.service->get_gallery(id);

    const auto image = decode_image(upload_bytes(), hash, ImageSource::user_upload);
    const auto diagnosis = *f.service->history(id).diagnosis;
    const auto set = generate_demonstrations(image, diagnosis, CaseDatabase(), scripted_backends(), {.seed = 11});
    ASSERT_EQ(set.entries.size(), gallery.entries.size());
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        const auto expected = encode_png(*set.entries[i].image);
        EXPECT_EQ(f.service->media().get(*gallery.entries[i].media), expected);
        EXPECT_EQ(*gallery.entries[i].media, sha256_hex(expected));
    }
}

TEST(Ask, TextOnlyVariantNeverShowsImages) {
    TempDir dir;
    Fixture f(dir.path(), true);
    const auto id = f.service->create_session(SystemVariant::text_only);
    f.service->upload_image(id, upload_bytes());
    const auto replies = f.service->ask(id, "what else could it be?", true);
    ASSERT_EQ(replies.size(), 2u);
    for (const auto& m : replies) {
        EXPECT_EQ(m.kind, MessageKind::text);
        EXPECT_FALSE(m.media);
    }
    EXPECT_EQ(replies[1].text, "The most likely condition is acne. Other possible conditions: eczema, psoriasis.");
    EXPECT_EQ(error_code_of([&] { f.service->get_gallery(id); }), ErrorCode::not_found);
}

TEST(Ask, RetrievalVariantShowsOnlyDatabaseCases) {
    TempDir dir;
    Fixture f(dir.path(), true);
    const auto id = f.service->create_session(SystemVariant::retrieval);
    f.service->upload_image(id, upload_bytes());
    const auto replies = f.service->ask(id, "show me", true);
    ASSERT_EQ(replies.size(), 2u);
    EXPECT_EQ(replies[0].kind, MessageKind::text);
    const auto gallery = f.service->get_gallery(id);
    EXPECT_EQ(gallery.variant, SystemVariant::retrieval);
    ASSERT_EQ(gallery.entries.size(), 6u);
    for (const auto& e : gallery.entries) {
        EXPECT_EQ(e.source, "dataset");
        ASSERT_TRUE(e.case_id);
        EXPECT_TRUE(e.case_id->starts_with(e.condition + "-"));
        EXPECT_FALSE(e.strategy);
        ASSERT_TRUE(e.media);
        const auto stored = decode_image(f.service->media().get(*e.media), "x");
        EXPECT_EQ(stored.width(), 16);
    }
}

TEST(Ask, RetrievalWithEmptyDatabaseReportsPerCondition) {
    TempDir dir;
    Fixture f(dir.path());
    const auto id = f.service->create_session(SystemVariant::retrieval);
    f.service->upload_image(id, upload_bytes());
    f.service->ask(id, "show me", true);
    const auto gallery = f.service->get_gallery(id);
    ASSERT_EQ(gallery.entries.size(), 3u);
    for (const auto& e : gallery.entries) {
        ASSERT_TRUE(e.error);
        EXPECT_EQ(e.error->code, ErrorCode::not_found);
    }
}

TEST(Ask, PipelineErrorsBecomeMessages) {
    TempDir dir;
    ServiceConfig config;
    config.data_dir = dir.path();
    auto backends = scripted_backends();
    backends.diagnoser = std::make_shared<testing::ThrowingDiagnoser>();
    ChatService service(config, backends, CaseDatabase(), vocab());
    const auto id = service.create_session(SystemVariant::full);
    service.upload_image(id, upload_bytes());
    const auto replies = service.ask(id, "what is it?", true);
    ASSERT_EQ(replies.size(), 1u);
    ASSERT_TRUE(replies[0].error);
    EXPECT_EQ(replies[0].error->code, ErrorCode::backend_error);
    // Still usable afterwards.
    EXPECT_EQ(service.ask(id, "again?", false).size(), 1u);
}

TEST(Ask, MaskingFailureDoesNotBlockDiagnosis) {
    TempDir dir;
    ServiceConfig config;
    config.data_dir = dir.path();
    auto backends = scripted_backends();
    backends.detector = std::make_shared<testing::FixedDetector>(std::vector<BoundingBox>{});
    ChatService service(config, backends, CaseDatabase(), vocab());
    const auto id = service.create_session(SystemVariant::full);
    service.upload_image(id, upload_bytes());
    const auto replies = service.ask(id, "what is it?", false);
    ASSERT_EQ(replies.size(), 2u);
    EXPECT_FALSE(replies[0].error);
    ASSERT_TRUE(replies[1].error);
    EXPECT_EQ(replies[1].error->code, ErrorCode::lesion_not_found);
}

TEST(Persistence, ReplayReconstructsState) {
    TempDir dir;
    std::string id;
    std::string live;
    {
        Fixture f(dir.path(), true);
        id = f.service->create_session(SystemVariant::retrieval, SystemCondition::sys2_retrieval, "p0001");
        f.service->upload_image(id, upload_bytes());
        f.service->ask(id, "what is this?", false);
        f.service->ask(id, "show me", true);
        f.service->upload_image(id, upload_bytes("second", 9));
        live = session_json(f.service->history(id));
        EXPECT_EQ(session_json(f.service->replay(id)), live);
    }
    Fixture restarted(dir.path(), true);
    EXPECT_EQ(session_json(restarted.service->history(id)), live);
    EXPECT_EQ(restarted.service->history(id).participant_id, std::optional<std::string>("p0001"));
}

TEST(Concurrency, IndependentSessionsInParallel) {
    TempDir dir;
    Fixture f(dir.path());
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(f.service->create_session(SystemVariant::full));
    std::vector<std::thread> threads;
    for (const auto& id : ids)
        threads.emplace_back([&, id] {
            f.service->upload_image(id, upload_bytes());
            f.service->ask(id, "show me", true);
        });
    for (auto& t : threads) t.join();
    const auto reference = f.service->get_gallery(ids[0]);
    for (const auto& id : ids) {
        EXPECT_EQ(f.service->get_gallery(id), reference);
        const auto h = f.service->history(id);
        for (std::size_t i = 0; i < h.messages.size(); ++i) EXPECT_EQ(h.messages[i].index, i);
    }
}

}  // namespace
}  // namespace skingen

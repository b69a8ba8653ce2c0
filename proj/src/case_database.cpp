// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "skingen/generation.hpp"
#include "skingen/image_io.hpp"

namespace skingen {

using nlohmann::json;
namespace fs = std::filesystem;

void CaseRecord::validate() const {
    require(!case_id.empty(), "case record has an empty case_id");
    require(!conditions.empty() && conditions.size() <= 3,
            fmt::format("case '{}' has {} conditions (expected 1-3)", case_id, conditions.size()));
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        const auto& c = conditions[i];
        require(!trim(c.label).empty(), fmt::format("case '{}' has an empty label", case_id));
        require(c.weight > 0.0 && c.weight <= 1.0,
                fmt::format("case '{}' weight {} outside (0, 1]", case_id, c.weight));
        if (i > 0)
            require(conditions[i - 1].weight >= c.weight,
                    fmt::format("case '{}' weights are not sorted descending", case_id));
    }
}

CaseDatabase::CaseDatabase(std::string embedder_tag, fs::path image_root)
    : embedder_tag_(std::move(embedder_tag)), image_root_(std::move(image_root)) {}

void CaseDatabase::add(CaseRecord record, std::optional<SkinImage> image) {
    record.validate();
    require(!index_.contains(record.case_id),
            fmt::format("duplicate case_id '{}'", record.case_id));
    if (!records_.empty())
        require(records_.front().embedding.dimension() == record.embedding.dimension(),
                fmt::format("case '{}' embedding dimension {} differs from database dimension {}",
                            record.case_id, record.embedding.dimension(),
                            records_.front().embedding.dimension()));
    if (image) images_.insert_or_assign(record.case_id, std::move(*image));
    index_.emplace(record.case_id, records_.size());
    records_.push_back(std::move(record));
}

const CaseRecord* CaseDatabase::find(std::string_view case_id) const {
    auto it = index_.find(case_id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

SkinImage CaseDatabase::case_image(const CaseRecord& record) const {
    if (auto it = images_.find(record.case_id); it != images_.end()) return it->second;
    if (record.image_ref.empty())
        fail(ErrorCode::not_found, fmt::format("case '{}' has no image", record.case_id));
    auto image = read_image_file(image_root_ / record.image_ref, record.case_id, ImageSource::dataset);
    return SkinImage(record.case_id, image.width(), image.height(),
                     std::vector<std::uint8_t>(image.pixels().begin(), image.pixels().end()),
                     ImageSource::dataset, record.primary_label());
}

namespace {

json record_json(const CaseRecord& r, const std::string& tag) {
    json conditions = json::array();
    for (const auto& c : r.conditions) conditions.push_back({{"label", c.label}, {"weight", c.weight}});
    return {{"case_id", r.case_id},
            {"image_ref", r.image_ref},
            {"conditions", conditions},
            {"caption", r.caption.serialize()},
            {"embedding", std::vector<double>(r.embedding.values().begin(), r.embedding.values().end())},
            {"embedder", tag}};
}

}  // namespace

void CaseDatabase::save(const fs::path& jsonl) const {
    std::string out;
    for (const auto& r : records_) out += record_json(r, embedder_tag_).dump() + "\n";
    write_file(jsonl, out);
}

CaseDatabase CaseDatabase::load(const fs::path& jsonl, std::optional<fs::path> image_root) {
    std::ifstream in(jsonl);
    if (!in) fail(ErrorCode::io_error, fmt::format("cannot read case database '{}'", jsonl.string()));
    CaseDatabase db("", image_root.value_or(jsonl.parent_path()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            CaseRecord r{j.at("case_id").get<std::string>(),
                         j.value("image_ref", std::string{}),
                         {},
                         Caption::parse(j.at("caption").get<std::string>()),
                         Embedding::from_unit(j.at("embedding").get<std::vector<double>>())};
            for (const auto& c : j.at("conditions"))
                r.conditions.push_back({c.at("label").get<std::string>(), c.at("weight").get<double>()});
            std::string tag = j.value("embedder", std::string("stub"));
            if (db.records_.empty())
                db.embedder_tag_ = tag;
            else
                require(tag == db.embedder_tag_,
                        fmt::format("mixed embedder tags '{}' and '{}'", db.embedder_tag_, tag));
            db.add(std::move(r));
        } catch (const json::exception& e) {
            fail(ErrorCode::io_error,
                 fmt::format("{}:{}: malformed case record: {}", jsonl.string(), line_no, e.what()));
        } catch (const Error& e) {
            fail(e.code(), fmt::format("{}:{}: {}", jsonl.string(), line_no, e.what()));
        }
    }
    if (db.embedder_tag_.empty()) db.embedder_tag_ = "stub";
    return db;
}

CaseDatabase ingest_case_folder(const fs::path& folder, const fs::path& out_dir,
                                const CaptionerBackend& captioner, const EmbedderBackend& embedder,
                                std::string embedder_tag) {
    if (!fs::is_directory(folder))
        fail(ErrorCode::io_error, fmt::format("'{}' is not a directory", folder.string()));

    std::vector<fs::path> label_dirs;
    for (const auto& entry : fs::directory_iterator(folder))
        if (entry.is_directory()) label_dirs.push_back(entry.path());
    std::sort(label_dirs.begin(), label_dirs.end());

    CaseDatabase db(std::move(embedder_tag), out_dir);
    for (const auto& dir : label_dirs) {
        const std::string label = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = to_lower(entry.path().extension().string());
            if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            const std::string case_id = label + "/" + file.stem().string();
            SkinImage image = read_image_file(file, case_id, ImageSource::dataset);
            Caption caption = recaption(image, label, captioner);
            const std::string image_ref = "images/" + sha256_hex(read_file(file)).substr(0, 32) + ".png";
            write_png_file(out_dir / image_ref, image);
            db.add(CaseRecord{case_id, image_ref, {{label, 1.0}}, caption,
                              embedder.embed_text(caption.serialize())});
        }
    }
    db.save(out_dir / "cases.jsonl");
    return db;
}

}  // namespace skingen

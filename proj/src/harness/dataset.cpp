#include "billocr/harness/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "billocr/image_io.hpp"

namespace billocr::harness {

Dataset ingest_dataset(const std::filesystem::path& dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw DatasetError("dataset directory not found: " + dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pgm")
            files.push_back(entry.path());
    }
    if (ec)
        throw DatasetError("cannot list dataset directory " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.stem().string() < b.stem().string(); });

    Dataset ds;
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        if (!ds.images.empty() && ds.images.back().id == id) {
            ds.warnings.push_back(f.filename().string() + ": duplicate image id '" + id + "', skipped");
            continue;
        }
        try {
            ds.images.push_back({id, f, load_image(f)});
        } catch (const std::exception& e) {
            ds.warnings.push_back(f.filename().string() + ": " + e.what());
        }
    }
    if (ds.images.empty())
        throw DatasetError("no readable .png/.pgm images in " + dir.string());
    return ds;
}

void write_ground_truth(const std::filesystem::path& dir, const std::string& id, const GroundTruthRecord& gt)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream t(dir / (id + ".gt.txt"), std::ios::binary);
        if (!t)
            throw DatasetError("cannot write " + (dir / (id + ".gt.txt")).string());
        t << gt.text << '\n';
    }
    nlohmann::ordered_json j;
    j["agreement"] = gt.agreement;
    j["engine_ids"] = gt.engine_ids;
    j["substituted"] = gt.substituted;
    std::ofstream s(dir / (id + ".gt.json"), std::ios::binary);
    if (!s)
        throw DatasetError("cannot write " + (dir / (id + ".gt.json")).string());
    s << j.dump(2) << '\n';
}

std::optional<GroundTruthRecord> read_ground_truth(const std::filesystem::path& dir, const std::string& id)
{
    std::ifstream t(dir / (id + ".gt.txt"), std::ios::binary);
    if (!t)
        return std::nullopt;
    std::ostringstream buf;
    buf << t.rdbuf();
    GroundTruthRecord gt;
    gt.text = buf.str();
    while (!gt.text.empty() && (gt.text.back() == '\n' || gt.text.back() == '\r'))
        gt.text.pop_back();

    std::ifstream s(dir / (id + ".gt.json"), std::ios::binary);
    if (s) {
        try {
            const auto j = nlohmann::json::parse(s);
            gt.agreement = j.value("agreement", 1.0);
            if (j.contains("engine_ids"))
                gt.engine_ids = j.at("engine_ids").get<std::array<std::string, kEnsembleSize>>();
            gt.substituted = j.value("substituted", false);
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError("malformed " + (dir / (id + ".gt.json")).string() + ": " + e.what());
        }
    }
    return gt;
}

}  // namespace billocr::harness

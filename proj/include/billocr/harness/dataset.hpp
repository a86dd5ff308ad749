#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "billocr/ensemble.hpp"
#include "billocr/image.hpp"

namespace billocr::harness {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetImage {
    std::string id;  // file stem
    std::filesystem::path path;
    GrayImage image;
};

struct Dataset {
    std::vector<DatasetImage> images;
    /// One message per skipped file.
    std::vector<std::string> warnings;
};

/// Top-level .png/.pgm files in lexicographic id order. Unreadable files are
/// skipped with a warning; no readable image at all is fatal.
Dataset ingest_dataset(const std::filesystem::path& dir);

/// Pseudo-GT sidecar contents.
struct GroundTruthRecord {
    std::string text;
    double agreement = 1.0;
    std::array<std::string, kEnsembleSize> engine_ids;
    /// True when the third vote came from the proposed pipeline instead of an external engine.
    bool substituted = false;
};

using GroundTruthMap = std::map<std::string, GroundTruthRecord>;

/// Writes <dir>/<id>.gt.txt and <dir>/<id>.gt.json.
void write_ground_truth(const std::filesystem::path& dir, const std::string& id, const GroundTruthRecord& gt);

/// Reads the sidecar pair for id, or nullopt when <id>.gt.txt is absent.
std::optional<GroundTruthRecord> read_ground_truth(const std::filesystem::path& dir, const std::string& id);

}  // namespace billocr::harness

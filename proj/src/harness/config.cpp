#include "billocr/harness/config.hpp"

#include <algorithm>
#include <charconv>

namespace billocr::harness {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::RawTesseract, "raw_tesseract"},
    {Method::ExternalOcr, "external_ocr"},
    {Method::TesseractPreprocess, "tesseract_preprocess"},
    {Method::ProposedPipeline, "proposed_pipeline"},
};

TileSize parse_tile(const std::string& s)
{
    const auto x = s.find_first_of("xX");
    int w = 0;
    int h = 0;
    bool ok = x != std::string::npos;
    if (ok) {
        const std::string a = trim(std::string_view(s).substr(0, x));
        const std::string b = trim(std::string_view(s).substr(x + 1));
        ok = std::from_chars(a.data(), a.data() + a.size(), w).ec == std::errc{} &&
             std::from_chars(b.data(), b.data() + b.size(), h).ec == std::errc{};
    }
    if (!ok || w < 1 || h < 1)
        throw ConfigError("clahe_tile: expected WxH with positive integers, got '" + s + "'");
    return {w, h};
}

EngineSpec parse_engine(const KeyValueFile& kv)
{
    const std::string kind = kv.get_string("engine", "tesseract");
    const double timeout = kv.get_double("engine_timeout", 60.0);
    EngineSpec spec;
    if (kind == "mock") {
        MockProfile p;
        p.divisor = kv.get_double("mock_divisor", p.divisor);
        p.cap = kv.get_double("mock_cap", p.cap);
        p.floor = kv.get_double("mock_floor", p.floor);
        p.ink_threshold = kv.get_double("mock_ink_threshold", p.ink_threshold);
        spec = EngineSpec::mock_engine(p, "mock");
    } else if (kind == "tesseract") {
        spec = EngineSpec::tesseract(kv.get_string("tesseract", "tesseract"));
        spec.args = kv.get_list("tesseract_args", {});
    } else {
        throw ConfigError("engine: expected 'tesseract' or 'mock', got '" + kind + "'");
    }
    spec.timeout_seconds = timeout;
    return spec;
}

}  // namespace

std::string_view to_string(Method m) noexcept
{
    for (const auto& [method, name] : kMethodNames)
        if (method == m)
            return name;
    return "unknown";
}

std::optional<Method> parse_method(std::string_view s) noexcept
{
    for (const auto& [method, name] : kMethodNames)
        if (name == s)
            return method;
    return std::nullopt;
}

std::string RunConfig::default_file()
{
    return R"(# billocr run configuration
dataset = data
output = out
gt_dir =
model = model.bfn
rules =

# Quality routing on Laplacian variance
high_threshold = 500
low_threshold = 150

# Confidence feedback loop
confidence_threshold = 70
max_attempts = 3

# CLAHE after enhancement
clahe_clip = 2.0
clahe_tile = 8x8

# Enhancement network training
learning_rate = 0.001
patience = 5
max_epochs = 30
batch_size = 4
patch_size = 64
val_fraction = 0.1

# Classical preprocessing baseline
min_side = 1000
nlm_h = 10
nlm_template = 7
nlm_search = 21
threshold_block = 11
threshold_c = 2

# OCR engines: engine = tesseract | mock
engine = tesseract
tesseract = tesseract
engine_timeout = 60
external_ocr =

methods = raw_tesseract, tesseract_preprocess, proposed_pipeline
seed = 42
workers = 0
timing = wall
)";
}

RunConfig RunConfig::from_keyvalue(const KeyValueFile& kv)
{
    static const std::vector<std::string> known{
        "dataset",         "output",          "gt_dir",       "model",        "rules",
        "high_threshold",  "low_threshold",   "confidence_threshold",         "max_attempts",
        "clahe_clip",      "clahe_tile",      "learning_rate", "patience",    "max_epochs",
        "batch_size",      "patch_size",      "val_fraction", "min_side",     "nlm_h",
        "nlm_template",    "nlm_search",      "threshold_block",              "threshold_c",
        "engine",          "tesseract",       "tesseract_args",               "engine_timeout",
        "external_ocr",    "external_args",   "methods",      "seed",         "workers",
        "timing",          "mock_divisor",    "mock_cap",     "mock_floor",   "mock_ink_threshold",
    };
    for (const auto& [key, value] : kv.entries())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown configuration key '" + key + "'");

    RunConfig c;
    c.dataset_dir = kv.get_string("dataset", "");
    c.output_dir = kv.get_string("output", "out");
    c.gt_dir = kv.get_string("gt_dir", "");
    c.model_path = kv.get_string("model", "");
    c.rules_path = kv.get_string("rules", "");

    c.thresholds.high = kv.get_double("high_threshold", c.thresholds.high);
    c.thresholds.low = kv.get_double("low_threshold", c.thresholds.low);
    c.feedback.threshold = kv.get_double("confidence_threshold", c.feedback.threshold);
    c.feedback.max_attempts = kv.get_int("max_attempts", c.feedback.max_attempts);
    c.clahe_clip = kv.get_double("clahe_clip", c.clahe_clip);
    if (auto t = kv.get("clahe_tile"))
        c.clahe_tile = parse_tile(*t);

    c.train.learning_rate = kv.get_double("learning_rate", c.train.learning_rate);
    c.train.patience = kv.get_int("patience", c.train.patience);
    c.train.max_epochs = kv.get_int("max_epochs", c.train.max_epochs);
    c.train.batch_size = kv.get_int("batch_size", c.train.batch_size);
    c.train.patch_size = kv.get_int("patch_size", c.train.patch_size);
    c.train.val_fraction = kv.get_double("val_fraction", c.train.val_fraction);

    c.min_side = kv.get_int("min_side", c.min_side);
    c.nl_means.strength = kv.get_double("nlm_h", c.nl_means.strength);
    c.nl_means.template_size = kv.get_int("nlm_template", c.nl_means.template_size);
    c.nl_means.search_size = kv.get_int("nlm_search", c.nl_means.search_size);
    c.threshold_block = kv.get_int("threshold_block", c.threshold_block);
    c.threshold_c = kv.get_double("threshold_c", c.threshold_c);

    const int seed = kv.get_int("seed", 42);
    if (seed < 0)
        throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.train.seed = c.seed;
    c.workers = kv.get_int("workers", 0);

    const std::string timing = kv.get_string("timing", "wall");
    if (timing == "wall")
        c.timing = Timing::Wall;
    else if (timing == "none")
        c.timing = Timing::None;
    else
        throw ConfigError("timing: expected 'wall' or 'none', got '" + timing + "'");

    c.tesseract = parse_engine(kv);
    if (const std::string ext = kv.get_string("external_ocr", ""); !ext.empty()) {
        EngineSpec e = EngineSpec::external_command(ext);
        e.args = kv.get_list("external_args", {});
        e.timeout_seconds = c.tesseract.timeout_seconds;
        c.external_ocr = std::move(e);
    }

    if (kv.contains("methods")) {
        c.methods.clear();
        for (const auto& name : kv.get_list("methods", {})) {
            const auto m = parse_method(name);
            if (!m)
                throw ConfigError("methods: unknown method '" + name + "'");
            if (std::find(c.methods.begin(), c.methods.end(), *m) == c.methods.end())
                c.methods.push_back(*m);
        }
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    return from_keyvalue(KeyValueFile::load(path));
}

void RunConfig::validate() const
{
    if (!(thresholds.low >= 0.0 && thresholds.high > thresholds.low))
        throw ConfigError("thresholds must satisfy 0 <= low_threshold < high_threshold");
    try {
        feedback.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(clahe_clip > 0.0))
        throw ConfigError("clahe_clip must be positive");
    if (train.learning_rate <= 0.0 || train.patience < 1 || train.max_epochs < 1 || train.batch_size < 1 ||
        train.patch_size < 8)
        throw ConfigError("training settings out of range");
    if (!(train.val_fraction > 0.0 && train.val_fraction < 1.0))
        throw ConfigError("val_fraction must lie in (0, 1)");
    if (min_side < 1)
        throw ConfigError("min_side must be >= 1");
    if (nl_means.strength <= 0.0 || nl_means.template_size < 1 || nl_means.template_size % 2 == 0 ||
        nl_means.search_size < 1 || nl_means.search_size % 2 == 0)
        throw ConfigError("NL-means needs h > 0 and odd template/search sizes");
    if (threshold_block < 3 || threshold_block % 2 == 0)
        throw ConfigError("threshold_block must be odd and >= 3");
    if (workers < 0)
        throw ConfigError("workers must be >= 0");
    if (methods.empty())
        throw ConfigError("methods: at least one method is required");
    for (Method m : methods)
        if (m == Method::ExternalOcr && !external_ocr)
            throw ConfigError("methods: external_ocr requested but no external_ocr command is configured");
}

}  // namespace billocr::harness

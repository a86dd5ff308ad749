#include "billocr/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "billocr/imagecore.hpp"

namespace billocr::harness {

namespace {

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> json_opt(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

TierCounts count_tiers(const Dataset& ds, const RoutingThresholds& thresholds)
{
    TierCounts c{};
    for (const auto& img : ds.images)
        ++c[static_cast<std::size_t>(assess_quality(img.image, thresholds).tier)];
    return c;
}

MethodRecords records_of(const std::vector<MethodRun>& runs)
{
    MethodRecords out;
    for (const auto& r : runs)
        out.emplace_back(std::string(to_string(r.method)), r.successful_records());
    return out;
}

std::string format_report_csv(const MethodRecords& records)
{
    std::string out = "method,cer,wer,conf,psnr_db,psnr_n,field_rate,density,noise_ratio,time_s\n";
    for (const auto& [name, recs] : records) {
        out += name;
        if (recs.empty()) {
            out += ",NA,NA,NA,NA,0,NA,NA,NA,NA\n";
            continue;
        }
        const AggregateRow row = aggregate(recs);
        out += ',' + opt_num(row.cer);
        out += ',' + opt_num(row.wer);
        out += ',' + num(row.mean_confidence);
        out += ',' + (row.psnr.is_finite() ? num(row.psnr.decibels()) : std::string("NA"));
        out += ',' + std::to_string(row.psnr_count);
        out += ',' + num(row.field_extraction);
        out += ',' + num(row.text_density);
        out += ',' + num(row.noise_ratio);
        out += ',' + num(row.elapsed);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json report_json(const std::vector<MethodRun>& runs, const TierCounts& tiers)
{
    nlohmann::ordered_json j;
    j["tiers"] = {{"HIGH", tiers[0]}, {"MEDIUM", tiers[1]}, {"LOW", tiers[2]}};
    j["methods"] = nlohmann::ordered_json::array();
    for (const auto& run : runs) {
        nlohmann::ordered_json m;
        m["method"] = to_string(run.method);
        m["valid"] = run.valid;
        m["failures"] = run.failures;
        m["images"] = nlohmann::ordered_json::array();
        for (const auto& r : run.images) {
            const auto& mr = r.metrics;
            nlohmann::ordered_json im;
            im["id"] = mr.image_id;
            im["tier"] = to_string(mr.tier);
            im["variance"] = r.variance;
            im["plan"] = {{"cnn_passes", r.plan.cnn_passes},
                          {"sharpen", r.plan.apply_sharpen},
                          {"clahe", r.plan.apply_clahe_post}};
            im["cer"] = opt_json(mr.cer);
            im["wer"] = opt_json(mr.wer);
            im["conf"] = mr.mean_confidence;
            im["psnr_db"] = mr.psnr.is_finite() ? nlohmann::ordered_json(mr.psnr.decibels()) : nullptr;
            im["field_rate"] = mr.field_extraction;
            im["density"] = mr.text_density;
            im["noise_ratio"] = mr.noise_ratio;
            im["time_s"] = mr.elapsed;
            im["gt_agreement"] = r.gt_agreement;
            im["text"] = r.text;
            if (r.attempts) {
                nlohmann::ordered_json a;
                a["chosen"] = r.attempts->chosen_attempt;
                a["retries"] = r.attempts->retries();
                a["attempts"] = nlohmann::ordered_json::array();
                for (const auto& at : r.attempts->attempts)
                    a["attempts"].push_back({{"attempt", at.attempt},
                                             {"sharpen_passes", at.sharpen_passes},
                                             {"conf", at.mean_confidence},
                                             {"tokens", at.token_count},
                                             {"engine_time_s", at.engine_elapsed}});
                im["attempt_log"] = std::move(a);
            } else {
                im["attempt_log"] = nullptr;
            }
            im["corrections"] = nlohmann::ordered_json::array();
            for (const auto& c : r.corrections)
                im["corrections"].push_back({{"rule", to_string(c.rule)}, {"line", c.line}, {"token", c.token}});
            im["trace"] = nlohmann::ordered_json::array();
            for (Stage s : r.trace)
                im["trace"].push_back(to_string(s));
            im["error"] = r.error ? nlohmann::ordered_json(*r.error) : nullptr;
            m["images"].push_back(std::move(im));
        }
        j["methods"].push_back(std::move(m));
    }
    return j;
}

MethodRecords records_from_json(const nlohmann::json& report)
{
    MethodRecords out;
    for (const auto& m : report.at("methods")) {
        std::vector<MetricsRecord> recs;
        for (const auto& im : m.at("images")) {
            if (!im.at("error").is_null())
                continue;
            MetricsRecord r;
            r.image_id = im.at("id").get<std::string>();
            const auto tier = parse_tier(im.at("tier").get<std::string>());
            if (!tier)
                throw std::runtime_error("report.json: bad tier for " + r.image_id);
            r.tier = *tier;
            r.cer = json_opt(im, "cer");
            r.wer = json_opt(im, "wer");
            r.mean_confidence = im.at("conf").get<double>();
            const auto p = json_opt(im, "psnr_db");
            r.psnr = p ? PsnrValue::finite(*p) : PsnrValue::not_applicable();
            r.field_extraction = im.at("field_rate").get<double>();
            r.text_density = im.at("density").get<double>();
            r.noise_ratio = im.at("noise_ratio").get<double>();
            r.elapsed = im.at("time_s").get<double>();
            recs.push_back(std::move(r));
        }
        out.emplace_back(m.at("method").get<std::string>(), std::move(recs));
    }
    return out;
}

std::string format_tiers_csv(const TierCounts& tiers)
{
    return "tier,count\nHIGH," + std::to_string(tiers[0]) + "\nMEDIUM," + std::to_string(tiers[1]) + "\nLOW," +
           std::to_string(tiers[2]) + "\n";
}

std::string format_images_csv(const std::vector<MethodRun>& runs)
{
    std::string out =
        "method,image,tier,variance,cer,wer,conf,psnr_db,field_rate,density,noise_ratio,time_s,attempts,error\n";
    for (const auto& run : runs) {
        for (const auto& r : run.images) {
            const auto& m = r.metrics;
            out += std::string(to_string(run.method)) + ',' + csv_escape(m.image_id) + ',' +
                   std::string(to_string(m.tier)) + ',' + num(r.variance) + ',' + opt_num(m.cer) + ',' +
                   opt_num(m.wer) + ',' + num(m.mean_confidence) + ',' +
                   (m.psnr.is_finite() ? num(m.psnr.decibels()) : std::string("NA")) + ',' +
                   num(m.field_extraction) + ',' + num(m.text_density) + ',' + num(m.noise_ratio) + ',' +
                   num(m.elapsed) + ',' + (r.attempts ? std::to_string(r.attempts->attempts.size()) : "1") + ',' +
                   csv_escape(r.error.value_or("")) + '\n';
        }
    }
    return out;
}

void write_reports(const std::filesystem::path& dir, const std::vector<MethodRun>& runs, const TierCounts& tiers)
{
    if (runs.empty())
        throw std::invalid_argument("write_reports: no method was run");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    write_file(dir / "report.csv", format_report_csv(records_of(runs)));
    write_file(dir / "report.json", report_json(runs, tiers).dump(2) + "\n");
    write_file(dir / "tiers.csv", format_tiers_csv(tiers));
    write_file(dir / "images.csv", format_images_csv(runs));
}

}  // namespace billocr::harness

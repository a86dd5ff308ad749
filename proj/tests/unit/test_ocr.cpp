#include <doctest.h>

#include "billocr/imagecore.hpp"
#include "billocr/ocr.hpp"
#include "billocr/process.hpp"
#include "billocr/synth.hpp"
#include "oracles.hpp"

using namespace billocr;

namespace {

const std::string kHeader =
    "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext\n";

std::string row(std::initializer_list<std::string> cols)
{
    std::string out;
    for (const auto& c : cols)
        out += (out.empty() ? "" : "\t") + c;
    return out + "\n";
}

GrayImage sample_page()
{
    return render_text({"TOTAL 5.00", "CASH 10"}, 2, 8);
}

}  // namespace

TEST_CASE("TSV: header only gives no tokens")
{
    CHECK(parse_tesseract_tsv(kHeader).empty());
    CHECK_THROWS_AS(parse_tesseract_tsv(""), OutputParseError);
}

TEST_CASE("TSV: a word row becomes a token")
{
    const auto tokens = parse_tesseract_tsv(kHeader + row({"5", "1", "1", "1", "1", "1", "10", "20", "50", "12", "96.5", "TOTAL"}));
    REQUIRE(tokens.size() == 1);
    CHECK(tokens[0].text == "TOTAL");
    CHECK(tokens[0].confidence == 96.5);
    CHECK(tokens[0].bbox == BoundingBox{10, 20, 50, 12});
}

TEST_CASE("TSV: structural rows and negative confidences are skipped; lines are ordered")
{
    const std::string tsv = kHeader + row({"1", "1", "0", "0", "0", "0", "0", "0", "100", "50", "-1", ""}) +
                            row({"4", "1", "1", "1", "1", "0", "0", "0", "100", "10", "-1", ""}) +
                            row({"5", "1", "1", "1", "1", "1", "0", "0", "10", "10", "90", "TOTAL"}) +
                            row({"5", "1", "1", "1", "1", "2", "12", "0", "10", "10", "80", "5.00"}) +
                            row({"5", "1", "1", "1", "2", "1", "0", "12", "10", "10", "-1", " "}) +
                            row({"5", "1", "1", "1", "3", "1", "0", "24", "10", "10", "70", "CASH"});
    const auto tokens = parse_tesseract_tsv(tsv);
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0].line_index == tokens[1].line_index);
    CHECK(tokens[2].line_index > tokens[1].line_index);
    const auto r = OcrResult::from_tokens(tokens, "t", 0.0);
    CHECK(r.text() == "TOTAL 5.00\nCASH");
    CHECK(r.mean_confidence == doctest::Approx(80.0));
}

TEST_CASE("TSV: malformed rows report their row number")
{
    const std::string tsv = kHeader + row({"5", "1", "1", "1", "1", "1", "10", "20", "50", "12", "96.5", "OK"}) +
                            "5\t1\t1\t1\n";
    try {
        parse_tesseract_tsv(tsv);
        FAIL("expected OutputParseError");
    } catch (const OutputParseError& e) {
        CHECK(e.row() == 3);
    }
    CHECK_THROWS_AS(
        parse_tesseract_tsv(kHeader + row({"5", "1", "1", "1", "1", "1", "x", "20", "50", "12", "96.5", "A"})),
        OutputParseError);
}

TEST_CASE("confidence-line output")
{
    const auto tokens = parse_confidence_lines("95\tTOTAL 5.00\n\n60.5\tCASH\n");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[1].text == "5.00");
    CHECK(tokens[2].confidence == 60.5);
    CHECK(tokens[2].line_index == 1);
    try {
        parse_confidence_lines("95\tA\nno tab here\n");
        FAIL("expected OutputParseError");
    } catch (const OutputParseError& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(parse_confidence_lines("120\tA\n"), OutputParseError);
}

TEST_CASE("mock engine: blank page gives nothing")
{
    const auto r = recognize(EngineSpec::mock_engine(), GrayImage::filled(50, 30, 255.0));
    CHECK(r.tokens.empty());
    CHECK(r.mean_confidence == 0.0);
}

TEST_CASE("mock engine is a deterministic function of the image")
{
    const auto page = sample_page();
    const auto a = mock_recognize(page, {});
    const auto b = mock_recognize(page, {});
    CHECK(a == b);
    CHECK(a.tokens.size() == 4);
    CHECK(a.text().find('\n') != std::string::npos);
    // Identical glyph bitmaps hash to identical words.
    const auto twice = mock_recognize(render_text({"TOTAL TOTAL"}, 2, 8), {});
    REQUIRE(twice.tokens.size() == 2);
    CHECK(twice.tokens[0].text == twice.tokens[1].text);
}

TEST_CASE("mock confidence follows the variance profile")
{
    const auto page = sample_page();
    const double v = laplacian_variance(page);
    MockProfile p;
    p.divisor = 10.0;
    p.cap = 1e9;
    for (const auto& t : mock_recognize(page, p).tokens)
        CHECK(t.confidence == doctest::Approx(v / 10.0));

    // Scale the divisor so the variance maps to exactly 40.
    p.divisor = v / 40.0;
    CHECK(mock_recognize(page, p).mean_confidence == doctest::Approx(40.0));

    p = MockProfile{};
    const auto blurred = gaussian_blur(page, 5, 1.5);
    CHECK(mock_recognize(sharpen(blurred), p).mean_confidence >= mock_recognize(blurred, p).mean_confidence);
    CHECK(mock_recognize(page, p).mean_confidence <= 95.0);
}

TEST_CASE("external engines run through a subprocess")
{
    oracle::TempDir dir("ocr");
    const auto log = dir / "argv.txt";
    const auto fake = oracle::write_script(
        dir / "fake-tesseract",
        "echo \"$@\" > '" + log.string() + "'\n"
        "printf 'level\\tpage_num\\tblock_num\\tpar_num\\tline_num\\tword_num\\tleft\\ttop\\twidth\\theight\\tconf\\ttext\\n'\n"
        "printf '5\\t1\\t1\\t1\\t1\\t1\\t10\\t20\\t50\\t12\\t96.5\\tTOTAL\\n'\n");
    const auto r = recognize(EngineSpec::tesseract(fake.string()), sample_page());
    REQUIRE(r.tokens.size() == 1);
    CHECK(r.tokens[0].text == "TOTAL");
    CHECK(r.engine_id == "tesseract");
    const auto argv = oracle::read_file(log);
    CHECK(argv.find("stdout --oem 3 --psm 6 tsv") != std::string::npos);
    CHECK(argv.find(".png") != std::string::npos);

    const auto ext = oracle::write_script(dir / "fake-ext", "printf '88\\tRs. 100.50\\n'\n");
    const auto e = recognize(EngineSpec::external_command(ext.string()), sample_page());
    CHECK(e.text() == "Rs. 100.50");
    CHECK(e.mean_confidence == 88.0);
    CHECK(e.engine_id == "external_ocr");

    const auto failing = oracle::write_script(dir / "fails", "exit 3\n");
    CHECK_THROWS_AS(recognize(EngineSpec::external_command(failing.string()), sample_page()), EngineFailed);

    const auto garbage = oracle::write_script(dir / "garbage", "echo nonsense\n");
    CHECK_THROWS_AS(recognize(EngineSpec::tesseract(garbage.string()), sample_page()), OutputParseError);

    const auto slow = oracle::write_script(dir / "slow", "exec sleep 5\n");
    auto spec = EngineSpec::external_command(slow.string());
    spec.timeout_seconds = 0.3;
    CHECK_THROWS_AS(recognize(spec, sample_page()), EngineTimeout);
}

TEST_CASE("missing executables are unavailable")
{
    CHECK_THROWS_AS(make_engine(EngineSpec::tesseract("/nonexistent/tesseract-xyz")), EngineUnavailable);
    CHECK_THROWS_AS(make_engine(EngineSpec::external_command("no-such-ocr-binary-xyz")), EngineUnavailable);
    CHECK_FALSE(resolve_executable("no-such-ocr-binary-xyz").has_value());
    CHECK(resolve_executable("sh").has_value());
}

TEST_CASE("temporary images are removed")
{
    std::filesystem::path p;
    {
        TempImageFile f(sample_page());
        p = f.path();
        CHECK(std::filesystem::exists(p));
    }
    CHECK_FALSE(std::filesystem::exists(p));
}

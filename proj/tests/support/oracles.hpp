#pragma once

// Independent test oracles. Nothing here calls into the library's kernels, so
// a bug shared by a kernel and its serial reference still shows up.

#include <sys/stat.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "billocr/image.hpp"

namespace oracle {

inline billocr::GrayImage random_image(std::mt19937_64& rng, int w, int h)
{
    std::uniform_int_distribution<int> px(0, 255);
    std::vector<double> d(static_cast<std::size_t>(w) * h);
    for (double& v : d)
        v = px(rng);
    return billocr::GrayImage(w, h, std::move(d));
}

/// Double-loop correlation with replicate border; taps in row-major order.
inline std::vector<double> correlate(const billocr::GrayImage& img, const std::vector<double>& k, int size)
{
    const int r = size / 2;
    const int w = img.width(), h = img.height();
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < size; ++ky)
                for (int kx = 0; kx < size; ++kx) {
                    const int sx = std::clamp(x + kx - r, 0, w - 1);
                    const int sy = std::clamp(y + ky - r, 0, h - 1);
                    acc += k[static_cast<std::size_t>(ky) * size + kx] * img(sx, sy);
                }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    return out;
}

inline std::vector<double> clamp255(std::vector<double> v)
{
    for (double& x : v)
        x = std::clamp(x, 0.0, 255.0);
    return v;
}

inline double population_variance(const std::vector<double>& v)
{
    long double mean = 0;
    for (double x : v)
        mean += x;
    mean /= v.size();
    long double ss = 0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return static_cast<double>(ss / v.size());
}

/// exp(-(x^2 + y^2) / 2 sigma^2) sampled on the grid, normalized to sum 1.
inline std::vector<double> analytic_gaussian(int size, double sigma)
{
    const int r = size / 2;
    std::vector<double> k;
    long double sum = 0;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            k.push_back(std::exp(-(x * x + y * y) / (2.0 * sigma * sigma)));
            sum += k.back();
        }
    for (double& v : k)
        v = static_cast<double>(v / sum);
    return k;
}

/// Plain recursive Levenshtein, memoized on suffix positions.
template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b)
{
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size())
            return b.size() - j;
        if (j == b.size())
            return a.size() - i;
        if (auto it = memo.find({i, j}); it != memo.end())
            return it->second;
        std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
        best = std::min(best, go(i + 1, j) + 1);
        best = std::min(best, go(i, j + 1) + 1);
        return memo[{i, j}] = best;
    };
    return go(0, 0);
}

/// Exhaustive minimum over every 3-row alignment of the rows' token
/// sequences. `cost` prices one column given its three slots.
using Slot = std::optional<std::string>;
using ColumnCost = std::function<std::size_t(const std::array<Slot, 3>&)>;

inline std::size_t min_three_way(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                 const std::vector<std::string>& c, const ColumnCost& cost)
{
    const std::size_t na = a.size(), nb = b.size(), nc = c.size();
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::size_t> dp((na + 1) * (nb + 1) * (nc + 1), inf);
    auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> std::size_t& {
        return dp[(i * (nb + 1) + j) * (nc + 1) + k];
    };
    at(0, 0, 0) = 0;
    for (std::size_t i = 0; i <= na; ++i)
        for (std::size_t j = 0; j <= nb; ++j)
            for (std::size_t k = 0; k <= nc; ++k) {
                if (i + j + k == 0)
                    continue;
                std::size_t best = inf;
                // Every non-empty subset of rows consumes a token in this column.
                for (int mask = 1; mask < 8; ++mask) {
                    const bool ua = mask & 1, ub = mask & 2, uc = mask & 4;
                    if ((ua && i == 0) || (ub && j == 0) || (uc && k == 0))
                        continue;
                    std::array<Slot, 3> col;
                    if (ua)
                        col[0] = a[i - 1];
                    if (ub)
                        col[1] = b[j - 1];
                    if (uc)
                        col[2] = c[k - 1];
                    const std::size_t prev = at(i - ua, j - ub, k - uc);
                    best = std::min(best, prev + cost(col));
                }
                at(i, j, k) = best;
            }
    return at(na, nb, nc);
}

/// Gap-gap free, mismatch or token-gap 1.
inline std::size_t slot_cost(const Slot& x, const Slot& y)
{
    if (!x && !y)
        return 0;
    if (x && y && *x == *y)
        return 0;
    return 1;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("billocr-test-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream(p, std::ios::binary) << content;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline std::filesystem::path write_script(const std::filesystem::path& p, const std::string& body)
{
    write_file(p, "#!/bin/sh\n" + body);
    ::chmod(p.c_str(), 0755);
    return p;
}

}  // namespace oracle

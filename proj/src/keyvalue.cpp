#include "billocr/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "billocr/text.hpp"

namespace billocr {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

KeyValueFile KeyValueFile::parse(std::string_view text)
{
    KeyValueFile kv;
    int lineno = 0;
    for (const auto& raw : split_lines(text)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            // a '#' inside quotes belongs to the value
            const auto q = line.find('"');
            if (q == std::string::npos || hash < q)
                line.erase(hash);
        }
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        kv.values_[key] = value;
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const
{
    if (auto it = values_.find(key); it != values_.end())
        return it->second;
    return std::nullopt;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used != v->size())
            throw ConfigError("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: " + *v);
    }
}

int KeyValueFile::get_int(const std::string& key, int fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError("key '" + key + "': not an integer: " + *v);
    return out;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    const auto s = to_lower_ascii(*v);
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw ConfigError("key '" + key + "': not a boolean: " + *v);
}

std::vector<std::string> KeyValueFile::get_list(const std::string& key, std::vector<std::string> fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = v->find(',', start);
        auto item = trim(std::string_view(*v).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty())
            out.push_back(std::move(item));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

}  // namespace billocr

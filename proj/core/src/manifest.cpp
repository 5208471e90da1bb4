#include "preflab/manifest.hpp"

#include <fstream>
#include <sstream>

#include "preflab/errors.hpp"

namespace preflab {

void RunManifest::set(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}

void RunManifest::set_u64(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}

bool RunManifest::has(const std::string& key) const {
    for (const auto& [k, _] : entries)
        if (k == key) return true;
    return false;
}

std::string RunManifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw InputError("manifest: missing key '" + key + "'");
}

std::uint64_t RunManifest::get_u64(const std::string& key) const {
    return std::stoull(get(key));
}

std::vector<std::string> RunManifest::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v);
    return out;
}

std::string RunManifest::to_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
    return out.str();
}

RunManifest RunManifest::from_text(const std::string& text) {
    RunManifest m;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("manifest line " + std::to_string(line_no) +
                              ": expected key=value");
        m.entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

void RunManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    out << to_text();
    if (!out) throw IoError("manifest: cannot write " + path.string());
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("manifest: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

}  // namespace preflab

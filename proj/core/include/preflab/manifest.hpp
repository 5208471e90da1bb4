#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace preflab {

// Ordered key=value run record. Replaying a manifest's config and seeds
// reproduces byte-identical metrics files.
struct RunManifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set_u64(const std::string& key, std::uint64_t value);
    bool has(const std::string& key) const;
    // Throws InputError when the key is absent.
    std::string get(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    // All values whose key equals `key`, in insertion order.
    std::vector<std::string> get_all(const std::string& key) const;

    std::string to_text() const;
    static RunManifest from_text(const std::string& text);  // FormatError
    void save(const std::filesystem::path& path) const;     // IoError
    static RunManifest load(const std::filesystem::path& path);
};

}  // namespace preflab

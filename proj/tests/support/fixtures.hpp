#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swsforge::testing {

inline std::filesystem::path fixture_path(std::string_view rel) {
    return std::filesystem::path(SWSFORGE_FIXTURE_DIR) / rel;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_fixture(std::string_view rel) { return read_text(fixture_path(rel)); }

/// Fresh, empty scratch directory under the build tree.
inline std::filesystem::path scratch_dir(std::string_view name) {
    auto dir = std::filesystem::path(SWSFORGE_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace swsforge::testing

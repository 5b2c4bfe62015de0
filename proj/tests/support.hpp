#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tripleview/geometry.hpp"

#ifndef TV_FIXTURE_DIR
#error "TV_FIXTURE_DIR must be defined"
#endif

namespace testsupport {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(TV_FIXTURE_DIR) / name; }

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("tv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Uniform on the sphere (not uniform in yaw/pitch).
inline tripleview::ViewingDirection random_direction(std::mt19937_64& rng) {
    const double z = uniform(rng, -1.0, 1.0);
    const double yaw = uniform(rng, -180.0, 180.0);
    const double pitch = std::asin(z) * tripleview::kRadToDeg;
    return {yaw, pitch};
}

}  // namespace testsupport

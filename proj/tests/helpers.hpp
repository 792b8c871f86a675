#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "teamlens/gaze.hpp"
#include "teamlens/time_ns.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("teamlens_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Track straight from samples, already on the session clock.
inline teamlens::GazeTrack make_track(const std::vector<std::tuple<teamlens::TimeNs, double, double>>& samples,
                                      int width = 1280, int height = 960) {
    teamlens::GazeTrack track;
    track.wearer_id = "w";
    track.meta.width = width;
    track.meta.height = height;
    for (const auto& [t, x, y] : samples) {
        teamlens::GazeSample s;
        s.t_ns = t;
        s.x = x;
        s.y = y;
        s.valid = x >= 0 && x <= width && y >= 0 && y <= height;
        track.samples.push_back(s);
    }
    return track;
}

} // namespace testutil

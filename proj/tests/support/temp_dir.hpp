#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("csales-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter_++));
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    std::string path(const std::string& name = "") const {
        return name.empty() ? base_.string() : (base_ / name).string();
    }
    std::string write(const std::string& name, const std::string& content) const {
        const std::string p = path(name);
        std::ofstream f(p);
        f << content;
        return p;
    }

private:
    static inline int counter_ = 0;
    std::filesystem::path base_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream f(path);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace testutil

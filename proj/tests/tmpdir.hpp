#ifndef KNOTSCOPE_TESTS_TMPDIR_HPP
#define KNOTSCOPE_TESTS_TMPDIR_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

// Scratch directory removed on scope exit.
struct TmpDir {
    std::filesystem::path path;

    explicit TmpDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        static const auto stamp =
            std::chrono::steady_clock::now().time_since_epoch().count();
        path = std::filesystem::temp_directory_path() /
               ("knotscope_test_" + tag + "_" + std::to_string(stamp) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TmpDir(const TmpDir&) = delete;
    TmpDir& operator=(const TmpDir&) = delete;
};

#endif

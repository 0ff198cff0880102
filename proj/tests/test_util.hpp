#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "shdr/error.hpp"

namespace testutil {

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("shdr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

template <typename F>
shdr::ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const shdr::Error& e) {
        return e.code();
    }
    FAIL("expected an shdr::Error");
    return shdr::ErrorCode::IoError;
}

}  // namespace testutil

#include "lutfilt/fsio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace lutfilt {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    f.seekg(0, std::ios::end);
    const std::streamoff len = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> data(static_cast<size_t>(len));
    if (len > 0)
        f.read(reinterpret_cast<char*>(data.data()), len);
    if (!f)
        throw std::runtime_error("short read from '" + path + "'");
    return data;
}

void write_file_atomic(const std::string& path, const unsigned char* data, size_t size) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(static_cast<unsigned long>(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot create '" + tmp.string() + "'");
        if (size > 0)
            f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move temp file onto '" + path + "'");
    }
}

void write_file_atomic(const std::string& path, const std::vector<unsigned char>& data) {
    write_file_atomic(path, data.data(), data.size());
}

}  // namespace lutfilt

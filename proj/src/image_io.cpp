#include "lutfilt/image_io.hpp"

#include <cctype>
#include <cstring>

#include "lutfilt/fsio.hpp"

namespace lutfilt {

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(const std::vector<unsigned char>& buf, size_t& pos) {
    for (;;) {
        while (pos < buf.size() && std::isspace(buf[pos]))
            ++pos;
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n')
                ++pos;
            continue;
        }
        break;
    }
    std::string tok;
    while (pos < buf.size() && !std::isspace(buf[pos]) && buf[pos] != '#')
        tok.push_back(static_cast<char>(buf[pos++]));
    if (tok.empty())
        throw std::runtime_error("pgm: truncated header");
    return tok;
}

int header_int(const std::vector<unsigned char>& buf, size_t& pos) {
    const std::string tok = next_token(buf, pos);
    size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("pgm: bad header field '" + tok + "'");
    }
    if (used != tok.size())
        throw std::runtime_error("pgm: bad header field '" + tok + "'");
    return v;
}

}  // namespace

Plane read_pgm(const std::string& path) {
    const auto buf = read_file(path);
    size_t pos = 0;
    if (next_token(buf, pos) != "P5")
        throw std::runtime_error("pgm: '" + path + "' is not binary PGM (P5)");
    const int w = header_int(buf, pos);
    const int h = header_int(buf, pos);
    const int maxval = header_int(buf, pos);
    if (w <= 0 || h <= 0)
        throw std::runtime_error("pgm: bad dimensions in '" + path + "'");
    if (maxval != 255)
        throw std::runtime_error("pgm: only maxval 255 is supported");
    ++pos;  // the single whitespace byte after maxval
    Plane p(w, h);
    if (buf.size() - pos < p.pixel_count())
        throw std::runtime_error("pgm: truncated pixel data in '" + path + "'");
    std::memcpy(p.data.data(), buf.data() + pos, p.pixel_count());
    return p;
}

void write_pgm(const std::string& path, const Plane& p) {
    if (p.empty())
        throw std::invalid_argument("write_pgm: empty plane");
    std::string header = "P5\n" + std::to_string(p.width) + " " + std::to_string(p.height) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.insert(out.end(), p.data.begin(), p.data.end());
    write_file_atomic(path, out);
}

Plane read_raw(const std::string& path, int width, int height) {
    const auto buf = read_file(path);
    Plane p(width, height);
    if (buf.size() != p.pixel_count())
        throw std::runtime_error("raw: '" + path + "' is not " + std::to_string(width) + "x" +
                                 std::to_string(height) + " (got " + std::to_string(buf.size()) + " bytes)");
    std::memcpy(p.data.data(), buf.data(), buf.size());
    return p;
}

void write_raw(const std::string& path, const Plane& p) {
    write_file_atomic(path, p.data);
}

std::vector<Frame> read_yuv420(const std::string& path, int width, int height) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("yuv: dimensions must be positive");
    const auto buf = read_file(path);
    const int cw = (width + 1) / 2, ch = (height + 1) / 2;
    const size_t ysz = static_cast<size_t>(width) * height;
    const size_t csz = static_cast<size_t>(cw) * ch;
    const size_t frame_sz = ysz + 2 * csz;
    if (buf.empty() || buf.size() % frame_sz != 0)
        throw std::runtime_error("yuv: '" + path + "' length is not a multiple of the " +
                                 std::to_string(frame_sz) + "-byte frame size");
    std::vector<Frame> frames;
    for (size_t off = 0; off < buf.size(); off += frame_sz) {
        Plane y(width, height), u(cw, ch), v(cw, ch);
        std::memcpy(y.data.data(), buf.data() + off, ysz);
        std::memcpy(u.data.data(), buf.data() + off + ysz, csz);
        std::memcpy(v.data.data(), buf.data() + off + ysz + csz, csz);
        frames.push_back(Frame::yuv420(std::move(y), std::move(u), std::move(v)));
    }
    return frames;
}

void write_yuv420(const std::string& path, const std::vector<Frame>& frames) {
    if (frames.empty())
        throw std::invalid_argument("write_yuv420: no frames");
    std::vector<unsigned char> out;
    for (const Frame& f : frames) {
        if (f.format != ChromaFormat::Yuv420)
            throw std::invalid_argument("write_yuv420: frame is not 4:2:0");
        out.insert(out.end(), f.y.data.begin(), f.y.data.end());
        out.insert(out.end(), f.u.data.begin(), f.u.data.end());
        out.insert(out.end(), f.v.data.begin(), f.v.data.end());
    }
    write_file_atomic(path, out);
}

}  // namespace lutfilt

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lutfilt/compact.hpp"
#include "lutfilt/config.hpp"
#include "lutfilt/fsio.hpp"
#include "lutfilt/image_io.hpp"
#include "lutfilt/lut_io.hpp"
#include "lutfilt/metrics.hpp"
#include "lutfilt/pipeline.hpp"
#include "lutfilt/rd.hpp"

namespace {

using namespace lutfilt;
using nlohmann::json;

// exit codes: 0 ok, 2 usage, 3 data error, 4 verification failure
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitVerify = 4;

struct FrameSize {
    int w = 0, h = 0;
};

FrameSize parse_size(const std::string& s) {
    FrameSize fs;
    char sep = 0;
    if (std::sscanf(s.c_str(), "%d%c%d", &fs.w, &sep, &fs.h) != 3 || sep != 'x' || fs.w < 1 ||
        fs.h < 1)
        throw std::invalid_argument("size must be WxH with positive dimensions");
    return fs;
}

const CLI::Validator kSizeValidator(
    [](std::string& s) -> std::string {
        try {
            parse_size(s);
        } catch (const std::exception& e) {
            return e.what();
        }
        return {};
    },
    "WxH");

const CLI::Validator kRationalValidator(
    [](std::string& s) -> std::string {
        try {
            parse_rational(s);
        } catch (const std::exception& e) {
            return e.what();
        }
        return {};
    },
    "RATIONAL");

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// A loaded input: one gray PGM frame or a run of raw 4:2:0 frames.
struct Clip {
    bool yuv = false;
    std::vector<Frame> frames;
};

Clip read_clip(const std::string& path, const std::string& size_arg) {
    Clip c;
    if (ends_with(path, ".pgm")) {
        if (!size_arg.empty())
            throw std::invalid_argument("--size only applies to raw YUV input");
        c.frames.push_back(Frame::gray(read_pgm(path)));
    } else {
        if (size_arg.empty())
            throw std::invalid_argument("raw YUV input needs --size WxH");
        const FrameSize fs = parse_size(size_arg);
        c.yuv = true;
        c.frames = read_yuv420(path, fs.w, fs.h);
    }
    return c;
}

void write_clip(const std::string& path, const Clip& c) {
    if (c.yuv)
        write_yuv420(path, c.frames);
    else
        write_pgm(path, c.frames.at(0).y);
}

std::string format_db(double v) {
    if (std::isinf(v))
        return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

// ---- build ----

Pattern pattern_from_arg(const std::string& arg) {
    if (!arg.empty() && arg.find_first_not_of("0123456789") == std::string::npos)
        return default_pattern(std::stoi(arg));

    std::ifstream f(arg);
    if (!f)
        throw std::runtime_error("cannot open pattern file '" + arg + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("pattern file '" + arg + "': " + e.what());
    }
    if (!j.is_array())
        throw std::runtime_error("pattern file must hold an array of [dy,dx] pairs");
    Pattern p;
    for (const json& o : j) {
        if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() || !o[1].is_number_integer())
            throw std::runtime_error("pattern file must hold an array of [dy,dx] pairs");
        p.offsets.push_back(PatternOffset{static_cast<int8_t>(o[0].get<int>()),
                                          static_cast<int8_t>(o[1].get<int>())});
    }
    p.validate();
    return p;
}

int cmd_build(const std::string& oracle_spec, const std::string& pattern_arg, int q,
              const std::string& out) {
    const Oracle o = oracles::parse(oracle_spec);
    LutFile f;
    f.clipped = cache_clipped(o, Sampling{q});
    if (pattern_arg.empty()) {
        f.kind = LutKind::Channel;  // co-located channel table, no geometry
    } else {
        f.kind = LutKind::Clipped;
        f.pattern = pattern_from_arg(pattern_arg);
    }
    save_lutf(out, f);
    return 0;
}

// ---- compact ----

int cmd_compact(const std::string& in, int dw, int Q, int p, const std::string& out) {
    const LutFile src = load_lutf(in);
    if (src.kind != LutKind::Clipped)
        throw std::runtime_error("compact: '" + in + "' is not a clipped spatial table");
    LutFile dst;
    dst.kind = LutKind::Compacted;
    dst.pattern = src.pattern;
    dst.compacted = compact_lut(src.clipped, p, dw, Q);
    save_lutf(out, dst);
    return 0;
}

// ---- stats report ----

const char* lut_kind_name(const AnyLut& l) {
    return std::holds_alternative<CompactedLut>(l) ? "compacted" : "clipped";
}

json ops_json(const OpCounter& c) {
    json ops;
    for (OpKind kind : {OpKind::Add, OpKind::Mul}) {
        json row;
        for (OpWidth w : {OpWidth::Int8, OpWidth::Int16, OpWidth::Int32, OpWidth::Float32})
            row[op_width_name(w)] = c.get(kind, w);
        ops[kind == OpKind::Add ? "add" : "mul"] = row;
    }
    return ops;
}

json stats_json(const Pipeline& pl, const OpCounter& c, int width, int height, bool yuv,
                uint64_t frames, uint64_t pixels) {
    const EnergyModel em;
    json tables = json::array();
    for (size_t i = 0; i < pl.luts.size(); ++i) {
        const AnyLut& l = pl.luts[i];
        tables.push_back({{"index", i},
                          {"kind", lut_kind_name(l)},
                          {"n", lut_arity(l)},
                          {"v", lut_values(l)},
                          {"payload_bytes", lut_payload_bytes(l)}});
    }
    return json{{"frame", {{"width", width}, {"height", height}, {"format", yuv ? "yuv420" : "gray"},
                           {"count", frames}}},
                {"tables", tables},
                {"total_payload_bytes", total_lut_payload_bytes(pl)},
                {"ops", ops_json(c)},
                {"energy_pj", em.cost_pj(c)},
                {"energy_pj_per_pixel", energy_per_pixel(c, em, pixels)}};
}

void print_stats_text(const json& st, std::ostream& os) {
    const json& fr = st["frame"];
    os << "frame: " << fr["width"].get<int>() << "x" << fr["height"].get<int>() << " "
       << fr["format"].get<std::string>() << " x" << fr["count"].get<uint64_t>() << "\n";
    os << "tables: " << st["tables"].size() << "\n";
    for (const json& t : st["tables"])
        os << "  [" << t["index"].get<size_t>() << "] " << t["kind"].get<std::string>() << " n="
           << t["n"].get<int>() << " v=" << t["v"].get<int>() << " payload="
           << t["payload_bytes"].get<uint64_t>() << " B\n";
    os << "total payload: " << st["total_payload_bytes"].get<uint64_t>() << " B\n";
    os << "ops:\n";
    for (const char* kind : {"add", "mul"})
        for (const char* w : {"int8", "int16", "int32", "float32"})
            os << "  " << kind << " " << w << ": " << st["ops"][kind][w].get<uint64_t>() << "\n";
    os << "energy: " << std::fixed << std::setprecision(2) << st["energy_pj"].get<double>()
       << " pJ total, " << std::setprecision(4) << st["energy_pj_per_pixel"].get<double>()
       << " pJ/px\n";
}

uint64_t frame_pixels(const Frame& f) {
    uint64_t n = f.y.data.size();
    if (f.format == ChromaFormat::Yuv420)
        n += f.u.data.size() + f.v.data.size();
    return n;
}

// ---- filter ----

int cmd_filter(const std::string& config, const std::string& in, const std::string& size,
               const std::string& out, const std::string& reference, const std::string& lambda,
               const std::string& stats_path) {
    Pipeline pl = load_pipeline_config(config);
    const Clip clip = read_clip(in, size);

    Clip ref;
    if (!reference.empty()) {
        ref = read_clip(reference, size);
        if (ref.yuv != clip.yuv || ref.frames.size() != clip.frames.size())
            throw std::runtime_error("reference does not match the input (format or frame count)");
        if (ref.frames[0].y.width != clip.frames[0].y.width ||
            ref.frames[0].y.height != clip.frames[0].y.height)
            throw std::runtime_error("reference does not match the input dimensions");
    }
    const bool rd_merge = !lambda.empty();
    RdParams params = pl.rd;
    if (rd_merge) {
        const Rational lam = parse_rational(lambda);
        params.lambda_num = lam.num;
        params.lambda_den = lam.den;
    }

    OpCounter counter;
    OpCounter* cp = stats_path.empty() ? nullptr : &counter;
    uint64_t pixels = 0;

    Clip result;
    result.yuv = clip.yuv;
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        const Frame& recon = clip.frames[i];
        pixels += frame_pixels(recon);
        Frame merged = run_pipeline(pl, recon, cp);
        if (rd_merge) {
            const RdResult res = rd_decide(ref.frames[i], recon, merged, params);
            merged = res.merged;
            uint64_t on = 0;
            for (uint8_t f : res.flags_y)
                on += f;
            for (uint8_t f : res.flags_u)
                on += f;
            for (uint8_t f : res.flags_v)
                on += f;
            const uint64_t total = res.flags_y.size() + res.flags_u.size() + res.flags_v.size();
            std::cout << "frame " << i << " rd: " << on << "/" << total << " blocks on, "
                      << res.flag_bits << " flag bits\n";
        }
        if (!reference.empty()) {
            const Frame& orig = ref.frames[i];
            std::cout << "frame " << i << " Y PSNR: " << format_db(psnr(orig.y, recon.y)) << " -> "
                      << format_db(psnr(orig.y, merged.y)) << " dB\n";
            if (clip.yuv) {
                std::cout << "frame " << i << " U PSNR: " << format_db(psnr(orig.u, recon.u))
                          << " -> " << format_db(psnr(orig.u, merged.u)) << " dB\n";
                std::cout << "frame " << i << " V PSNR: " << format_db(psnr(orig.v, recon.v))
                          << " -> " << format_db(psnr(orig.v, merged.v)) << " dB\n";
            }
        }
        result.frames.push_back(std::move(merged));
    }
    write_clip(out, result);

    if (!stats_path.empty()) {
        const json st = stats_json(pl, counter, clip.frames[0].y.width, clip.frames[0].y.height,
                                   clip.yuv, clip.frames.size(), pixels);
        const std::string text = st.dump(2) + "\n";
        write_file_atomic(stats_path, reinterpret_cast<const unsigned char*>(text.data()),
                          text.size());
    }
    return 0;
}

// ---- stats ----

int cmd_stats(const std::string& config, const std::string& size, bool as_json) {
    Pipeline pl = load_pipeline_config(config);
    const FrameSize fs = parse_size(size);
    const bool yuv = !pl.chroma.empty() || pl.cross.has_value();

    // deterministic synthetic content so reports are comparable across runs
    Plane y(fs.w, fs.h);
    for (int r = 0; r < fs.h; ++r)
        for (int x = 0; x < fs.w; ++x)
            y.at(r, x) = static_cast<uint8_t>((x + 2 * r) & 0xff);
    Frame frame;
    if (yuv) {
        const int cw = (fs.w + 1) / 2, ch = (fs.h + 1) / 2;
        Plane u(cw, ch), v(cw, ch);
        for (int r = 0; r < ch; ++r)
            for (int x = 0; x < cw; ++x) {
                u.at(r, x) = static_cast<uint8_t>((2 * x + r) & 0xff);
                v.at(r, x) = static_cast<uint8_t>((x + 3 * r) & 0xff);
            }
        frame = Frame::yuv420(std::move(y), std::move(u), std::move(v));
    } else {
        frame = Frame::gray(std::move(y));
    }

    OpCounter c;
    run_pipeline(pl, frame, &c);
    const json st = stats_json(pl, c, fs.w, fs.h, yuv, 1, frame_pixels(frame));
    if (as_json)
        std::cout << st.dump(2) << "\n";
    else
        print_stats_text(st, std::cout);
    return 0;
}

// ---- verify ----

bool suite_grid_fidelity(std::ostream& os) {
    std::mt19937 rng(7);
    const Sampling s{4};
    for (int trial = 0; trial < 5; ++trial) {
        // random affine oracle with headroom: Q8 coefficients summing to at
        // most 240 and a small non-negative bias keep the output strictly
        // inside [0,255], so the clip never bends the function
        std::vector<int> coeff(4, 0);
        int rest = 128 + static_cast<int>(rng() % 113);
        for (int i = 0; i < 3; ++i) {
            const int c = static_cast<int>(rng() % (rest + 1));
            coeff[i] = c;
            rest -= c;
        }
        coeff[3] = rest;
        const int bias = static_cast<int>(rng() % 9);
        const Oracle o = oracles::weighted_average(coeff, bias);
        const ClippedLut lut = cache_clipped(o, s);
        for (int i = 0; i < 20000; ++i) {
            uint8_t in[4];
            for (uint8_t& v : in)
                v = static_cast<uint8_t>(rng() & 0xff);
            int want = 0, got = 0;
            o.eval(in, &want);
            retrieve_clipped(lut, in, &got, nullptr);
            if (std::abs(got - want) > 1) {
                os << "grid-fidelity: |" << got << " - " << want << "| > 1 at oracle " << trial
                   << "\n";
                return false;
            }
        }
    }
    return true;
}

bool suite_weight_conservation(std::ostream& os) {
    const int W = 16;
    for (int l0 = 0; l0 < W; ++l0)
        for (int l1 = 0; l1 < W; ++l1)
            for (int l2 = 0; l2 < W; ++l2)
                for (int l3 = 0; l3 < W; ++l3) {
                    const SimplexRule r = simplex_rule4({l0, l1, l2, l3}, W);
                    int sum = 0;
                    for (int w : r.weights) {
                        if (w < 0) {
                            os << "weight-conservation: negative weight at (" << l0 << "," << l1
                               << "," << l2 << "," << l3 << ")\n";
                            return false;
                        }
                        sum += w;
                    }
                    if (sum != W) {
                        os << "weight-conservation: sum " << sum << " at (" << l0 << "," << l1
                           << "," << l2 << "," << l3 << ")\n";
                        return false;
                    }
                }

    // node queries must return the stored cell exactly
    std::mt19937 rng(11);
    const Sampling s{4};
    const Oracle o = oracles::edge_preserve(4, 32);
    const ClippedLut lut = cache_clipped(o, s);
    for (int i = 0; i < 2000; ++i) {
        int idx[4];
        uint8_t in[4];
        for (int d = 0; d < 4; ++d) {
            idx[d] = static_cast<int>(rng() % s.node_count());
            in[d] = static_cast<uint8_t>(s.node_value(idx[d]));
        }
        int got = 0;
        retrieve_clipped(lut, in, &got, nullptr);
        const int want = lut.value_at(idx, 0);
        if (got != want) {
            os << "weight-conservation: node query " << got << " != cell " << want << "\n";
            return false;
        }
    }
    return true;
}

bool suite_compaction_equivalence(std::ostream& os) {
    const Sampling s{4};

    // n=3, strided sweep: wherever the kernel support is fully diagonal the
    // compacted retrieval must match the source bit for bit
    {
        const ClippedLut lut = cache_clipped(oracles::edge_preserve(3, 48), s);
        const CompactedLut com = compact_lut(lut, 3, 2, 1);
        for (int x = 0; x < 256; x += 8)
            for (int yy = 0; yy < 256; yy += 8)
                for (int z = 0; z < 256; z += 8) {
                    const uint8_t in[3] = {static_cast<uint8_t>(x), static_cast<uint8_t>(yy),
                                           static_cast<uint8_t>(z)};
                    int msb[3], lsb[3];
                    for (int d = 0; d < 3; ++d) {
                        const MsbLsb ml = split_msb_lsb(in[d], s.q);
                        msb[d] = ml.msb;
                        lsb[d] = ml.lsb;
                    }
                    const InterpCorners k = cube_corners(msb, lsb, s, nullptr);
                    bool on_band = true;
                    for (int ci = 0; ci < k.count; ++ci)
                        if (k.weights[ci] > 0 && !is_diagonal(k.nodes[ci].data(), 3, 2))
                            on_band = false;
                    if (!on_band)
                        continue;
                    int a = 0, b = 0;
                    retrieve_clipped(lut, in, &a, nullptr);
                    retrieve_separable(com, in, &b, nullptr);
                    if (a != b) {
                        os << "compaction-equivalence: " << a << " != " << b << " at (" << x << ","
                           << yy << "," << z << ")\n";
                        return false;
                    }
                }
    }

    // n=4 random sampling with the default unified compaction
    {
        const ClippedLut lut = cache_clipped(oracles::box_average(4), s);
        const CompactedLut com = compact_lut(lut, 4, 2, 1);
        std::mt19937 rng(13);
        for (int i = 0; i < 100000; ++i) {
            uint8_t in[4];
            int msb[4], lsb[4];
            for (int d = 0; d < 4; ++d) {
                in[d] = static_cast<uint8_t>(rng() & 0xff);
                const MsbLsb ml = split_msb_lsb(in[d], s.q);
                msb[d] = ml.msb;
                lsb[d] = ml.lsb;
            }
            const InterpCorners k = simplex_corners(msb, lsb, 4, s, nullptr);
            bool on_band = true;
            for (int ci = 0; ci < k.count; ++ci)
                if (k.weights[ci] > 0 && !is_diagonal(k.nodes[ci].data(), 4, 2))
                    on_band = false;
            if (!on_band)
                continue;
            int a = 0, b = 0;
            retrieve_clipped(lut, in, &a, nullptr);
            retrieve_separable(com, in, &b, nullptr);
            if (a != b) {
                os << "compaction-equivalence: " << a << " != " << b << " at random draw " << i
                   << "\n";
                return false;
            }
        }
    }
    return true;
}

int cmd_verify(const std::string& suite) {
    struct Entry {
        const char* name;
        bool (*run)(std::ostream&);
    };
    const Entry suites[] = {{"grid-fidelity", suite_grid_fidelity},
                            {"weight-conservation", suite_weight_conservation},
                            {"compaction-equivalence", suite_compaction_equivalence}};
    bool all_ok = true;
    for (const Entry& e : suites) {
        if (suite != "all" && suite != e.name)
            continue;
        const bool ok = e.run(std::cerr);
        std::cout << "suite " << e.name << ": " << (ok ? "ok" : "FAIL") << "\n";
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative look-up-table filtering toolkit"};
    app.require_subcommand(1);

    std::string oracle_spec, pattern_arg, out_path;
    int q = 4;
    CLI::App* build = app.add_subcommand("build", "cache an oracle into a clipped LUTF file");
    build->add_option("--oracle", oracle_spec, "oracle spec, e.g. box:n=4 or chan-mix:m=192")
        ->required();
    build->add_option("--pattern", pattern_arg,
                      "stock pattern id 1..8 or a JSON offsets file; omit for channel tables");
    build->add_option("--q", q, "sampling shift (table has 2^(8-q)+1 nodes per axis)")
        ->check(CLI::Range(0, 8));
    build->add_option("--out", out_path, "output .lutf path")->required();

    std::string in_path;
    int dw = 0, Qs = 0, pdims = 2;
    CLI::App* compact = app.add_subcommand("compact", "compact a clipped table (diagonal + coarse)");
    compact->add_option("--in", in_path, "clipped .lutf input")->required();
    compact->add_option("--dw", dw, "diagonal half-width")->required();
    compact->add_option("--Q", Qs, "extra subsampling shift for the fallback table")->required();
    compact->add_option("--p", pdims, "leading dimensions covered by the band");
    compact->add_option("--out", out_path, "output .lutf path")->required();

    std::string config_path, size_arg, reference_path, lambda_arg, stats_path;
    CLI::App* filter = app.add_subcommand("filter", "run a pipeline over an image or YUV clip");
    filter->add_option("--config", config_path, "pipeline JSON")->required();
    filter->add_option("--in", in_path, "input .pgm, or raw 4:2:0 with --size")->required();
    filter->add_option("--size", size_arg, "frame size for raw YUV input")->check(kSizeValidator);
    filter->add_option("--out", out_path, "output path (same format as the input)")->required();
    CLI::Option* ref_opt =
        filter->add_option("--reference", reference_path, "original frames; enables PSNR report");
    filter->add_option("--rd-lambda", lambda_arg, "lambda for per-block RD merge (needs --reference)")
        ->check(kRationalValidator)
        ->needs(ref_opt);
    filter->add_option("--stats", stats_path, "write an ops/energy JSON report here");

    bool stats_as_json = false;
    CLI::App* stats = app.add_subcommand("stats", "report table storage, ops and energy");
    stats->add_option("--config", config_path, "pipeline JSON")->required();
    stats->add_option("--size", size_arg, "synthetic frame size")->required()->check(kSizeValidator);
    stats->add_flag("--json", stats_as_json, "emit JSON instead of text");

    std::string suite = "all";
    CLI::App* verify = app.add_subcommand("verify", "run built-in invariant suites");
    verify->add_option("--suite", suite, "grid-fidelity | weight-conservation | compaction-equivalence | all")
        ->check(CLI::IsMember(
            {"grid-fidelity", "weight-conservation", "compaction-equivalence", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (build->parsed())
            return cmd_build(oracle_spec, pattern_arg, q, out_path);
        if (compact->parsed())
            return cmd_compact(in_path, dw, Qs, pdims, out_path);
        if (filter->parsed())
            return cmd_filter(config_path, in_path, size_arg, out_path, reference_path, lambda_arg,
                              stats_path);
        if (stats->parsed())
            return cmd_stats(config_path, size_arg, stats_as_json);
        if (verify->parsed())
            return cmd_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}

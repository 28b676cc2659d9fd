#include "lutfilt/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include <json.hpp>

#include "lutfilt/compact.hpp"
#include "lutfilt/lut_io.hpp"
#include "lutfilt/rd.hpp"

namespace lutfilt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("config: " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!j.is_object())
        fail(ctx + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail("unknown key '" + it.key() + "' in " + ctx);
}

int get_int(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key))
        fail("missing '" + key + "' in " + ctx);
    if (!j[key].is_number_integer())
        fail("'" + key + "' in " + ctx + " must be an integer");
    return j[key].get<int>();
}

// Per-stage compaction request; tables referenced with identical parameters
// share one materialized entry.
struct CompactKey {
    int p = 0, dw = 0, Q = 0;
    bool operator<(const CompactKey& o) const {
        return std::tie(p, dw, Q) < std::tie(o.p, o.dw, o.Q);
    }
};

struct LutPool {
    std::map<std::string, LutFile> files;                    // id -> parsed file
    std::map<std::pair<std::string, CompactKey>, int> made;  // materialized index
    Pipeline* pl = nullptr;

    int materialize(const std::string& id, const CompactKey* ck, const std::string& ctx) {
        auto fit = files.find(id);
        if (fit == files.end())
            fail("stage in " + ctx + " references undefined table id '" + id + "'");
        const CompactKey key = ck ? *ck : CompactKey{};
        auto mit = made.find({id, key});
        if (mit != made.end())
            return mit->second;

        const LutFile& f = fit->second;
        int idx;
        if (ck) {
            if (f.kind == LutKind::Compacted)
                fail("table '" + id + "' is already compacted; per-stage compaction applies to clipped tables");
            pl->luts.emplace_back(compact_lut(f.clipped, ck->p, ck->dw, ck->Q));
            idx = static_cast<int>(pl->luts.size()) - 1;
        } else if (f.kind == LutKind::Compacted) {
            pl->luts.emplace_back(f.compacted);
            idx = static_cast<int>(pl->luts.size()) - 1;
        } else {
            pl->luts.emplace_back(f.clipped);
            idx = static_cast<int>(pl->luts.size()) - 1;
        }
        made[{id, key}] = idx;
        return idx;
    }
};

Pattern pattern_from_json(const json& j, const std::string& ctx) {
    check_keys(j, {"id", "offsets", "lut"}, ctx);
    const int id = get_int(j, "id", ctx);
    if (!j.contains("offsets"))
        return default_pattern(id);
    Pattern p;
    p.id = id;
    if (!j["offsets"].is_array())
        fail("'offsets' in " + ctx + " must be an array of [dy,dx] pairs");
    for (const json& o : j["offsets"]) {
        if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() || !o[1].is_number_integer())
            fail("'offsets' in " + ctx + " must be an array of [dy,dx] pairs");
        const int dy = o[0].get<int>(), dx = o[1].get<int>();
        if (dy < -128 || dy > 127 || dx < -128 || dx > 127)
            fail("offset out of byte range in " + ctx);
        p.offsets.push_back(PatternOffset{static_cast<int8_t>(dy), static_cast<int8_t>(dx)});
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(ctx + ": " + e.what());
    }
    return p;
}

std::vector<Stage> parse_stages(const json& arr, LutPool& pool, int& width, const std::string& which) {
    if (!arr.is_array())
        fail("'" + which + "' must be an array of stages");
    std::vector<Stage> stages;
    int sidx = 0;
    for (const json& js : arr) {
        const std::string ctx = which + "[" + std::to_string(sidx++) + "]";
        if (!js.is_object() || !js.contains("type") || !js["type"].is_string())
            fail(ctx + " needs a string 'type'");
        const std::string type = js["type"].get<std::string>();

        if (type == "spatial") {
            check_keys(js, {"type", "patterns", "weights", "rotation_ensemble", "compaction"}, ctx);
            SpatialStage st;
            std::unique_ptr<CompactKey> ck;
            if (js.contains("compaction")) {
                const json& jc = js["compaction"];
                check_keys(jc, {"p", "dw", "Q"}, ctx + ".compaction");
                ck = std::make_unique<CompactKey>();
                ck->p = get_int(jc, "p", ctx + ".compaction");
                ck->dw = get_int(jc, "dw", ctx + ".compaction");
                ck->Q = get_int(jc, "Q", ctx + ".compaction");
            }
            if (!js.contains("patterns") || !js["patterns"].is_array() || js["patterns"].empty())
                fail(ctx + " needs a non-empty 'patterns' array");
            for (const json& jp : js["patterns"]) {
                const std::string pctx = ctx + ".patterns";
                if (!jp.is_object() || !jp.contains("lut") || !jp["lut"].is_string())
                    fail(pctx + " entries need a 'lut' table id");
                PatternSlot slot;
                slot.pattern = pattern_from_json(jp, pctx);
                slot.lut = pool.materialize(jp["lut"].get<std::string>(), ck.get(), pctx);
                st.patterns.push_back(std::move(slot));
            }
            if (js.contains("rotation_ensemble")) {
                if (!js["rotation_ensemble"].is_boolean())
                    fail("'rotation_ensemble' in " + ctx + " must be a boolean");
                st.rotation_ensemble = js["rotation_ensemble"].get<bool>();
            }
            if (js.contains("weights")) {
                if (!js["weights"].is_array())
                    fail("'weights' in " + ctx + " must be an array");
                for (const json& w : js["weights"]) {
                    if (!w.is_number_integer())
                        fail("'weights' in " + ctx + " must be integers (Q8)");
                    st.weights.w.push_back(w.get<int>());
                }
            } else {
                st.weights = StageWeights::uniform(static_cast<int>(st.patterns.size()));
            }

            // Channel widths follow from the chain position and the table V.
            st.v_in = width;
            const int lut_v = lut_values(pool.pl->luts[st.patterns[0].lut]);
            if (st.v_in == 1)
                st.v_out = lut_v;
            else if (st.v_in == 2 && (lut_v == 1 || lut_v == 2))
                st.v_out = lut_v;
            else
                fail(ctx + ": unsupported channel shape (width " + std::to_string(st.v_in) +
                     ", table V " + std::to_string(lut_v) + ")");
            width = st.v_out;
            stages.emplace_back(std::move(st));
        } else if (type == "channel") {
            check_keys(js, {"type", "k", "lut"}, ctx);
            ChannelStage st;
            st.k = get_int(js, "k", ctx);
            if (!js.contains("lut") || !js["lut"].is_string())
                fail(ctx + " needs a 'lut' table id");
            st.lut = pool.materialize(js["lut"].get<std::string>(), nullptr, ctx);
            const int V = lut_values(pool.pl->luts[st.lut]);
            width = V == st.k ? st.k : 1;
            stages.emplace_back(st);
        } else {
            fail(ctx + ": unknown stage type '" + type + "'");
        }
    }
    return stages;
}

}  // namespace

Pipeline parse_pipeline_config(const std::string& json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("bad JSON: ") + e.what());
    }
    check_keys(root, {"sampling", "luts", "luma", "chroma", "cross_component", "rd"}, "config root");

    Pipeline pl;
    if (root.contains("sampling")) {
        check_keys(root["sampling"], {"q"}, "sampling");
        pl.sampling.q = get_int(root["sampling"], "q", "sampling");
    }
    pl.sampling.validate();

    LutPool pool;
    pool.pl = &pl;
    if (root.contains("luts")) {
        if (!root["luts"].is_object())
            fail("'luts' must map table ids to file paths");
        for (auto it = root["luts"].begin(); it != root["luts"].end(); ++it) {
            if (!it.value().is_string())
                fail("table '" + it.key() + "' must map to a file path");
            const std::filesystem::path p =
                std::filesystem::path(base_dir) / it.value().get<std::string>();
            pool.files.emplace(it.key(), load_lutf(p.string()));
        }
    }

    int width = 1;
    if (root.contains("luma")) {
        pl.luma = parse_stages(root["luma"], pool, width, "luma");
        if (!pl.luma.empty() && width != 1)
            fail("luma chain must end single-channel");
    }
    width = 1;
    if (root.contains("chroma")) {
        pl.chroma = parse_stages(root["chroma"], pool, width, "chroma");
        if (!pl.chroma.empty() && width != 1)
            fail("chroma chain must end single-channel");
    }
    if (root.contains("cross_component")) {
        const json& jx = root["cross_component"];
        check_keys(jx, {"lut_u", "lut_v"}, "cross_component");
        if (!jx.contains("lut_u") || !jx["lut_u"].is_string() || !jx.contains("lut_v") ||
            !jx["lut_v"].is_string())
            fail("cross_component needs 'lut_u' and 'lut_v' table ids");
        CrossComponent cc;
        cc.lut_u = pool.materialize(jx["lut_u"].get<std::string>(), nullptr, "cross_component");
        cc.lut_v = pool.materialize(jx["lut_v"].get<std::string>(), nullptr, "cross_component");
        pl.cross = cc;
    }
    if (root.contains("rd")) {
        const json& jr = root["rd"];
        check_keys(jr, {"lambda", "block", "flag_bits", "joint"}, "rd");
        if (jr.contains("lambda")) {
            Rational lam;
            if (jr["lambda"].is_string())
                lam = parse_rational(jr["lambda"].get<std::string>());
            else if (jr["lambda"].is_number_integer())
                lam = Rational{jr["lambda"].get<int64_t>(), 1};
            else
                fail("'lambda' must be an integer or a rational string like \"7/2\"");
            pl.rd.lambda_num = lam.num;
            pl.rd.lambda_den = lam.den;
        }
        if (jr.contains("block"))
            pl.rd.block = get_int(jr, "block", "rd");
        if (jr.contains("flag_bits"))
            pl.rd.flag_bits = get_int(jr, "flag_bits", "rd");
        if (jr.contains("joint")) {
            if (!jr["joint"].is_boolean())
                fail("'joint' must be a boolean");
            pl.rd.joint = jr["joint"].get<bool>();
        }
    }

    try {
        pl.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    return pl;
}

Pipeline load_pipeline_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_pipeline_config(text, dir.empty() ? "." : dir);
}

}  // namespace lutfilt

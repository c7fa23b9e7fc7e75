#pragma once

// Pipeline stages and the plan runner. Every stage is a pure function from
// input files to output files; the pipeline composes them in dependency
// order, writes manifest.json with a content hash per artifact, and with
// resume enabled skips any stage whose outputs already exist.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "betti.hpp"
#include "classify.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "knot.hpp"
#include "persistence.hpp"
#include "sampler.hpp"

namespace knotscope {

inline unsigned worker_count() {
    unsigned w = std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    if (const char* env = std::getenv("KNOTSCOPE_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) w = static_cast<unsigned>(v);
    }
    return w;
}

// Runs f(0..n-1) on the worker pool; the first exception wins and is
// rethrown on the caller's thread.
template <typename F>
inline void parallel_for(std::size_t n, F&& f) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct GenParams {
    std::vector<std::size_t> lengths;
    std::size_t count = 0;
    std::size_t burn_in_moves = 0;          // 0: default 100 * length
    std::size_t moves_between_samples = 0;  // 0: default 10 * length
};

struct TrefoilGenParams {
    std::vector<std::string> presets{"tight", "torus", "flat"};
    std::size_t edges = 90;
};

struct ClassifyParams {
    int projections = 3;
};

struct PhParams {
    double t_max = std::numeric_limits<double>::infinity();  // "auto"
};

struct FeatureParams {
    bool filter_spike = false;
    double eps_rel = 0.05;
};

struct CorrelateParams {
    GroupBy group_by = GroupBy::length;
    bool use_spearman = false;
};

// ---- stages ----

inline void stage_gen(const GenParams& p, std::uint64_t seed,
                      const std::string& out_path) {
    if (p.lengths.empty()) throw ValidationError("gen: no lengths given");
    if (p.count == 0) throw ValidationError("gen: count must be positive");
    auto f = detail::open_out(out_path);
    for (const std::size_t length : p.lengths) {
        SamplerConfig cfg;
        cfg.length = length;
        cfg.n_samples = p.count;
        cfg.seed = mix_seed(seed, length);
        cfg.burn_in_moves = p.burn_in_moves;
        cfg.moves_between_samples = p.moves_between_samples;
        validate_config(cfg);
        // samples are independent chains, so generate in parallel and write
        // in index order
        std::vector<KnotEmbedding> batch(p.count);
        parallel_for(p.count, [&](std::size_t i) { batch[i] = sample_single(cfg, i); });
        for (const KnotEmbedding& k : batch) f << knot_to_json_line(k) << "\n";
    }
}

inline void stage_gen_trefoil(const TrefoilGenParams& p, const std::string& out_path) {
    auto f = detail::open_out(out_path);
    for (const std::string& name : p.presets) {
        const KnotEmbedding k =
            parametric_trefoil(trefoil_preset(name, p.edges), "trefoil-" + name);
        f << knot_to_json_line(k) << "\n";
    }
}

inline std::vector<KnotEmbedding> load_stage_input(
    const std::vector<std::string>& candidates) {
    std::vector<KnotEmbedding> knots;
    bool any = false;
    for (const std::string& path : candidates) {
        if (!std::filesystem::exists(path)) continue;
        any = true;
        auto part = read_knots_jsonl(path);
        knots.insert(knots.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    if (!any) {
        throw DataError("missing input file '" + candidates.front() + "'");
    }
    return knots;
}

inline void stage_classify(const std::vector<std::string>& in_paths,
                           const std::string& out_path, const ClassifyParams& p) {
    std::vector<KnotEmbedding> knots = load_stage_input(in_paths);
    std::vector<std::string> types(knots.size());
    parallel_for(knots.size(), [&](std::size_t i) {
        types[i] = to_string(
            classify(knots[i], p.projections, mix_seed(knots[i].seed, 0xC1A5ULL)));
    });
    auto f = detail::open_out(out_path);
    for (std::size_t i = 0; i < knots.size(); ++i) {
        knots[i].knot_type = types[i];
        f << knot_to_json_line(knots[i]) << "\n";
    }
}

inline void stage_measure(const std::vector<std::string>& in_paths,
                          const std::string& out_path) {
    std::vector<KnotEmbedding> knots = load_stage_input(in_paths);
    std::vector<GeometryRow> rows(knots.size());
    parallel_for(knots.size(), [&](std::size_t i) {
        const GeometryRecord rec = measure(knots[i]);
        GeometryRow& r = rows[i];
        r.id = knots[i].id;
        r.length = knots[i].vertices.size();
        r.knot_type = knots[i].knot_type.value_or("unknown");
        r.rs_volume = rec.rs_volume;
        r.hull_volume = rec.hull_volume;
        r.rg = rec.rg;
        r.curvature = rec.curvature;
        r.torsion = rec.torsion;
        r.acn = rec.acn;
    });
    write_geometry_csv(out_path, rows);
}

inline void stage_ph(const std::vector<std::string>& in_paths,
                     const std::string& out_path, const PhParams& p) {
    std::vector<KnotEmbedding> knots = load_stage_input(in_paths);
    std::vector<BarcodeRecord> records(knots.size());
    parallel_for(knots.size(), [&](std::size_t i) {
        records[i].knot_id = knots[i].id;
        records[i].barcode = persistence(interpolate(knots[i], 10), p.t_max);
    });
    write_barcodes_csv(out_path, records);
}

inline void stage_features(const std::string& barcodes_path,
                           const std::vector<std::string>& knots_paths,
                           const std::string& out_path, const FeatureParams& p) {
    if (!(p.eps_rel > 0.0) || p.eps_rel >= 1.0) {
        throw ValidationError("features: eps_rel must be in (0,1)");
    }
    const std::vector<BarcodeRecord> records = read_barcodes_csv(barcodes_path);

    struct Meta {
        std::uint64_t length;
        std::string knot_type;
    };
    std::unordered_map<std::string, Meta> meta;
    for (const std::string& path : knots_paths) {
        if (!std::filesystem::exists(path)) continue;
        for (const KnotEmbedding& k : read_knots_jsonl(path)) {
            meta[k.id] = {k.vertices.size(), k.knot_type.value_or("unknown")};
        }
    }

    std::vector<FeatureRow> rows;
    rows.reserve(records.size());
    for (const BarcodeRecord& rec : records) {
        Barcode bc = p.filter_spike ? filter_spike(rec.barcode) : rec.barcode;
        FeatureRow r;
        r.id = rec.knot_id;
        const auto it = meta.find(rec.knot_id);
        if (it != meta.end()) {
            r.length = it->second.length;
            r.knot_type = it->second.knot_type;
        } else {
            // the cloud carries ten points per edge, so the dim-0 bar count
            // recovers the polygon length
            r.length = bc.dim0.size() / 10;
            r.knot_type = "unknown";
        }
        r.integral_I = total_persistence(bc);
        const BarStats st = bar_stats(bc);
        r.n_bars = st.n_bars;
        r.max_bar = st.max_bar;
        const BettiCurve curve = betti_curve(bc, 1, CurveScale::radius);
        if (curve.steps.empty()) {
            r.delta_eps = 0.0;
        } else {
            r.delta_eps = excess_statistic(curve, p.eps_rel * curve.steps.back().first);
        }
        r.spike_filtered = p.filter_spike;
        rows.push_back(std::move(r));
    }
    write_features_csv(out_path, rows);
}

inline void stage_correlate(const std::string& features_path,
                            const std::string& geometry_path,
                            const std::string& out_correlations,
                            const std::string& out_averages,
                            const CorrelateParams& p) {
    for (const std::string& path : {features_path, geometry_path}) {
        if (!std::filesystem::exists(path)) {
            throw DataError("missing input file '" + path + "'");
        }
    }
    const auto features = read_features_csv(features_path);
    const auto geometry = read_geometry_csv(geometry_path);
    write_correlations_csv(out_correlations,
                           correlate_by_group(features, geometry, p.group_by,
                                              default_correlation_pairs(),
                                              p.use_spearman));
    write_averages_csv(out_averages, average_feature_by_type(features, "I"));
}

// ---- plan ----

struct PipelinePlan {
    std::uint64_t seed = 0;
    std::vector<std::string> stages;
    GenParams gen;
    TrefoilGenParams trefoil;
    ClassifyParams classify_params;
    PhParams ph;
    FeatureParams features;
    CorrelateParams correlate;
};

inline PipelinePlan plan_from_json(const nlohmann::json& j, const std::string& where) {
    static const std::vector<std::string> known{
        "gen", "gen-trefoil", "classify", "measure", "ph", "features", "correlate"};
    PipelinePlan plan;
    try {
        if (!j.is_object()) throw DataError(where + ": plan must be a JSON object");
        plan.seed = j.value("seed", 0ULL);
        if (!j.contains("stages") || !j.at("stages").is_array()) {
            throw DataError(where + ": plan needs a 'stages' array");
        }
        for (const auto& s : j.at("stages")) {
            plan.stages.push_back(s.get<std::string>());
        }
        std::size_t prev = 0;
        for (const std::string& s : plan.stages) {
            const auto it = std::find(known.begin(), known.end(), s);
            if (it == known.end()) throw DataError(where + ": unknown stage '" + s + "'");
            const std::size_t idx = static_cast<std::size_t>(it - known.begin()) + 1;
            if (idx < prev) {
                throw DataError(where + ": stage '" + s + "' out of dependency order");
            }
            prev = idx;
        }
        if (j.contains("gen")) {
            const auto& g = j.at("gen");
            plan.gen.lengths = g.value("lengths", std::vector<std::size_t>{});
            plan.gen.count = g.value("count", std::size_t{0});
            plan.gen.burn_in_moves = g.value("burn_in_moves", std::size_t{0});
            plan.gen.moves_between_samples =
                g.value("moves_between_samples", std::size_t{0});
        }
        if (j.contains("gen-trefoil")) {
            const auto& g = j.at("gen-trefoil");
            plan.trefoil.presets =
                g.value("presets", std::vector<std::string>{"tight", "torus", "flat"});
            plan.trefoil.edges = g.value("edges", std::size_t{90});
        }
        if (j.contains("classify")) {
            plan.classify_params.projections = j.at("classify").value("projections", 3);
        }
        if (j.contains("ph")) {
            const auto& t = j.at("ph");
            if (t.contains("t_max") && !t.at("t_max").is_string()) {
                plan.ph.t_max = t.at("t_max").get<double>();
            }
        }
        if (j.contains("features")) {
            const auto& ft = j.at("features");
            plan.features.filter_spike = ft.value("filter_spike", false);
            plan.features.eps_rel = ft.value("eps_rel", 0.05);
        }
        if (j.contains("correlate")) {
            const auto& c = j.at("correlate");
            const std::string g = c.value("group_by", "length");
            if (g == "length") plan.correlate.group_by = GroupBy::length;
            else if (g == "type_length") plan.correlate.group_by = GroupBy::type_length;
            else throw DataError(where + ": group_by must be length or type_length");
            plan.correlate.use_spearman = c.value("spearman", false);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
    return plan;
}

inline PipelinePlan load_plan(const std::string& path) {
    auto f = detail::open_in(path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return plan_from_json(j, path);
}

inline void write_manifest(const std::filesystem::path& workdir, std::uint64_t seed) {
    static const std::vector<std::string> artifacts{
        "knots.jsonl",   "trefoils.jsonl",    "classified.jsonl",
        "geometry.csv",  "barcodes.csv",      "features.csv",
        "correlations.csv", "averages.csv"};
    auto f = detail::open_out((workdir / "manifest.json").string());
    f << "{\n  \"seed\": " << seed << ",\n  \"files\": {\n";
    bool first = true;
    for (const std::string& name : artifacts) {
        const auto path = workdir / name;
        if (!std::filesystem::exists(path)) continue;
        if (!first) f << ",\n";
        first = false;
        f << "    \"" << name << "\": \"" << file_hash(path.string()) << "\"";
    }
    f << "\n  }\n}\n";
}

// Runs the plan's stages in order inside workdir. With resume, stages whose
// outputs already exist are skipped. Throws on the first failing stage with
// the stage name in the message.
inline void run_plan(const PipelinePlan& plan, const std::filesystem::path& workdir,
                     bool resume, std::ostream& log) {
    std::filesystem::create_directories(workdir);
    const auto at = [&](const char* name) { return (workdir / name).string(); };
    const std::vector<std::string> knot_inputs{at("knots.jsonl"), at("trefoils.jsonl")};
    // classified records supersede the raw ones; never mix the two
    const auto preferred_input = [&]() -> std::vector<std::string> {
        if (std::filesystem::exists(at("classified.jsonl"))) {
            return {at("classified.jsonl")};
        }
        return knot_inputs;
    };

    for (const std::string& stage : plan.stages) {
        std::vector<std::string> outputs;
        if (stage == "gen") outputs = {at("knots.jsonl")};
        else if (stage == "gen-trefoil") outputs = {at("trefoils.jsonl")};
        else if (stage == "classify") outputs = {at("classified.jsonl")};
        else if (stage == "measure") outputs = {at("geometry.csv")};
        else if (stage == "ph") outputs = {at("barcodes.csv")};
        else if (stage == "features") outputs = {at("features.csv")};
        else outputs = {at("correlations.csv"), at("averages.csv")};

        if (resume) {
            bool done = true;
            for (const std::string& o : outputs) {
                if (!std::filesystem::exists(o)) done = false;
            }
            if (done) {
                log << "skip " << stage << " (outputs exist)\n";
                continue;
            }
        }
        log << "run " << stage << "\n";
        try {
            if (stage == "gen") {
                stage_gen(plan.gen, plan.seed, at("knots.jsonl"));
            } else if (stage == "gen-trefoil") {
                stage_gen_trefoil(plan.trefoil, at("trefoils.jsonl"));
            } else if (stage == "classify") {
                stage_classify(knot_inputs, at("classified.jsonl"), plan.classify_params);
            } else if (stage == "measure") {
                // prefer classified input so geometry rows carry knot types
                stage_measure(preferred_input(), at("geometry.csv"));
            } else if (stage == "ph") {
                stage_ph(preferred_input(), at("barcodes.csv"), plan.ph);
            } else if (stage == "features") {
                if (!std::filesystem::exists(at("barcodes.csv"))) {
                    throw DataError("missing input file '" + at("barcodes.csv") + "'");
                }
                stage_features(at("barcodes.csv"), preferred_input(),
                               at("features.csv"), plan.features);
            } else {
                stage_correlate(at("features.csv"), at("geometry.csv"),
                                at("correlations.csv"), at("averages.csv"),
                                plan.correlate);
            }
        } catch (const std::exception& e) {
            throw DataError("stage '" + stage + "' failed: " + e.what());
        }
    }
    write_manifest(workdir, plan.seed);
}

}  // namespace knotscope

// knotscope command line tool: random knot generation, classification,
// geometry, Rips persistence, barcode features, and grouped statistics.

#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <knotscope/knotscope.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

double parse_t_max(const std::string& value) {
    if (value == "auto") return std::numeric_limits<double>::infinity();
    try {
        const double t = std::stod(value);
        if (t <= 0.0) throw std::invalid_argument("nonpositive");
        return t;
    } catch (const std::exception&) {
        throw knotscope::DataError("--t-max must be 'auto' or a positive number, got '" +
                                   value + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knot sampling, classification, geometry and persistence pipeline"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "sample random equilateral polygons");
    std::vector<std::size_t> gen_lengths;
    std::size_t gen_count = 100;
    std::uint64_t gen_seed = 0;
    std::size_t gen_burn = 0, gen_gap = 0;
    std::string gen_out = "knots.jsonl";
    gen->add_option("--length", gen_lengths, "polygon edge count (repeatable)")
        ->required();
    gen->add_option("--count", gen_count, "samples per length");
    gen->add_option("--seed", gen_seed, "global seed");
    gen->add_option("--burn-in", gen_burn, "burn-in moves (default 100*length)");
    gen->add_option("--moves-between", gen_gap,
                    "additional moves per sample (default 10*length)");
    gen->add_option("--out", gen_out, "output JSONL path");

    // gen-trefoil
    auto* gtr = app.add_subcommand("gen-trefoil", "emit parametric trefoil embeddings");
    std::vector<std::string> gtr_presets{"tight", "torus", "flat"};
    std::size_t gtr_edges = 90;
    std::string gtr_out = "trefoils.jsonl";
    gtr->add_option("--preset", gtr_presets, "tight, torus or flat (repeatable)");
    gtr->add_option("--edges", gtr_edges, "edges per polygon");
    gtr->add_option("--out", gtr_out, "output JSONL path");

    // classify
    auto* cls = app.add_subcommand("classify", "identify knot types");
    std::string cls_in, cls_out = "classified.jsonl";
    int cls_proj = 3;
    cls->add_option("--in", cls_in, "input knots JSONL")->required();
    cls->add_option("--out", cls_out, "output JSONL with knot_type filled");
    cls->add_option("--projections", cls_proj, "projections per knot");

    // measure
    auto* mea = app.add_subcommand("measure", "geometric measures per knot");
    std::string mea_in, mea_out = "geometry.csv";
    mea->add_option("--in", mea_in, "input knots JSONL")->required();
    mea->add_option("--out", mea_out, "output CSV");

    // ph
    auto* ph = app.add_subcommand("ph", "Rips persistence barcodes");
    std::string ph_in, ph_out = "barcodes.csv", ph_tmax = "auto";
    ph->add_option("--in", ph_in, "input knots JSONL")->required();
    ph->add_option("--out", ph_out, "output CSV");
    ph->add_option("--t-max", ph_tmax, "filtration cutoff or 'auto'");

    // features
    auto* fea = app.add_subcommand("features", "barcode features");
    std::string fea_barcodes, fea_knots, fea_out = "features.csv";
    bool fea_filter = false;
    double fea_eps = 0.05;
    fea->add_option("--barcodes", fea_barcodes, "input barcodes CSV")->required();
    fea->add_option("--knots", fea_knots,
                    "knots JSONL for lengths and types (optional)");
    fea->add_option("--out", fea_out, "output CSV");
    fea->add_flag("--filter-spike", fea_filter, "drop discretization-spike bars");
    fea->add_option("--eps-rel", fea_eps, "excess statistic taper, fraction of support");

    // correlate
    auto* cor = app.add_subcommand("correlate", "grouped correlations and averages");
    std::string cor_features, cor_geometry;
    std::string cor_out = "correlations.csv", cor_avg = "averages.csv";
    std::string cor_group = "length";
    bool cor_spearman = false;
    cor->add_option("--features", cor_features, "features CSV")->required();
    cor->add_option("--geometry", cor_geometry, "geometry CSV")->required();
    cor->add_option("--out", cor_out, "correlations CSV");
    cor->add_option("--out-averages", cor_avg, "averages CSV");
    cor->add_option("--group-by", cor_group, "length or type_length");
    cor->add_flag("--spearman", cor_spearman, "rank correlation instead of Pearson");

    // pipeline
    auto* pip = app.add_subcommand("pipeline", "run a full plan");
    std::string pip_plan, pip_workdir = "out";
    bool pip_resume = false;
    pip->add_option("--plan", pip_plan, "plan JSON path")->required();
    pip->add_option("--workdir", pip_workdir, "output directory");
    pip->add_flag("--resume", pip_resume, "skip stages whose outputs exist");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        using namespace knotscope;
        if (*gen) {
            GenParams p;
            p.lengths = gen_lengths;
            p.count = gen_count;
            p.burn_in_moves = gen_burn;
            p.moves_between_samples = gen_gap;
            stage_gen(p, gen_seed, gen_out);
        } else if (*gtr) {
            TrefoilGenParams p;
            p.presets = gtr_presets;
            p.edges = gtr_edges;
            stage_gen_trefoil(p, gtr_out);
        } else if (*cls) {
            ClassifyParams p;
            p.projections = cls_proj;
            stage_classify({cls_in}, cls_out, p);
        } else if (*mea) {
            stage_measure({mea_in}, mea_out);
        } else if (*ph) {
            PhParams p;
            p.t_max = parse_t_max(ph_tmax);
            stage_ph({ph_in}, ph_out, p);
        } else if (*fea) {
            FeatureParams p;
            p.filter_spike = fea_filter;
            p.eps_rel = fea_eps;
            std::vector<std::string> knots;
            if (!fea_knots.empty()) knots.push_back(fea_knots);
            stage_features(fea_barcodes, knots, fea_out, p);
        } else if (*cor) {
            CorrelateParams p;
            if (cor_group == "length") p.group_by = GroupBy::length;
            else if (cor_group == "type_length") p.group_by = GroupBy::type_length;
            else throw DataError("--group-by must be length or type_length");
            p.use_spearman = cor_spearman;
            stage_correlate(cor_features, cor_geometry, cor_out, cor_avg, p);
        } else if (*pip) {
            const PipelinePlan plan = load_plan(pip_plan);
            run_plan(plan, pip_workdir, pip_resume, std::cerr);
        }
    } catch (const knotscope::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const knotscope::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

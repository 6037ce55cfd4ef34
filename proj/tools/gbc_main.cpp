// Command-line front end for the granular bi-clustering library. Each
// subcommand runs one pipeline stage on serialized intermediates so the
// expensive offline steps (granulation, trend construction) can be cached and
// reused across mining runs.

#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbc/gbc.hpp"

namespace {

struct GranulationCli {
    std::string method = "fcm";
    double kappa = 2.0;
    int fcm_restarts = 0;
    double tau = 0.5;
    int jig_windows = 0;
    int pso_particles = 30;
    int pso_iterations = 200;
    std::uint64_t seed = 0;
    int threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "Granulation method: fcm or jig")
            ->check(CLI::IsMember({"fcm", "jig"}))
            ->capture_default_str();
        cmd->add_option("--kappa", kappa, "FCM fuzziness coefficient")->capture_default_str();
        cmd->add_option("--fcm-restarts", fcm_restarts, "Extra seeded FCM restarts")->capture_default_str();
        cmd->add_option("--tau", tau, "JIG specificity decay")->capture_default_str();
        cmd->add_option("--jig-windows", jig_windows, "JIG window count (0 = half the distinct count)")
            ->capture_default_str();
        cmd->add_option("--pso-particles", pso_particles, "PSO particle count")->capture_default_str();
        cmd->add_option("--pso-iterations", pso_iterations, "PSO iteration cap")->capture_default_str();
        cmd->add_option("--seed", seed, "Root random seed")->capture_default_str();
        cmd->add_option("--threads", threads, "Thread cap (0 = GBC_THREADS env or hardware)")
            ->capture_default_str();
    }

    gbc::GranulationConfig config() const {
        gbc::GranulationConfig cfg;
        cfg.method = method == "jig" ? gbc::GranulationMethod::Jig : gbc::GranulationMethod::Fcm;
        cfg.fcm.kappa = kappa;
        cfg.fcm.restarts = fcm_restarts;
        cfg.tau = tau;
        cfg.jig_windows = jig_windows;
        cfg.pso.particles = pso_particles;
        cfg.pso.iterations = pso_iterations;
        cfg.seed = seed;
        cfg.threads = threads;
        return cfg;
    }
};

struct SearchCli {
    int min_gene = 15;
    int min_cond = 10;
    int L0 = 30;
    int rank = 1;
    std::vector<int> start_columns;
    std::vector<int> L0_sweep;

    void attach(CLI::App* cmd) {
        cmd->add_option("--min-gene", min_gene, "Minimum gene count per bicluster")->capture_default_str();
        cmd->add_option("--min-cond", min_cond, "Minimum condition count per bicluster")->capture_default_str();
        cmd->add_option("--L0", L0, "Initial lookahead")->capture_default_str();
        cmd->add_option("--rank", rank, "Chains run for MST ranks 1..rank")->capture_default_str();
        cmd->add_option("--start-cols", start_columns, "Start columns (0-based; default all)");
        cmd->add_option("--L0-sweep", L0_sweep, "Sweep of L0 values (default just --L0)");
    }

    gbc::SearchConfig config() const {
        gbc::SearchConfig cfg;
        cfg.min_gene = min_gene;
        cfg.min_cond = min_cond;
        cfg.L0 = L0;
        cfg.mst_rank = rank;
        cfg.start_columns = start_columns;
        cfg.L0_sweep = L0_sweep;
        return cfg;
    }
};

void write_json(const gbc::ordered_json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw gbc::InputError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw gbc::InputError("failed writing '" + path + "'");
}

gbc::ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gbc::InputError("cannot open '" + path + "'");
    gbc::ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw gbc::InputError("cannot parse '" + path + "': " + e.what());
    }
    return doc;
}

gbc::ordered_json labels_to_json(const gbc::LabelMatrix& labels, std::uint64_t matrix_hash,
                                 std::uint64_t config_hash) {
    gbc::ordered_json j;
    j["matrix_hash"] = matrix_hash;
    j["config_hash"] = config_hash;
    j["n"] = labels.n;
    j["m"] = labels.m;
    gbc::ordered_json rows = gbc::ordered_json::array();
    for (int i = 0; i < labels.n; ++i) {
        gbc::ordered_json row = gbc::ordered_json::array();
        for (int t = 0; t < labels.m; ++t) row.push_back(labels.at(i, t));
        rows.push_back(std::move(row));
    }
    j["labels"] = std::move(rows);
    j["granule_counts"] = labels.granule_counts;
    return j;
}

gbc::LabelMatrix labels_from_json(const gbc::ordered_json& j) {
    gbc::LabelMatrix labels;
    labels.n = j.at("n").get<int>();
    labels.m = j.at("m").get<int>();
    labels.granule_counts = j.at("granule_counts").get<std::vector<int>>();
    labels.labels.reserve(static_cast<std::size_t>(labels.n) * labels.m);
    for (const auto& row : j.at("labels"))
        for (const auto& v : row) labels.labels.push_back(v.get<int>());
    if (labels.labels.size() != static_cast<std::size_t>(labels.n) * labels.m)
        throw gbc::InputError("labels file is inconsistent with its declared dimensions");
    return labels;
}

// Builds a synthetic planted block: seeded random-walk base profile plus
// evenly spread per-row offsets.
gbc::PlantedBlock make_block(int rows, int cols, int row0, int col0, double amplitude, double offset_spread,
                             bool scaling, std::uint64_t seed) {
    gbc::PlantedBlock block;
    block.pattern = scaling ? gbc::PlantedBlock::Pattern::Scaling : gbc::PlantedBlock::Pattern::AdditiveShift;
    for (int r = 0; r < rows; ++r) block.rows.push_back(row0 + r);
    for (int c = 0; c < cols; ++c) block.cols.push_back(col0 + c);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sign(0.0, 1.0);
    double level = 0.0;
    for (int c = 0; c < cols; ++c) {
        level += (sign(rng) < 0.5 ? -1.0 : 1.0) * amplitude;
        block.base_profile.push_back(level);
    }
    for (int r = 0; r < rows; ++r) {
        const double frac = rows == 1 ? 0.5 : static_cast<double>(r) / (rows - 1);
        block.row_offsets.push_back(scaling ? 1.0 + frac : (frac - 0.5) * 2.0 * offset_spread);
    }
    return block;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Granular-computing bi-clustering of gene expression matrices"};
    app.require_subcommand(1);

    // --- granulate ---------------------------------------------------------
    auto* granulate = app.add_subcommand("granulate", "Granulate rows and emit the label matrix");
    GranulationCli gran_opts;
    std::string gran_input, gran_output = "labels.json", gran_cache;
    granulate->add_option("--input", gran_input, "Expression matrix (csv/tsv)")->required();
    granulate->add_option("--output", gran_output, "Label matrix output")->capture_default_str();
    granulate->add_option("--trend-cache", gran_cache, "Also write a binary trend cache");
    gran_opts.attach(granulate);

    // --- mine --------------------------------------------------------------
    auto* mine = app.add_subcommand("mine", "Mine initial biclusters from the trend matrix");
    GranulationCli mine_gran;
    SearchCli mine_search;
    std::string mine_input, mine_labels, mine_cache, mine_output = "initial.json";
    mine->add_option("--input", mine_input, "Expression matrix (csv/tsv)")->required();
    mine->add_option("--labels", mine_labels, "Precomputed label matrix (skips granulation)");
    mine->add_option("--trend-cache", mine_cache, "Binary trend cache to reuse/create");
    mine->add_option("--output", mine_output, "Initial bicluster output")->capture_default_str();
    mine_gran.attach(mine);
    mine_search.attach(mine);

    // --- refine ------------------------------------------------------------
    auto* refine_cmd = app.add_subcommand("refine", "Refine biclusters under MSR and MFD");
    std::string ref_input, ref_biclusters, ref_output = "refined.json";
    double ref_delta = 1200.0;
    int ref_passes = 10, ref_min_gene = 15, ref_min_cond = 10;
    bool ref_gate = false;
    refine_cmd->add_option("--input", ref_input, "Expression matrix (csv/tsv)")->required();
    refine_cmd->add_option("--biclusters", ref_biclusters, "Bicluster list to refine")->required();
    refine_cmd->add_option("--output", ref_output, "Refined bicluster output")->capture_default_str();
    refine_cmd->add_option("--delta", ref_delta, "MSR deletion threshold")->capture_default_str();
    refine_cmd->add_option("--max-passes", ref_passes, "Refinement pass cap")->capture_default_str();
    refine_cmd->add_option("--min-gene", ref_min_gene, "Deletion floor on genes")->capture_default_str();
    refine_cmd->add_option("--min-cond", ref_min_cond, "Deletion floor on conditions")->capture_default_str();
    refine_cmd->add_flag("--gate-add-on-delta", ref_gate, "Also require added rows/cols to respect delta");

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Full pipeline: granulate, mine, refine, emit");
    GranulationCli run_gran;
    SearchCli run_search;
    std::string run_input, run_output = "results.json", run_csv, run_cache;
    double run_delta = 1200.0;
    int run_passes = 10, run_top = 50;
    bool run_timings = false;
    run->add_option("--input", run_input, "Expression matrix (csv/tsv)")->required();
    run->add_option("--output", run_output, "Result bundle (json)")->capture_default_str();
    run->add_option("--csv", run_csv, "Also emit the plot-ready long-format table");
    run->add_option("--trend-cache", run_cache, "Binary trend cache to reuse/create");
    run->add_option("--delta", run_delta, "MSR deletion threshold")->capture_default_str();
    run->add_option("--max-passes", run_passes, "Refinement pass cap")->capture_default_str();
    run->add_option("--top", run_top, "Keep the top-n lowest-MFD biclusters")->capture_default_str();
    run->add_flag("--timings", run_timings, "Include per-stage timings in the bundle");
    run_gran.attach(run);
    run_search.attach(run);

    // --- synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a synthetic matrix with planted biclusters");
    int sy_genes = 200, sy_conds = 40;
    std::vector<std::string> sy_blocks;
    double sy_sigma = 0.1, sy_amp = 1.0, sy_spread = 2.0;
    bool sy_scaling = false;
    std::uint64_t sy_seed = 0;
    std::string sy_matrix = "matrix.csv", sy_truth = "truth.json";
    synth->add_option("--genes", sy_genes, "Gene count")->capture_default_str();
    synth->add_option("--conds", sy_conds, "Condition count")->capture_default_str();
    synth->add_option("--block", sy_blocks, "Planted block ROWSxCOLS@ROW0,COL0 (repeatable)");
    synth->add_option("--sigma", sy_sigma, "In-block noise sigma")->capture_default_str();
    synth->add_option("--amp", sy_amp, "Base-profile step amplitude")->capture_default_str();
    synth->add_option("--offset-spread", sy_spread, "Row offset spread")->capture_default_str();
    synth->add_flag("--scaling", sy_scaling, "Plant scaling-pattern blocks instead of additive shifts");
    synth->add_option("--seed", sy_seed, "Generator seed")->capture_default_str();
    synth->add_option("--matrix", sy_matrix, "Matrix output path")->capture_default_str();
    synth->add_option("--truth", sy_truth, "Ground-truth output path")->capture_default_str();

    // --- baseline-cc -------------------------------------------------------
    auto* cc = app.add_subcommand("baseline-cc", "Cheng-Church baseline biclustering");
    std::string cc_input, cc_output = "cc.json";
    double cc_delta = 1200.0, cc_alpha = 1.2;
    int cc_n = 50;
    std::uint64_t cc_seed = 0;
    cc->add_option("--input", cc_input, "Expression matrix (csv/tsv)")->required();
    cc->add_option("--output", cc_output, "Bicluster output")->capture_default_str();
    cc->add_option("--delta", cc_delta, "MSR homogeneity threshold")->capture_default_str();
    cc->add_option("--alpha", cc_alpha, "Multiple-deletion factor")->capture_default_str();
    cc->add_option("--n", cc_n, "Number of biclusters")->capture_default_str();
    cc->add_option("--seed", cc_seed, "Masking seed")->capture_default_str();

    // --- eval --------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Score found biclusters against ground truth");
    std::string ev_found, ev_truth, ev_output;
    eval->add_option("--found", ev_found, "Found bicluster list")->required();
    eval->add_option("--truth", ev_truth, "Ground-truth bicluster list")->required();
    eval->add_option("--output", ev_output, "Report output (default stdout)");

    // --- compare -----------------------------------------------------------
    auto* compare = app.add_subcommand("compare", "Mean/stddev MFD of the top-k biclusters per method");
    std::string cmp_matrix, cmp_output;
    std::vector<std::string> cmp_sets;
    int cmp_topk = 10;
    compare->add_option("--matrix", cmp_matrix, "Expression matrix (csv/tsv)")->required();
    compare->add_option("--set", cmp_sets, "NAME=biclusters.json (repeatable)")->required();
    compare->add_option("--top-k", cmp_topk, "Biclusters aggregated per method")->capture_default_str();
    compare->add_option("--output", cmp_output, "Report output (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (granulate->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(gran_input);
        const gbc::GranulationConfig cfg = gran_opts.config();
        const gbc::LabelMatrix labels = gbc::build_label_matrix(matrix, cfg);
        write_json(labels_to_json(labels, matrix.content_hash(), cfg.config_hash()), gran_output);
        if (!gran_cache.empty())
            gbc::save_trend_cache(gran_cache, labels, matrix.content_hash(), cfg.config_hash());
        std::cout << "granulated " << labels.n << " genes x " << labels.m << " conditions -> " << gran_output
                  << "\n";
    } else if (mine->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(mine_input);
        const gbc::GranulationConfig cfg = mine_gran.config();
        gbc::LabelMatrix labels;
        if (!mine_labels.empty()) {
            const auto doc = load_json(mine_labels);
            if (doc.value("matrix_hash", std::uint64_t{0}) != matrix.content_hash())
                throw gbc::InputError("label matrix was computed from a different expression matrix");
            labels = labels_from_json(doc);
        } else if (!mine_cache.empty()) {
            const std::uint64_t mh = matrix.content_hash();
            const std::uint64_t ch = cfg.config_hash();
            if (auto cached = gbc::load_trend_cache(mine_cache, mh, ch)) {
                labels = *cached;
            } else {
                labels = gbc::build_label_matrix(matrix, cfg);
                gbc::save_trend_cache(mine_cache, labels, mh, ch);
            }
        } else {
            labels = gbc::build_label_matrix(matrix, cfg);
        }
        const gbc::TrendMatrix trend = gbc::build_trend_matrix(labels);
        const gbc::SlopeAngleMatrix angles = gbc::slope_angles(matrix);
        gbc::SearchConfig search_cfg = mine_search.config();
        search_cfg.threads = cfg.threads;
        std::vector<gbc::Bicluster> found = gbc::mine_initial(trend, search_cfg, matrix, angles);
        for (auto& bc : found) bc.provenance.method = gbc::method_name(cfg.method);
        gbc::ordered_json out;
        out["biclusters"] = gbc::biclusters_to_json(found, matrix);
        write_json(out, mine_output);
        std::cout << "mined " << found.size() << " initial biclusters -> " << mine_output << "\n";
    } else if (refine_cmd->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(ref_input);
        const gbc::SlopeAngleMatrix angles = gbc::slope_angles(matrix);
        std::vector<gbc::Bicluster> list = gbc::load_biclusters(ref_biclusters);
        gbc::RefineConfig cfg{ref_delta, ref_passes, ref_min_gene, ref_min_cond, ref_gate};
        for (auto& bc : list) bc = gbc::refine(matrix, angles, bc, cfg);
        std::stable_sort(list.begin(), list.end(),
                         [](const gbc::Bicluster& a, const gbc::Bicluster& b) { return a.mfd < b.mfd; });
        gbc::ordered_json out;
        out["biclusters"] = gbc::biclusters_to_json(list, matrix);
        write_json(out, ref_output);
        std::cout << "refined " << list.size() << " biclusters -> " << ref_output << "\n";
    } else if (run->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(run_input);
        gbc::RunConfig cfg;
        cfg.granulation = run_gran.config();
        cfg.search = run_search.config();
        cfg.refine.delta = run_delta;
        cfg.refine.max_passes = run_passes;
        cfg.top_n = run_top;
        cfg.threads = run_gran.threads;
        cfg.seed = run_gran.seed;
        if (!run_cache.empty()) {
            cfg.use_trend_cache = true;
            cfg.trend_cache_path = run_cache;
        }
        const gbc::ResultBundle bundle = gbc::run_pipeline(cfg, matrix);
        gbc::emit_results(bundle, matrix, run_output, gbc::EmitFormat::Json, run_timings);
        if (!run_csv.empty()) gbc::emit_results(bundle, matrix, run_csv, gbc::EmitFormat::Csv);
        std::cout << "pipeline kept " << bundle.biclusters.size() << " biclusters -> " << run_output << "\n";
        if (!bundle.diagnostic.empty()) std::cout << "note: " << bundle.diagnostic << "\n";
    } else if (synth->parsed()) {
        gbc::SynthSpec spec;
        spec.n_genes = sy_genes;
        spec.n_conds = sy_conds;
        spec.noise_sigma = sy_sigma;
        spec.seed = sy_seed;
        for (std::size_t b = 0; b < sy_blocks.size(); ++b) {
            int rows = 0, cols = 0, row0 = 0, col0 = 0;
            if (std::sscanf(sy_blocks[b].c_str(), "%dx%d@%d,%d", &rows, &cols, &row0, &col0) != 4)
                throw gbc::InputError("cannot parse --block '" + sy_blocks[b] + "' (want ROWSxCOLS@ROW0,COL0)");
            spec.planted.push_back(make_block(rows, cols, row0, col0, sy_amp, sy_spread, sy_scaling,
                                              gbc::derive_seed(sy_seed, gbc::stage_tag("block"), b)));
        }
        const gbc::SynthResult result = gbc::generate(spec);
        gbc::save_matrix(result.matrix, sy_matrix);
        gbc::ordered_json truth;
        truth["biclusters"] = gbc::biclusters_to_json(result.truth, result.matrix);
        write_json(truth, sy_truth);
        std::cout << "generated " << sy_genes << "x" << sy_conds << " matrix with " << result.truth.size()
                  << " planted blocks -> " << sy_matrix << "\n";
    } else if (cc->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(cc_input);
        gbc::CcConfig cfg{cc_delta, cc_alpha, cc_n, cc_seed};
        std::vector<gbc::Bicluster> found = gbc::cc_mine(matrix, cfg);
        const gbc::SlopeAngleMatrix angles = gbc::slope_angles(matrix);
        for (auto& bc : found)
            if (bc.cols.size() >= 2) bc.mfd = gbc::mfd(matrix, angles, bc.rows, bc.cols);
        gbc::ordered_json out;
        out["biclusters"] = gbc::biclusters_to_json(found, matrix);
        write_json(out, cc_output);
        std::cout << "cheng-church found " << found.size() << " biclusters -> " << cc_output << "\n";
    } else if (eval->parsed()) {
        const std::vector<gbc::Bicluster> found = gbc::load_biclusters(ev_found);
        const std::vector<gbc::Bicluster> truth = gbc::load_biclusters(ev_truth);
        const auto [relevance, recovery] = gbc::recovery_score(found, truth);
        gbc::ordered_json report;
        report["relevance"] = relevance;
        report["recovery"] = recovery;
        if (ev_output.empty()) std::cout << report.dump(2) << "\n";
        else write_json(report, ev_output);
    } else if (compare->parsed()) {
        const gbc::ExpressionMatrix matrix = gbc::load_matrix(cmp_matrix);
        const gbc::SlopeAngleMatrix angles = gbc::slope_angles(matrix);
        std::vector<std::pair<std::string, std::vector<gbc::Bicluster>>> methods;
        for (const auto& spec : cmp_sets) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) throw gbc::InputError("--set wants NAME=path, got '" + spec + "'");
            std::vector<gbc::Bicluster> list = gbc::load_biclusters(spec.substr(eq + 1));
            for (auto& bc : list)
                if (std::isnan(bc.mfd) && bc.cols.size() >= 2) bc.mfd = gbc::mfd(matrix, angles, bc.rows, bc.cols);
            methods.emplace_back(spec.substr(0, eq), std::move(list));
        }
        const gbc::MfdReport report = gbc::compare_mfd(methods, cmp_topk);
        gbc::ordered_json out;
        out["top_k"] = report.top_k;
        out["methods"] = gbc::ordered_json::array();
        for (const auto& e : report.entries)
            out["methods"].push_back({{"name", e.name},
                                      {"mean_mfd", e.mean_mfd},
                                      {"stddev_mfd", e.stddev_mfd},
                                      {"used", e.used},
                                      {"truncated", e.truncated}});
        if (cmp_output.empty()) std::cout << out.dump(2) << "\n";
        else write_json(out, cmp_output);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const gbc::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const gbc::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

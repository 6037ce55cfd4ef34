#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbc/bicluster.hpp"
#include "gbc/matrix.hpp"
#include "gbc/pipeline.hpp"
#include "gbc/synthetic.hpp"

namespace gbc {

using ordered_json = nlohmann::ordered_json;

struct LoadOptions {
    char delimiter = 0;          // 0 = auto-detect comma vs tab from the header line
    bool impute_missing = false; // replace unparseable/missing cells with the row mean
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace detail

/**
 * Loads a delimiter-separated expression matrix: first row condition
 * identifiers (an optional leading corner cell is dropped), first column gene
 * identifiers, remaining cells decimal reals. Errors carry line/column
 * positions; missing cells are either rejected or row-mean imputed.
 */
inline ExpressionMatrix load_matrix(const std::string& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw InputError("matrix file '" + path + "' is empty");
    const char delim = opts.delimiter != 0
                           ? opts.delimiter
                           : (std::count(line.begin(), line.end(), '\t') >
                                      std::count(line.begin(), line.end(), ',')
                                  ? '\t'
                                  : ',');

    std::vector<std::string> header = detail::split_line(line, delim);
    for (auto& h : header) h = detail::trim(h);
    if (header.size() < 2) throw InputError("line 1: expected at least two header fields");

    std::vector<std::string> gene_ids;
    std::vector<double> values;
    std::vector<std::string> first_data_fields;
    std::size_t expected_fields = 0;
    int line_no = 1;

    auto parse_row = [&](const std::vector<std::string>& fields, int lineno) {
        gene_ids.push_back(detail::trim(fields[0]));
        std::vector<std::size_t> missing;
        const std::size_t row_begin = values.size();
        for (std::size_t j = 1; j < fields.size(); ++j) {
            const std::string cell = detail::trim(fields[j]);
            double v = 0.0;
            bool ok = false;
            if (!cell.empty()) {
                try {
                    std::size_t used = 0;
                    v = std::stod(cell, &used);
                    ok = used == cell.size() && std::isfinite(v);
                } catch (...) {
                    ok = false;
                }
            }
            if (!ok) {
                if (!opts.impute_missing)
                    throw InputError("line " + std::to_string(lineno) + ", column " + std::to_string(j + 1) +
                                     ": cannot parse cell '" + cell + "' as a finite number");
                missing.push_back(values.size());
                v = 0.0;
            }
            values.push_back(v);
        }
        if (!missing.empty()) {
            const std::size_t width = fields.size() - 1;
            double sum = 0.0;
            std::size_t finite = 0;
            for (std::size_t k = row_begin; k < row_begin + width; ++k) {
                if (std::find(missing.begin(), missing.end(), k) == missing.end()) {
                    sum += values[k];
                    ++finite;
                }
            }
            if (finite == 0)
                throw InputError("line " + std::to_string(lineno) + ": row has no parseable cells to impute from");
            for (std::size_t k : missing) values[k] = sum / static_cast<double>(finite);
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> fields = detail::split_line(line, delim);
        if (expected_fields == 0) {
            expected_fields = fields.size();
            if (expected_fields < 3)
                throw InputError("line " + std::to_string(line_no) +
                                 ": expected a gene identifier plus at least two values");
        } else if (fields.size() != expected_fields) {
            throw InputError("line " + std::to_string(line_no) + ": ragged row, expected " +
                             std::to_string(expected_fields) + " fields but found " +
                             std::to_string(fields.size()));
        }
        parse_row(fields, line_no);
    }
    if (gene_ids.empty()) throw InputError("matrix file '" + path + "' has no data rows");

    // Header may or may not carry a corner label above the gene-id column.
    std::vector<std::string> cond_ids;
    const std::size_t data_cols = expected_fields - 1;
    if (header.size() == data_cols + 1) cond_ids.assign(header.begin() + 1, header.end());
    else if (header.size() == data_cols) cond_ids = header;
    else
        throw InputError("line 1: header has " + std::to_string(header.size()) + " fields but data rows have " +
                         std::to_string(data_cols) + " values");

    return ExpressionMatrix::create(std::move(gene_ids), std::move(cond_ids), std::move(values));
}

inline void save_matrix(const ExpressionMatrix& matrix, const std::string& path, char delim = ',') {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write matrix file '" + path + "'");
    out.precision(17);
    out << "id";
    for (const auto& c : matrix.condition_ids) out << delim << c;
    out << '\n';
    for (int i = 0; i < matrix.rows(); ++i) {
        out << matrix.gene_ids[static_cast<std::size_t>(i)];
        for (int j = 0; j < matrix.cols(); ++j) out << delim << matrix.at(i, j);
        out << '\n';
    }
    if (!out) throw InputError("failed writing matrix file '" + path + "'");
}

// ---------------------------------------------------------------------------
// JSON records
// ---------------------------------------------------------------------------

inline ordered_json bicluster_to_json(const Bicluster& bc, const ExpressionMatrix& matrix) {
    ordered_json j;
    ordered_json genes = ordered_json::array();
    ordered_json conds = ordered_json::array();
    for (int r : bc.rows) genes.push_back(matrix.gene_ids[static_cast<std::size_t>(r)]);
    for (int c : bc.cols) conds.push_back(matrix.condition_ids[static_cast<std::size_t>(c)]);
    j["genes"] = std::move(genes);
    j["conditions"] = std::move(conds);
    j["row_indices"] = bc.rows;
    j["col_indices"] = bc.cols;
    j["msr"] = bc.msr;
    j["mfd"] = bc.mfd;
    j["provenance"] = {{"method", bc.provenance.method},
                       {"start_column", bc.provenance.start_column},
                       {"L0", bc.provenance.L0},
                       {"rank", bc.provenance.rank},
                       {"direction", bc.provenance.direction}};
    return j;
}

inline Bicluster bicluster_from_json(const nlohmann::json& j) {
    Bicluster bc;
    bc.rows = j.at("row_indices").get<std::vector<int>>();
    bc.cols = j.at("col_indices").get<std::vector<int>>();
    bc.msr = j.value("msr", std::numeric_limits<double>::quiet_NaN());
    bc.mfd = j.value("mfd", std::numeric_limits<double>::quiet_NaN());
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        bc.provenance.method = p.value("method", "");
        bc.provenance.start_column = p.value("start_column", -1);
        bc.provenance.L0 = p.value("L0", 0);
        bc.provenance.rank = p.value("rank", 1);
        bc.provenance.direction = p.value("direction", 0);
    }
    return bc;
}

inline ordered_json biclusters_to_json(const std::vector<Bicluster>& list, const ExpressionMatrix& matrix) {
    ordered_json arr = ordered_json::array();
    for (const auto& bc : list) arr.push_back(bicluster_to_json(bc, matrix));
    return arr;
}

inline std::vector<Bicluster> load_biclusters(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open bicluster file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw InputError("cannot parse '" + path + "': " + e.what());
    }
    const nlohmann::json& arr = doc.is_array() ? doc : doc.at("biclusters");
    std::vector<Bicluster> out;
    for (const auto& j : arr) out.push_back(bicluster_from_json(j));
    return out;
}

inline ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["granulation"] = {{"method", method_name(cfg.granulation.method)},
                        {"kappa", cfg.granulation.fcm.kappa},
                        {"fcm_tol", cfg.granulation.fcm.tol},
                        {"fcm_max_iters", cfg.granulation.fcm.max_iters},
                        {"fcm_restarts", cfg.granulation.fcm.restarts},
                        {"tau", cfg.granulation.tau},
                        {"jig_windows", cfg.granulation.jig_windows},
                        {"pso_particles", cfg.granulation.pso.particles},
                        {"pso_iterations", cfg.granulation.pso.iterations},
                        {"jig_exhaustive_max", cfg.granulation.jig_exhaustive_max},
                        {"stage_seed", cfg.granulation.seed}};
    j["search"] = {{"min_gene", cfg.search.min_gene}, {"min_cond", cfg.search.min_cond},
                   {"L0", cfg.search.L0},             {"mst_rank", cfg.search.mst_rank},
                   {"start_columns", cfg.search.start_columns}, {"L0_sweep", cfg.search.L0_sweep},
                   {"overlap_filter", cfg.search.overlap_filter}};
    j["refine"] = {{"delta", cfg.refine.delta},
                   {"max_passes", cfg.refine.max_passes},
                   {"gate_add_on_delta", cfg.refine.gate_add_on_delta}};
    j["top_n"] = cfg.top_n;
    j["seed"] = cfg.seed;
    return j;
}

/**
 * Canonical JSON document of a run. Timings are excluded by default so that
 * identical (config, seed) runs serialize byte-identically; pass
 * include_timings for profiling output.
 */
inline ordered_json bundle_to_json(const ResultBundle& bundle, const ExpressionMatrix& matrix,
                                   bool include_timings = false) {
    ordered_json j;
    j["biclusters"] = biclusters_to_json(bundle.biclusters, matrix);
    j["config"] = config_to_json(bundle.config);
    if (!bundle.diagnostic.empty()) j["diagnostic"] = bundle.diagnostic;
    if (include_timings) {
        ordered_json t = ordered_json::array();
        for (const auto& s : bundle.timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
        j["timings"] = std::move(t);
    }
    return j;
}

inline std::string serialize_bundle(const ResultBundle& bundle, const ExpressionMatrix& matrix,
                                    bool include_timings = false) {
    return bundle_to_json(bundle, matrix, include_timings).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Result emission
// ---------------------------------------------------------------------------

enum class EmitFormat { Json, Csv };

/// Plot-ready long-format table: one row per bicluster cell.
inline void write_long_csv(const std::vector<Bicluster>& list, const ExpressionMatrix& matrix,
                           std::ostream& out) {
    out << "gene,condition,value,bicluster\n";
    out.precision(17);
    for (std::size_t k = 0; k < list.size(); ++k) {
        for (int r : list[k].rows)
            for (int c : list[k].cols)
                out << matrix.gene_ids[static_cast<std::size_t>(r)] << ','
                    << matrix.condition_ids[static_cast<std::size_t>(c)] << ',' << matrix.at(r, c) << ',' << k
                    << '\n';
    }
}

inline void emit_results(const ResultBundle& bundle, const ExpressionMatrix& matrix, const std::string& path,
                         EmitFormat format, bool include_timings = false) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write results file '" + path + "'");
    if (format == EmitFormat::Json) out << serialize_bundle(bundle, matrix, include_timings);
    else write_long_csv(bundle.biclusters, matrix, out);
    if (!out) throw InputError("failed writing results file '" + path + "'");
}

/// Rebuilds each bicluster's cell set from a long-format table (indices
/// resolved through the identifier lists). Used for round-trip verification.
inline std::vector<Bicluster> load_long_csv(const std::string& path, const ExpressionMatrix& matrix) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open long-format file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "gene,condition,value,bicluster")
        throw InputError("long-format file '" + path + "' has an unexpected header");

    auto index_of = [](const std::vector<std::string>& ids, const std::string& id) {
        const auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw InputError("unknown identifier '" + id + "' in long-format file");
        return static_cast<int>(it - ids.begin());
    };

    std::vector<std::pair<std::vector<int>, std::vector<int>>> cells;  // per bicluster: rows, cols
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_line(line, ',');
        if (fields.size() != 4)
            throw InputError("line " + std::to_string(line_no) + ": expected 4 fields");
        const auto id = static_cast<std::size_t>(std::stoul(fields[3]));
        if (id >= cells.size()) cells.resize(id + 1);
        cells[id].first.push_back(index_of(matrix.gene_ids, fields[0]));
        cells[id].second.push_back(index_of(matrix.condition_ids, fields[1]));
    }

    std::vector<Bicluster> out;
    for (auto& [rows, cols] : cells) {
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        Bicluster bc;
        bc.rows = std::move(rows);
        bc.cols = std::move(cols);
        out.push_back(std::move(bc));
    }
    return out;
}

}  // namespace gbc

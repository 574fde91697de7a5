#include "gridest/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridest {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_row(const std::string& line, std::size_t n_fields,
                              const std::string& path, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != field.size() || field.empty()) {
            throw IoError(path + ":" + std::to_string(line_no) + ": malformed field '" + field +
                          "'");
        }
        out.push_back(v);
    }
    if (out.size() != n_fields) {
        throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_fields) + " fields, got " + std::to_string(out.size()));
    }
    return out;
}

std::vector<std::vector<double>> read_table(const std::string& path,
                                            const std::string& expected_header,
                                            std::size_t n_fields) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header) {
        throw IoError(path + ":1: bad header '" + line + "', expected '" + expected_header + "'");
    }
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(parse_row(line, n_fields, path, line_no));
    }
    return rows;
}

void check_uniform_time(const std::vector<std::vector<double>>& rows, const std::string& path) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i][0] > rows[i - 1][0])) {
            throw IoError(path + ": time not strictly increasing at row " + std::to_string(i + 1));
        }
    }
    if (rows.size() > 2) {
        const double dt = rows[1][0] - rows[0][0];
        for (std::size_t i = 2; i < rows.size(); ++i) {
            if (std::abs(rows[i][0] - rows[i - 1][0] - dt) > 1e-9) {
                throw IoError(path + ": non-uniform sample spacing at row " + std::to_string(i + 1));
            }
        }
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

} // namespace

std::vector<Sample> ingest_csv(const std::string& path, const AggParams& params, FreqUnit unit) {
    auto rows = read_table(path, "t,f_av,p_pfc_tot,p_e_pfc", 4);
    check_uniform_time(rows, path);

    if (unit == FreqUnit::Auto && !rows.empty()) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[1];
        const double mean = sum / static_cast<double>(rows.size());
        if (std::abs(mean - 1.0) < 0.1) {
            unit = FreqUnit::Pu;
        } else if (std::abs(mean - params.f_nom) < 0.1 * params.f_nom) {
            unit = FreqUnit::Hz;
        } else {
            throw IoError(path + ": cannot infer frequency unit (mean f_av = " + fmt(mean) +
                          "); pass an explicit unit flag");
        }
    }

    std::vector<Sample> stream;
    stream.reserve(rows.size());
    for (const auto& r : rows) {
        const double omega = unit == FreqUnit::Hz ? r[1] / params.f_nom : r[1];
        stream.push_back({r[0], omega, r[2], r[3]});
    }
    return stream;
}

void emit_csv(const std::vector<Sample>& stream, const std::string& path) {
    auto out = open_out(path);
    out << "t,f_av,p_pfc_tot,p_e_pfc\n";
    for (const auto& s : stream) {
        out << fmt(s.t) << ',' << fmt(s.omega_av) << ',' << fmt(s.p_pfc_tot) << ','
            << fmt(s.p_e_pfc) << '\n';
    }
}

void emit_truth_csv(const std::vector<TruthPoint>& truth, const std::string& path) {
    auto out = open_out(path);
    out << "t,h_tot,p_m_pfc\n";
    for (const auto& p : truth) {
        out << fmt(p.t) << ',' << fmt(p.h_tot) << ',' << fmt(p.p_m_pfc) << '\n';
    }
}

std::vector<TruthPoint> ingest_truth_csv(const std::string& path) {
    auto rows = read_table(path, "t,h_tot,p_m_pfc", 3);
    std::vector<TruthPoint> truth;
    truth.reserve(rows.size());
    for (const auto& r : rows) truth.push_back({r[0], r[1], r[2]});
    return truth;
}

void emit_estimates_csv(const std::vector<EstimateRecord>& trace, const std::string& path) {
    auto out = open_out(path);
    out << "t,eta1_hat,eta2_hat,h_tot_hat,p_m_pfc_hat,delta_l2\n";
    for (const auto& r : trace) {
        out << fmt(r.t) << ',' << fmt(r.eta1_hat) << ',' << fmt(r.eta2_hat) << ','
            << fmt(r.h_tot_hat) << ',' << fmt(r.p_m_pfc_hat) << ',' << fmt(r.delta_l2) << '\n';
    }
}

std::vector<EstimateRecord> ingest_estimates_csv(const std::string& path) {
    auto rows = read_table(path, "t,eta1_hat,eta2_hat,h_tot_hat,p_m_pfc_hat,delta_l2", 6);
    std::vector<EstimateRecord> trace;
    trace.reserve(rows.size());
    for (const auto& r : rows) trace.push_back({r[0], r[1], r[2], r[3], r[4], r[5]});
    return trace;
}

void emit_columns_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || header.size() != columns.size()) {
        throw IoError("emit_columns_csv: header/column mismatch for " + path);
    }
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << header[c] << (c + 1 < header.size() ? ',' : '\n');
    }
    const std::size_t n = columns[0].size();
    for (const auto& col : columns) {
        if (col.size() != n) throw IoError("emit_columns_csv: ragged columns for " + path);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << fmt(columns[c][i]) << (c + 1 < columns.size() ? ',' : '\n');
        }
    }
}

} // namespace gridest

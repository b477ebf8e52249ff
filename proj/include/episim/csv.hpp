#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "episim/burden.hpp"
#include "episim/engine.hpp"
#include "episim/ensemble.hpp"
#include "episim/oracle.hpp"

namespace episim {

struct CsvOptions {
    bool normalized = false;        // render counts as fractions of N, 6 decimals
    const BurdenSeries* burden = nullptr;
    bool deterministic_flag = false;  // mark oracle output
};

namespace detail {

inline std::string csv_header(bool with_burden) {
    std::string head = "day,S,E,I,R,S_G,E_G,I_G,R_G,new_inf_G,new_inf_other";
    if (with_burden) head += ",ED_G,ED_other,ED_total";
    head += ",phase";
    return head;
}

inline void append_number(std::string& line, double value, bool fraction) {
    char buf[32];
    if (fraction)
        std::snprintf(buf, sizeof buf, ",%.6f", value);
    else if (value == static_cast<double>(static_cast<long long>(value)))
        std::snprintf(buf, sizeof buf, ",%lld", static_cast<long long>(value));
    else
        std::snprintf(buf, sizeof buf, ",%.6f", value);
    line += buf;
}

template <typename Row>
void write_row(std::string& out, int day, const Row& row, double n, const CsvOptions& opts,
               std::size_t index) {
    out += std::to_string(day);
    const double scale = opts.normalized ? 1.0 / n : 1.0;
    const double values[] = {
        static_cast<double>(row.s),  static_cast<double>(row.e),  static_cast<double>(row.i),
        static_cast<double>(row.r),  static_cast<double>(row.s_g), static_cast<double>(row.e_g),
        static_cast<double>(row.i_g), static_cast<double>(row.r_g),
        static_cast<double>(row.new_inf_g), static_cast<double>(row.new_inf_other)};
    for (const double v : values) append_number(out, v * scale, opts.normalized);
    if (opts.burden) {
        append_number(out, opts.burden->ed_g[index], true);
        append_number(out, opts.burden->ed_other[index], true);
        append_number(out, opts.burden->ed_total[index], true);
    }
    out += ',' + std::to_string(row.active_phase);
    out += '\n';  // LF line endings
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace detail

inline void write_csv(const Trajectory& traj, const std::string& path,
                      const CsvOptions& opts = {}) {
    if (opts.burden && opts.burden->ed_total.size() != traj.days.size())
        throw std::invalid_argument("write_csv: burden series length does not match trajectory");
    std::string text;
    if (opts.deterministic_flag) text += "# deterministic=true\n";
    text += detail::csv_header(opts.burden != nullptr);
    text += '\n';
    const double n = static_cast<double>(traj.scenario.population.n_total);
    for (std::size_t idx = 0; idx < traj.days.size(); ++idx)
        detail::write_row(text, traj.days[idx].day, traj.days[idx], n, opts, idx);
    detail::write_text(path, text);
}

inline void write_csv(const MeanFieldTrajectory& traj, const std::string& path,
                      CsvOptions opts = {}) {
    opts.deterministic_flag = true;
    if (opts.burden && opts.burden->ed_total.size() != traj.days.size())
        throw std::invalid_argument("write_csv: burden series length does not match trajectory");
    std::string text = "# deterministic=true\n";
    text += detail::csv_header(opts.burden != nullptr);
    text += '\n';
    const double n = static_cast<double>(traj.scenario.population.n_total);
    const double scale = opts.normalized ? 1.0 / n : 1.0;
    for (std::size_t idx = 0; idx < traj.days.size(); ++idx) {
        const auto& rec = traj.days[idx];
        std::string& out = text;
        out += std::to_string(rec.day);
        const double values[] = {rec.s, rec.e, rec.i, rec.r, rec.s_g, rec.e_g, rec.i_g, rec.r_g,
                                 rec.new_inf_g, rec.new_inf_other};
        for (const double v : values) detail::append_number(out, v * scale, true);
        if (opts.burden) {
            detail::append_number(out, opts.burden->ed_g[idx], true);
            detail::append_number(out, opts.burden->ed_other[idx], true);
            detail::append_number(out, opts.burden->ed_total[idx], true);
        }
        out += ',' + std::to_string(rec.active_phase);
        out += '\n';
    }
    detail::write_text(path, text);
}

/// Ensemble output: per-day means of every column over the replicates,
/// shorter replicates extended with their final (absorbing) record.
inline void write_csv(const Ensemble& ens, const std::string& path, const CsvOptions& opts = {}) {
    const std::size_t len = ens.max_days();
    if (opts.burden && opts.burden->ed_total.size() != len)
        throw std::invalid_argument("write_csv: burden series length does not match ensemble");
    std::string text;
    text += detail::csv_header(opts.burden != nullptr);
    text += '\n';
    const double n = static_cast<double>(ens.scenario.population.n_total);
    const auto reps = static_cast<double>(ens.replicates.size());

    struct MeanRow {
        double s, e, i, r, s_g, e_g, i_g, r_g, new_inf_g, new_inf_other;
        int active_phase;
    };
    for (std::size_t t = 0; t < len; ++t) {
        MeanRow row{};
        for (std::size_t rep = 0; rep < ens.replicates.size(); ++rep) {
            const auto& rec = ens.record_at(rep, t);
            row.s += static_cast<double>(rec.s);
            row.e += static_cast<double>(rec.e);
            row.i += static_cast<double>(rec.i);
            row.r += static_cast<double>(rec.r);
            row.s_g += static_cast<double>(rec.s_g);
            row.e_g += static_cast<double>(rec.e_g);
            row.i_g += static_cast<double>(rec.i_g);
            row.r_g += static_cast<double>(rec.r_g);
            row.new_inf_g += static_cast<double>(rec.new_inf_g);
            row.new_inf_other += static_cast<double>(rec.new_inf_other);
        }
        row.s /= reps; row.e /= reps; row.i /= reps; row.r /= reps;
        row.s_g /= reps; row.e_g /= reps; row.i_g /= reps; row.r_g /= reps;
        row.new_inf_g /= reps; row.new_inf_other /= reps;
        row.active_phase = ens.record_at(0, t).active_phase;

        std::string& out = text;
        out += std::to_string(static_cast<int>(t));
        const double scale = opts.normalized ? 1.0 / n : 1.0;
        const double values[] = {row.s, row.e, row.i, row.r, row.s_g, row.e_g, row.i_g, row.r_g,
                                 row.new_inf_g, row.new_inf_other};
        for (const double v : values) detail::append_number(out, v * scale, true);
        if (opts.burden) {
            detail::append_number(out, opts.burden->ed_g[t], true);
            detail::append_number(out, opts.burden->ed_other[t], true);
            detail::append_number(out, opts.burden->ed_total[t], true);
        }
        out += ',' + std::to_string(row.active_phase);
        out += '\n';
    }
    detail::write_text(path, text);
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool deterministic = false;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c] == name) return c;
        throw std::invalid_argument("csv: no column named '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row[idx]);
        return out;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    CsvTable table;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("deterministic=true") != std::string::npos) table.deterministic = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::runtime_error("csv: ragged row in '" + path + "'");
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace episim

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emx/errors.hpp"
#include "emx/synth.hpp"

namespace emx {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

namespace detail {

inline std::string format_full(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

inline void write_csv(std::ostream& out, const CsvTable& t) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
        out << (c ? "," : "") << t.header[c];
    out << "\n";
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << detail::format_full(t.columns[c][r]);
        out << "\n";
    }
}

inline void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    write_csv(out, t);
    if (!out.good()) throw io_error("write failed for '" + path + "'");
}

inline CsvTable read_csv(std::istream& in, const std::string& label = "<stream>") {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty CSV: " + label);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    t.columns.resize(t.header.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= t.columns.size())
                throw io_error(label + ": too many columns on row " + std::to_string(row));
            try {
                std::size_t used = 0;
                t.columns[col].push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw io_error(label + ": non-numeric cell '" + cell + "' on row " +
                               std::to_string(row));
            }
            ++col;
        }
        if (col != t.columns.size())
            throw io_error(label + ": short row " + std::to_string(row));
    }
    return t;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read '" + path + "'");
    return read_csv(in, path);
}

// Fixed column contracts per dataset kind.
inline std::vector<std::string> dataset_columns(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::spectrum: return {"frequency_hz", "psd_v2_per_hz", "sigma"};
        case DatasetKind::ringdown: return {"time_s", "amplitude_v", "sigma"};
        case DatasetKind::area_vs_t: return {"temperature_k", "area_v2", "sigma"};
        case DatasetKind::area_vs_v: return {"bias_v", "area_v2", "sigma"};
        case DatasetKind::snr_vs_v: return {"bias_v", "snr", "sigma"};
    }
    throw io_error("unknown dataset kind");
}

inline CsvTable to_csv(const SyntheticDataset& ds) {
    CsvTable t;
    t.header = dataset_columns(ds.kind);
    t.columns = {ds.abscissa, ds.readings, ds.sigma};
    return t;
}

/// Identify a dataset CSV by its header. The anti-spring curve
/// (bias_v, frequency_hz, sigma) is accepted as an input format even though
/// no generator emits it directly.
inline std::string dataset_kind_of_header(const std::vector<std::string>& header) {
    for (DatasetKind k : {DatasetKind::spectrum, DatasetKind::ringdown, DatasetKind::area_vs_t,
                          DatasetKind::area_vs_v, DatasetKind::snr_vs_v})
        if (header == dataset_columns(k)) return to_string(k);
    if (header == std::vector<std::string>{"bias_v", "frequency_hz", "sigma"})
        return "freq_vs_v";
    throw io_error("unrecognized dataset columns");
}

}  // namespace emx

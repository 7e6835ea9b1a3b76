// csv.hpp — Deterministic CSV emission: UTF-8, header row, '.' decimal point,
// shortest round-trip number formatting, '\n' line endings. Identical data
// produces identical bytes on any locale.

#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "declab/errors.hpp"

namespace declab::cli {

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), n_cols_(columns.size()) {
        if (!out_) throw Error("CsvWriter: cannot open " + path);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out_ << ',';
            out_ << columns[c];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != n_cols_)
            throw Error("CsvWriter: row width does not match header");
        for (std::size_t c = 0; c < values.size(); ++c) {
            if (c) out_ << ',';
            out_ << format_number(values[c]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t n_cols_;
};

} // namespace declab::cli

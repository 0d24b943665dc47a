// csv.hpp — deterministic CSV output (full double precision, versioned schema)

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lchain {

inline std::string csv_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17e", x);
    return buf;
}

inline std::string csv_num(std::uint64_t x) { return std::to_string(x); }

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema_name, int schema_version,
              const std::vector<std::string>& columns)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        out_ << "# schema_version=" << schema_version << " schema=" << schema_name << "\n";
        write_cells(columns);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(csv_num(v));
        write_cells(cells);
    }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace lchain

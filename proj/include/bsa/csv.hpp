#pragma once

// Deterministic CSV output: comma separator, '.' decimal point, header row,
// LF line endings, fixed %g formatting.

#include <fstream>
#include <string>
#include <vector>

#include "bsa/core.hpp"

namespace bsa::io {

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header, int digits = 12)
        : digits_(digits) {
        append_row_text(header);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(fmt_g(v, digits_));
        append_row_text(cells);
    }

    void row_text(const std::vector<std::string>& cells) { append_row_text(cells); }

    const std::string& text() const { return text_; }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("CsvWriter: cannot open " + path);
        out << text_;
    }

private:
    std::string text_;
    int digits_;

    void append_row_text(const std::vector<std::string>& cells) {
        for (size_t k = 0; k < cells.size(); ++k) {
            if (k) text_ += ',';
            text_ += cells[k];
        }
        text_ += '\n';
    }
};

}  // namespace bsa::io

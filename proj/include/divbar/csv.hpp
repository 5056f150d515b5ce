#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace divbar {

/// Round-trippable decimal form of a double ("%.17g").
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/**
 * @brief Minimal CSV emitter: '#' metadata comments, one header row, data
 * rows. LF line endings, no quoting (values here are numbers and plain
 * identifiers), no timestamps, so identical runs produce identical bytes.
 */
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(const std::string& text) { os_ << "# " << text << "\n"; }

    void header(const std::vector<std::string>& names) { line(names); }

    void row(const std::vector<std::string>& cells) { line(cells); }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << "\n";
    }

    std::ostream& os_;
};

}  // namespace divbar

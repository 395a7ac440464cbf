// Deterministic CSV emission: comma separator, '.' decimal point, LF line
// endings, header row, 17 significant digits for reals.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pxplab::csv {

// %.17g with the C locale; round-trips any double exactly.
std::string real(double v);
std::string integer(long long v);
std::string boolean(bool v);

class Writer {
  public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& names) { line(names); }
    void row(const std::vector<std::string>& cells) { line(cells); }

  private:
    void line(const std::vector<std::string>& cells);

    std::ostream& out_;
};

}  // namespace pxplab::csv

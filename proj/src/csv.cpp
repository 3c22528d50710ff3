#include "deterrence/csv.hpp"

#include <cstdio>

#include "deterrence/errors.hpp"

namespace deterrence {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header,
                     std::uint64_t config_hash, std::uint64_t seed) {
    out_.open(path, std::ios::binary);
    if (!out_) throw DomainError("cannot open output file: " + path);
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    out_ << "# config_hash=" << hash_hex << " seed=" << seed << "\n";
    out_ << header << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

} // namespace deterrence

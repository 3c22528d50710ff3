#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace deterrence {

/// Shortest round-trip decimal with 17 significant digits.
std::string format_g17(double v);

/// CSV file with a leading reproduction comment line
///   # config_hash=<hex> seed=<seed>
/// followed by the header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header,
              std::uint64_t config_hash, std::uint64_t seed);

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

} // namespace deterrence

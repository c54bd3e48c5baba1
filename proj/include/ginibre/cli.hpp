#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ginibre::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

struct ThetaGrid {
    double start = -10.0;
    double stop = 20.0;
    double step = 1.0;

    /// start + k * step for k = 0, 1, ... while <= stop (with a 1e-9 step slack).
    [[nodiscard]] std::vector<double> values_db() const;
};

/// Parses "START:STOP:STEP". Throws std::invalid_argument on malformed
/// input, step <= 0 or start > stop.
ThetaGrid parse_theta_grid(std::string_view text);

/// 12 significant digits, '.' separator, independent of the C locale.
std::string format_number(double v);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ginibre::cli

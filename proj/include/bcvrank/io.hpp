#ifndef BCVRANK_IO_HPP
#define BCVRANK_IO_HPP

#include <string>
#include <vector>

#include "bcvrank/simgen.hpp"

namespace bcvrank {
namespace io {

/// Locale-independent shortest round-trip formatting.
std::string format_double(double x);

struct LabeledMatrix {
    Matrix values;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

/// Matrix CSV dialect: comma separated, '.' decimal, mandatory header row of
/// column labels, first column holds the variable label of each row.
LabeledMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& row_labels = {},
                      const std::vector<std::string>& col_labels = {});

/// Dataset export: `<stem>.csv` with Y plus `<stem>.json` holding the seed,
/// scenario, noise level, true variances, strengths and category labels.
void write_dataset(const std::string& stem, const GeneratedDataset& data,
                   const ScenarioSpec& spec, const NoiseSpec& noise);

}  // namespace io
}  // namespace bcvrank

#endif  // BCVRANK_IO_HPP

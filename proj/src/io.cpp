#include "bcvrank/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bcvrank {
namespace io {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

LabeledMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open '" + path + "'");
    }
    LabeledMatrix out;
    std::string line;
    std::vector<std::vector<double>> rows;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();

        if (line_no == 1) {
            if (cells.size() < 2) {
                throw CsvParseError("header row needs a label column and at least one "
                                    "observation column", 1, 1);
            }
            out.col_labels.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (cells.size() != out.col_labels.size() + 1) {
            throw CsvParseError("ragged row: expected " +
                                    std::to_string(out.col_labels.size() + 1) +
                                    " cells, found " + std::to_string(cells.size()),
                                line_no, static_cast<long>(cells.size()));
        }
        out.row_labels.push_back(cells[0]);
        std::vector<double> vals(cells.size() - 1);
        for (size_t j = 1; j < cells.size(); ++j) {
            const std::string& c = cells[j];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size()) {
                throw CsvParseError("non-numeric cell '" + c + "'", line_no,
                                    static_cast<long>(j + 1));
            }
            vals[j - 1] = v;
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) {
        throw CsvParseError("no data rows", line_no, 1);
    }
    out.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(out.col_labels.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    if (!out.values.allFinite()) {
        throw CsvParseError("matrix has non-finite entries", 0, 0);
    }
    return out;
}

void write_matrix_csv(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    std::ofstream outf(path);
    if (!outf) {
        throw InvalidInputError("cannot write '" + path + "'");
    }
    outf << "var";
    for (Index j = 0; j < values.cols(); ++j) {
        if (!col_labels.empty()) {
            outf << ',' << col_labels[static_cast<size_t>(j)];
        } else {
            outf << ",obs" << (j + 1);
        }
    }
    outf << '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        if (!row_labels.empty()) {
            outf << row_labels[static_cast<size_t>(i)];
        } else {
            outf << 'v' << (i + 1);
        }
        for (Index j = 0; j < values.cols(); ++j) {
            outf << ',' << format_double(values(i, j));
        }
        outf << '\n';
    }
}

void write_dataset(const std::string& stem, const GeneratedDataset& data,
                   const ScenarioSpec& spec, const NoiseSpec& noise) {
    write_matrix_csv(stem + ".csv", data.y.values());

    nlohmann::json j;
    j["seed"] = data.seed;
    j["N"] = data.y.n_vars();
    j["n"] = data.y.n_obs();
    j["scenario"] = {{"strong", spec.n_strong},
                     {"useful", spec.n_useful},
                     {"harmful", spec.n_harmful},
                     {"undetectable", spec.n_undetectable}};
    j["var_sigma2"] = noise.var_sigma2;
    j["sigma2"] = std::vector<double>(data.sigma.sigma2.begin(), data.sigma.sigma2.end());
    Vector d2 = data.d.array().square();
    j["d2"] = std::vector<double>(d2.begin(), d2.end());
    std::vector<std::string> cats;
    cats.reserve(data.categories.size());
    for (FactorCategory c : data.categories) cats.emplace_back(to_string(c));
    j["categories"] = cats;

    std::ofstream outf(stem + ".json");
    if (!outf) {
        throw InvalidInputError("cannot write '" + stem + ".json'");
    }
    outf << j.dump(2) << '\n';
}

}  // namespace io
}  // namespace bcvrank
